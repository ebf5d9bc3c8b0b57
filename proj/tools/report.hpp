#pragma once

#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace nortower::cli {

// Key-value report; keys print sorted so output is stable across runs.
class Report {
 public:
  template <class T>
  void set(const std::string& key, const T& value) {
    if constexpr (std::is_same_v<T, bool>)
      values_[key] = value ? "true" : "false";
    else if constexpr (std::is_arithmetic_v<T>)
      values_[key] = std::to_string(value);
    else
      values_[key] = std::string(value);
  }

  // Records one assertion together with a one-line statement of what it checks.
  void check(const std::string& name, bool ok, const std::string& anchor) {
    values_["check." + name] = ok ? "pass" : "fail";
    anchors_.push_back(name + ": " + anchor);
    failed_ = failed_ || !ok;
  }

  bool failed() const noexcept { return failed_; }

  void print(std::ostream& out) const {
    for (const auto& a : anchors_) out << "# anchor: " << a << '\n';
    for (const auto& [k, v] : values_) out << k << '=' << v << '\n';
  }

 private:
  std::vector<std::string> anchors_;
  std::map<std::string, std::string> values_;
  bool failed_ = false;
};

}  // namespace nortower::cli
