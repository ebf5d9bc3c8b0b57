#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nortower::detail {

struct Line {
  int number = 0;
  std::vector<std::string> tokens;
};

// Splits into whitespace-separated tokens, dropping '#' comments and blank lines.
std::vector<Line> tokenize(std::string_view text);

std::vector<std::string> split(std::string_view text, char sep);

[[noreturn]] void parse_fail(int line, const std::string& msg);

}  // namespace nortower::detail
