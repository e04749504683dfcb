#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "occutime/test_function.hpp"

namespace occutime {

// Parses a function expression such as `lacunary(s=1.2, J=12)`,
// `indicator(0, 1)` or `tensor(gaussian_bump, hat)`. Arguments are
// positional or key=value and may be separated by ',' or ';'. Unknown names
// and keys raise ConfigError.
TestFunction parse_function(std::string_view text);

// Splits on `sep` at parenthesis depth zero and trims each piece.
std::vector<std::string> split_top_level(std::string_view text, char sep);

}  // namespace occutime
