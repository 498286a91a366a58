#pragma once

#include <string>
#include <string_view>

namespace fractgv {

/// Shortest decimal form that round-trips to the same double ("inf", "-inf",
/// "nan" for the non-finite values).
std::string format_double(double x);

/// Strict parse of a whole token; throws std::invalid_argument otherwise.
double parse_double(std::string_view text);

}  // namespace fractgv
