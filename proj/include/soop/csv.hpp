#pragma once

#include <optional>
#include <string>

namespace soop::csv {

/// Fixed scientific notation with 17 significant digits, e.g. 1.2345678901234567e-10.
std::string number(double value);

/// Empty string for an absent value.
std::string number(const std::optional<double>& value);

}  // namespace soop::csv
