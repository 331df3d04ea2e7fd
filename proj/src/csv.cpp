#include "soop/csv.hpp"

#include <cmath>
#include <cstdio>

namespace soop::csv {

std::string number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", value);
    return buf;
}

std::string number(const std::optional<double>& value) {
    return value ? number(*value) : std::string{};
}

}  // namespace soop::csv
