#pragma once

#include <algorithm>
#include <cmath>

// Relative comparison without doctest::Approx's unit scale, which would make
// checks on small magnitudes (s^2, Hz-scale PSDs) vacuous.
inline bool rel_close(double a, double b, double rel) {
    if (a == b) return true;
    return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b));
}
