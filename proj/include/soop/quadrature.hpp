#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "soop/parallel.hpp"

namespace soop {

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0;
    int max_depth = 40;
    Execution execution = Execution::Parallel;
};

/// Zeroth and second moments of a non-negative function over an interval.
struct SpectralMoments {
    double m0 = 0.0;    // integral of w(f)
    double m2 = 0.0;    // integral of f^2 w(f)
    double m0_error = 0.0;
    double m2_error = 0.0;
    std::size_t evaluations = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integration of w(f) and f^2 w(f) over
/// consecutive panels delimited by `edges`. Each panel is bisected until its
/// error estimate drops below its share of the tolerance. Panel results are
/// summed in panel order, so serial and parallel execution agree bit for bit.
/// Throws QuadratureError when a panel does not converge within max_depth.
SpectralMoments integrate_moments(const std::function<double(double)>& weight,
                                  std::span<const double> edges, const QuadratureOptions& options = {});

/// Panel edges covering [lo, hi] through every breakpoint, with no panel
/// wider than `max_width` (<= 0: breakpoints only).
std::vector<double> panel_edges(double lo, double hi, std::span<const double> breakpoints, double max_width);

}  // namespace soop
