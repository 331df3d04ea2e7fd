#include "soop/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace soop {

namespace {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Pair {
    double m0 = 0.0, m2 = 0.0;
};

struct Rule {
    Pair value;
    Pair error;
};

double quadpack_error(double kronrod, double gauss, double resasc) {
    double err = std::abs(kronrod - gauss);
    if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    return err;
}

Rule gk15(const std::function<double(double)>& w, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    std::array<double, 15> v0{}, v2{};
    std::array<double, 15> xs{};
    xs[7] = center;
    for (int j = 0; j < 7; ++j) {
        xs[j] = center - half * kXgk[j];
        xs[14 - j] = center + half * kXgk[j];
    }
    for (int j = 0; j < 15; ++j) {
        const double fx = w(xs[j]);
        v0[j] = fx;
        v2[j] = xs[j] * xs[j] * fx;
    }

    auto apply = [&](const std::array<double, 15>& v, double& kron, double& gauss, double& resasc) {
        kron = kWgk[7] * v[7];
        gauss = kWg[3] * v[7];
        for (int j = 0; j < 7; ++j) {
            const double s = v[j] + v[14 - j];
            kron += kWgk[j] * s;
            if (j % 2 == 1) gauss += kWg[j / 2] * s;
        }
        const double mean = kron * 0.5;
        resasc = kWgk[7] * std::abs(v[7] - mean);
        for (int j = 0; j < 7; ++j) resasc += kWgk[j] * (std::abs(v[j] - mean) + std::abs(v[14 - j] - mean));
        kron *= half;
        gauss *= half;
        resasc *= std::abs(half);
    };

    Rule r;
    double k, g, asc;
    apply(v0, k, g, asc);
    r.value.m0 = k;
    r.error.m0 = quadpack_error(k, g, asc);
    apply(v2, k, g, asc);
    r.value.m2 = k;
    r.error.m2 = quadpack_error(k, g, asc);
    return r;
}

struct PanelResult {
    Pair value;
    Pair error;
    std::size_t evaluations = 0;
    bool converged = true;
};

// Recursive bisection of one panel until both moment errors meet their targets.
PanelResult integrate_panel(const std::function<double(double)>& w, double a, double b, const Rule& whole,
                            double tol_floor0, double tol_floor2, double rel_tol, int depth_left) {
    PanelResult out;
    const double t0 = std::max(rel_tol * std::abs(whole.value.m0), tol_floor0);
    const double t2 = std::max(rel_tol * std::abs(whole.value.m2), tol_floor2);
    if (whole.error.m0 <= t0 && whole.error.m2 <= t2) {
        out.value = whole.value;
        out.error = whole.error;
        return out;
    }
    if (depth_left == 0) {
        out.value = whole.value;
        out.error = whole.error;
        out.converged = false;
        return out;
    }
    const double mid = 0.5 * (a + b);
    const Rule left = gk15(w, a, mid);
    const Rule right = gk15(w, mid, b);
    const PanelResult l = integrate_panel(w, a, mid, left, 0.5 * tol_floor0, 0.5 * tol_floor2, rel_tol, depth_left - 1);
    const PanelResult r = integrate_panel(w, mid, b, right, 0.5 * tol_floor0, 0.5 * tol_floor2, rel_tol, depth_left - 1);
    out.value = {l.value.m0 + r.value.m0, l.value.m2 + r.value.m2};
    out.error = {l.error.m0 + r.error.m0, l.error.m2 + r.error.m2};
    out.evaluations = 30 + l.evaluations + r.evaluations;
    out.converged = l.converged && r.converged;
    return out;
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0, comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace

std::vector<double> panel_edges(double lo, double hi, std::span<const double> breakpoints, double max_width) {
    if (!(hi > lo)) throw std::invalid_argument("panel_edges: empty interval");
    std::vector<double> knots{lo};
    for (double b : breakpoints)
        if (b > lo && b < hi) knots.push_back(b);
    knots.push_back(hi);
    std::sort(knots.begin(), knots.end());

    std::vector<double> edges{knots.front()};
    for (std::size_t k = 1; k < knots.size(); ++k) {
        const double a = knots[k - 1], b = knots[k];
        if (!(b > a)) continue;
        const std::size_t pieces =
            max_width > 0.0 ? static_cast<std::size_t>(std::ceil((b - a) / max_width)) : std::size_t{1};
        for (std::size_t p = 1; p < pieces; ++p) edges.push_back(a + (b - a) * static_cast<double>(p) / pieces);
        edges.push_back(b);
    }
    return edges;
}

SpectralMoments integrate_moments(const std::function<double(double)>& weight, std::span<const double> edges,
                                  const QuadratureOptions& options) {
    if (edges.size() < 2) throw std::invalid_argument("integrate_moments: need at least one panel");
    const std::size_t panels = edges.size() - 1;
    const long long count = static_cast<long long>(panels);

    // Pass 1: a single GK15 per panel gives the scale for the absolute floor.
    std::vector<Rule> coarse(panels);
    auto first_pass = [&](long long p) { coarse[p] = gk15(weight, edges[p], edges[p + 1]); };
    if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (long long p = 0; p < count; ++p) first_pass(p);
    } else {
        for (long long p = 0; p < count; ++p) first_pass(p);
    }

    CompensatedSum scale0, scale2;
    for (const Rule& r : coarse) {
        scale0.add(std::abs(r.value.m0));
        scale2.add(std::abs(r.value.m2));
    }
    // Panels share a tenth of the relative budget as an absolute floor so
    // near-empty panels are not refined down to round-off.
    const double floor0 = std::max(options.abs_tol, 0.1 * options.rel_tol * scale0.value()) / panels;
    const double floor2 = std::max(options.abs_tol, 0.1 * options.rel_tol * scale2.value()) / panels;

    // Pass 2: adaptive refinement.
    std::vector<PanelResult> fine(panels);
    auto second_pass = [&](long long p) {
        fine[p] = integrate_panel(weight, edges[p], edges[p + 1], coarse[p], floor0, floor2, options.rel_tol,
                                  options.max_depth);
        fine[p].evaluations += 15;
    };
    if (options.execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (long long p = 0; p < count; ++p) second_pass(p);
    } else {
        for (long long p = 0; p < count; ++p) second_pass(p);
    }

    SpectralMoments out;
    CompensatedSum m0, m2, e0, e2;
    for (std::size_t p = 0; p < panels; ++p) {
        if (!fine[p].converged)
            throw QuadratureError("quadrature did not converge on panel [" + std::to_string(edges[p]) + ", " +
                                  std::to_string(edges[p + 1]) + "]");
        m0.add(fine[p].value.m0);
        m2.add(fine[p].value.m2);
        e0.add(fine[p].error.m0);
        e2.add(fine[p].error.m2);
        out.evaluations += fine[p].evaluations;
    }
    out.m0 = m0.value();
    out.m2 = m2.value();
    out.m0_error = e0.value();
    out.m2_error = e2.value();
    return out;
}

}  // namespace soop
