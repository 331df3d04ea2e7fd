#include "soop/gdop.hpp"

#include <algorithm>
#include <cmath>

#include "soop/orbits.hpp"

namespace soop {

GeometryMatrix geometry_matrix(const Vec3& site_ecef, std::span<const Vec3> sats_ecef) {
    if (sats_ecef.empty()) throw std::invalid_argument("geometry matrix needs at least one satellite");
    const orbits::Geodetic g = orbits::ecef_to_geodetic(site_ecef);
    const orbits::EnuBasis enu = orbits::enu_basis(g.latitude_deg, g.longitude_deg);

    GeometryMatrix h;
    h.rows.reserve(sats_ecef.size());
    for (const Vec3& sat : sats_ecef) {
        const Vec3 los = sat - site_ecef;
        const double range = norm(los);
        if (!(range > 1e-6)) throw std::invalid_argument("satellite coincides with the site");
        const Vec3 u{dot(los, enu.east) / range, dot(los, enu.north) / range, dot(los, enu.up) / range};
        const double un = norm(u);  // renormalise away round-off of the basis projection
        h.rows.push_back({-u[0] / un, -u[1] / un, -u[2] / un, 1.0});
    }
    return h;
}

std::array<double, 4> symmetric_eigenvalues(std::array<std::array<double, 4>, 4> a) {
    // Cyclic Jacobi rotations until the off-diagonal mass is negligible.
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0, diag = 0.0;
        for (int i = 0; i < 4; ++i) {
            diag += a[i][i] * a[i][i];
            for (int j = i + 1; j < 4; ++j) off += a[i][j] * a[i][j];
        }
        if (off <= 1e-34 * diag || off == 0.0) break;

        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 4; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 4; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 4; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    std::array<double, 4> ev{a[0][0], a[1][1], a[2][2], a[3][3]};
    std::sort(ev.begin(), ev.end());
    return ev;
}

GdopResult gdop(const GeometryMatrix& h) {
    if (h.size() < 4) throw std::invalid_argument("GDOP needs at least four satellites");
    std::array<std::array<double, 4>, 4> n{};
    for (const auto& row : h.rows)
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) n[i][j] += row[i] * row[j];

    const auto ev = symmetric_eigenvalues(n);
    if (!(ev[0] > 0.0)) throw SingularGeometry("singular geometry: rank-deficient normal matrix");
    const double cond = ev[3] / ev[0];
    if (!(cond <= kSingularConditionNumber)) throw SingularGeometry("singular geometry: condition number too large");

    double trace = 0.0;
    for (double l : ev) trace += 1.0 / l;
    return {std::sqrt(trace), cond};
}

}  // namespace soop
