#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <vector>

#include "soop/vec3.hpp"

namespace soop {

class SingularGeometry : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// k x 4 geometry matrix: row i = [-u_e, -u_n, -u_u, 1] for the unit line of
/// sight u from the site to satellite i, expressed in the site's ENU frame.
struct GeometryMatrix {
    std::vector<std::array<double, 4>> rows;
    std::size_t size() const { return rows.size(); }
};

/// Throws std::invalid_argument if no satellite is given or one coincides
/// with the site.
GeometryMatrix geometry_matrix(const Vec3& site_ecef, std::span<const Vec3> sats_ecef);

struct GdopResult {
    double gdop;
    double condition_number;  // of H^T H
};

/// Condition number of H^T H above which the geometry is treated as singular.
inline constexpr double kSingularConditionNumber = 1e12;

/// sqrt(trace((H^T H)^-1)) from the eigenvalues of the 4x4 normal matrix
/// (cyclic Jacobi). Throws std::invalid_argument for fewer than four rows and
/// SingularGeometry when the normal matrix is rank deficient or its condition
/// number exceeds kSingularConditionNumber.
GdopResult gdop(const GeometryMatrix& h);

/// Eigenvalues of a symmetric 4x4 matrix, ascending.
std::array<double, 4> symmetric_eigenvalues(std::array<std::array<double, 4>, 4> a);

}  // namespace soop
