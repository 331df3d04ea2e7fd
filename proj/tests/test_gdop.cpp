#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "soop/constants.hpp"
#include "soop/gdop.hpp"
#include "soop/orbits.hpp"
#include "test_util.hpp"

using namespace soop;

namespace {

const double kLat = 45.409, kLon = 11.894;

// Satellite at the given elevation/azimuth and range from the reference site.
Vec3 sat_at(double el_deg, double az_deg, double range_m = 1e6) {
    const Vec3 site = orbits::geodetic_to_ecef(kLat, kLon, 0.0);
    const orbits::EnuBasis b = orbits::enu_basis(kLat, kLon);
    const double el = el_deg * kDegToRad, az = az_deg * kDegToRad;
    const Vec3 dir = (std::cos(el) * std::sin(az)) * b.east + (std::cos(el) * std::cos(az)) * b.north +
                     std::sin(el) * b.up;
    return site + range_m * dir;
}

double oracle_gdop(const GeometryMatrix& h) {
    Eigen::MatrixXd m(h.size(), 4);
    for (std::size_t i = 0; i < h.size(); ++i)
        for (int j = 0; j < 4; ++j) m(static_cast<Eigen::Index>(i), j) = h.rows[i][static_cast<std::size_t>(j)];
    const Eigen::MatrixXd pinv = m.completeOrthogonalDecomposition().pseudoInverse();
    return std::sqrt((pinv * pinv.transpose()).trace());
}

std::vector<Vec3> random_sky(std::mt19937_64& rng, int k) {
    std::uniform_real_distribution<double> el(5.0, 90.0), az(0.0, 360.0), rng_m(5e5, 3e6);
    std::vector<Vec3> sats;
    for (int i = 0; i < k; ++i) sats.push_back(sat_at(el(rng), az(rng), rng_m(rng)));
    return sats;
}

}  // namespace

TEST_CASE("geometry matrix rows") {
    const Vec3 site = orbits::geodetic_to_ecef(kLat, kLon, 0.0);
    const std::vector<Vec3> zen = {sat_at(90.0, 0.0)};
    const GeometryMatrix h = geometry_matrix(site, zen);
    REQUIRE(h.size() == 1);
    CHECK(std::abs(h.rows[0][0]) < 1e-12);
    CHECK(std::abs(h.rows[0][1]) < 1e-12);
    CHECK(h.rows[0][2] == doctest::Approx(-1.0));
    CHECK(h.rows[0][3] == 1.0);

    std::mt19937_64 rng(1);
    const auto sats = random_sky(rng, 20);
    const GeometryMatrix a = geometry_matrix(site, sats);
    std::vector<Vec3> far;
    for (const Vec3& s : sats) far.push_back(site + 3.7 * (s - site));
    const GeometryMatrix b = geometry_matrix(site, far);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& r = a.rows[i];
        CHECK(std::abs(std::sqrt(r[0] * r[0] + r[1] * r[1] + r[2] * r[2]) - 1.0) <= 1e-12);
        for (int j = 0; j < 4; ++j) CHECK(std::abs(r[j] - b.rows[i][j]) < 1e-12);
    }
    CHECK_THROWS_AS(geometry_matrix(site, std::vector<Vec3>{}), std::invalid_argument);
    CHECK_THROWS_AS(geometry_matrix(site, std::vector<Vec3>{site}), std::invalid_argument);
}

TEST_CASE("tetrahedral geometry") {
    const Vec3 site = orbits::geodetic_to_ecef(kLat, kLon, 0.0);
    const std::vector<Vec3> sats = {sat_at(90.0, 0.0), sat_at(0.0, 0.0), sat_at(0.0, 120.0), sat_at(0.0, 240.0)};
    const GdopResult r = gdop(geometry_matrix(site, sats));
    // H^T H = diag(3/2, 3/2) (+) [[1, -1], [-1, 4]]; the inverse traces are
    // 4/3 and 5/3, so GDOP = sqrt(3).
    CHECK(std::abs(r.gdop - std::sqrt(3.0)) <= 1e-9);
    CHECK(r.condition_number > 1.0);
}

TEST_CASE("degenerate geometry") {
    const Vec3 site = orbits::geodetic_to_ecef(kLat, kLon, 0.0);
    const std::vector<Vec3> zen(4, sat_at(90.0, 0.0));
    CHECK_THROWS_AS(gdop(geometry_matrix(site, zen)), SingularGeometry);
    const std::vector<Vec3> three = {sat_at(90.0, 0.0), sat_at(30.0, 0.0), sat_at(30.0, 120.0)};
    CHECK_THROWS_AS(gdop(geometry_matrix(site, three)), std::invalid_argument);
}

TEST_CASE("matches dense pseudo-inverse") {
    const Vec3 site = orbits::geodetic_to_ecef(kLat, kLon, 0.0);
    std::mt19937_64 rng(42);
    std::uniform_int_distribution<int> k(4, 40);
    for (int i = 0; i < 300; ++i) {
        const GeometryMatrix h = geometry_matrix(site, random_sky(rng, k(rng)));
        CHECK(rel_close(gdop(h).gdop, oracle_gdop(h), 1e-9));
    }
}

TEST_CASE("augmentation never increases gdop") {
    const Vec3 site = orbits::geodetic_to_ecef(kLat, kLon, 0.0);
    std::mt19937_64 rng(8);
    for (int i = 0; i < 300; ++i) {
        auto sats = random_sky(rng, 4 + i % 10);
        const double before = gdop(geometry_matrix(site, sats)).gdop;
        sats.push_back(random_sky(rng, 1)[0]);
        CHECK(gdop(geometry_matrix(site, sats)).gdop <= before * (1.0 + 1e-12));
    }
}

TEST_CASE("rotation invariance") {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        GeometryMatrix h;
        for (int k = 0; k < 8; ++k) {
            const Vec3 u = normalized(Vec3{n(rng), n(rng), std::abs(n(rng))});
            h.rows.push_back({-u[0], -u[1], -u[2], 1.0});
        }
        const Eigen::Matrix3d q = Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)).normalized().toRotationMatrix();
        GeometryMatrix rot = h;
        for (auto& r : rot.rows) {
            const Eigen::Vector3d v = q * Eigen::Vector3d(r[0], r[1], r[2]);
            r = {v[0], v[1], v[2], 1.0};
        }
        CHECK(rel_close(gdop(h).gdop, gdop(rot).gdop, 1e-9));
    }
}

TEST_CASE("symmetric eigenvalues") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        Eigen::Matrix4d m;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) m(r, c) = n(rng);
        m = (m + m.transpose()).eval();
        std::array<std::array<double, 4>, 4> a{};
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) a[r][c] = m(r, c);
        const auto ev = symmetric_eigenvalues(a);
        const Eigen::Vector4d ref = Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d>(m).eigenvalues();
        for (int k = 0; k < 4; ++k) CHECK(std::abs(ev[k] - ref[k]) < 1e-12 * (1.0 + ref.cwiseAbs().maxCoeff()));
    }
}
