#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "soop/constants.hpp"
#include "soop/orbits.hpp"
#include "test_util.hpp"

using namespace soop;
using namespace soop::orbits;

namespace {

OrbitalElements circular(double altitude_km, double inclination_deg, double bstar = 0.0) {
    OrbitalElements e;
    e.satellite_id = 1;
    e.epoch = parse_rfc3339("2024-04-19T00:00:00Z");
    const double a = 6378.135 + altitude_km;
    e.mean_motion_revday = std::sqrt(398600.8 / (a * a * a)) * 86400.0 / (2.0 * kPi);
    e.eccentricity = 0.0;
    e.inclination_deg = inclination_deg;
    e.bstar = bstar;
    return e;
}

Vec3 rotate(const Vec3& v, const Vec3& axis, double angle) {
    const Vec3 k = normalized(axis);
    const double c = std::cos(angle), s = std::sin(angle);
    return c * v + s * cross(k, v) + ((1.0 - c) * dot(k, v)) * k;
}

}  // namespace

TEST_CASE("propagation basics") {
    const OrbitalElements e = circular(550.0, 0.0);
    const Propagator p(e);
    const SatelliteState s0 = p.propagate_minutes(0.0);
    const double r = norm(s0.position_eci_m);
    CHECK(r > 6.6e6);
    CHECK(r < 5e7);
    CHECK(std::abs(s0.position_eci_m[2]) < 1.0);

    // One period later an equatorial circular orbit is back where it started,
    // up to the secular J2 drift SGP4 applies to the argument of latitude.
    const double period_min = 1440.0 / e.mean_motion_revday;
    const SatelliteState s1 = p.propagate_minutes(period_min);
    CHECK(norm(s1.position_eci_m - s0.position_eci_m) < 0.02 * r);

    const SatelliteState a = propagate(e, add_seconds(e.epoch, 1234.5));
    const SatelliteState b = propagate(e, add_seconds(e.epoch, 1234.5));
    CHECK(a.position_eci_m == b.position_eci_m);
    CHECK(a.velocity_eci_mps == b.velocity_eci_mps);
    CHECK_FALSE(a.stale);
    CHECK(propagate(e, add_seconds(e.epoch, 15 * 86400.0)).stale);
    CHECK_FALSE(propagate(e, add_seconds(e.epoch, 15 * 86400.0), PropagationOptions{30.0}).stale);
}

TEST_CASE("decay is reported") {
    // Very low orbit with heavy drag decays within days.
    const Propagator p(circular(150.0, 51.6, 0.5));
    CHECK_THROWS_AS(p.propagate_minutes(14 * 1440.0), DecayedOrbit);
}

TEST_CASE("teme to ecef") {
    const UtcTime t = parse_rfc3339("2024-04-19T06:00:00Z");
    const double g = gmst_rad(t);
    CHECK(g >= 0.0);
    CHECK(g < 2 * kPi);
    CHECK(teme_to_ecef({0.0, 0.0, 7e6}, g) == Vec3{0.0, 0.0, 7e6});
    CHECK(teme_to_ecef({7e6, 1e3, 2.0}, 0.0) == Vec3{7e6, 1e3, 2.0});
    // GMST at J2000.0 is 280.46061837 deg.
    CHECK(gmst_rad(parse_rfc3339("2000-01-01T12:00:00Z")) * kRadToDeg == doctest::Approx(280.46061837).epsilon(1e-9));
    std::mt19937_64 rng(3);
    std::normal_distribution<double> n(0.0, 7e6);
    for (int i = 0; i < 100; ++i) {
        const Vec3 v{n(rng), n(rng), n(rng)};
        CHECK(rel_close(norm(teme_to_ecef(v, g)), norm(v), 1e-14));
    }
}

TEST_CASE("geodetic conversions") {
    const Vec3 eq = geodetic_to_ecef(0.0, 0.0, 0.0);
    CHECK(eq[0] == kWgs84SemiMajorAxisM);
    const Vec3 pole = geodetic_to_ecef(90.0, 0.0, 0.0);
    CHECK(pole[2] == doctest::Approx(6356752.314245));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> lat(-89.9, 89.9), lon(-179.9, 179.9), alt(-400.0, 2e6);
    for (int i = 0; i < 200; ++i) {
        const double la = lat(rng), lo = lon(rng), h = alt(rng);
        const Geodetic g = ecef_to_geodetic(geodetic_to_ecef(la, lo, h));
        CHECK(g.latitude_deg == doctest::Approx(la).epsilon(1e-11));
        CHECK(g.longitude_deg == doctest::Approx(lo).epsilon(1e-11));
        CHECK(std::abs(g.altitude_m - h) < 1e-4);
    }
    GroundSite s{"x", 10.0, 190.0, 0.0};
    s.validate_and_normalize();
    CHECK(s.longitude_deg == doctest::Approx(-170.0));
    GroundSite w{"y", 0.0, -180.0, 0.0};
    w.validate_and_normalize();
    CHECK(w.longitude_deg == 180.0);
    GroundSite bad{"z", 91.0, 0.0, 0.0};
    CHECK_THROWS_AS(bad.validate_and_normalize(), std::invalid_argument);
}

TEST_CASE("look angles") {
    const GroundSite padova{"Padova", 45.409, 11.894, 0.0};
    const EnuBasis b = enu_basis(padova.latitude_deg, padova.longitude_deg);
    const Vec3 site = site_ecef(padova);

    const LookAngles zen = look_angles(padova, site + 550e3 * b.up);
    CHECK(zen.elevation_deg == doctest::Approx(90.0));
    CHECK(zen.slant_range_m == doctest::Approx(550e3));
    const LookAngles nadir = look_angles(padova, site - 1e6 * b.up);
    CHECK(nadir.elevation_deg == doctest::Approx(-90.0));

    const GroundSite origin{"o", 0.0, 0.0, 0.0};
    const LookAngles east = look_angles(origin, site_ecef(origin) + Vec3{0.0, 1e5, 0.0});
    CHECK(east.azimuth_deg == doctest::Approx(90.0));
    CHECK(east.elevation_deg == doctest::Approx(0.0).epsilon(1e-12));
    const LookAngles north = look_angles(origin, site_ecef(origin) + Vec3{0.0, 0.0, 1e5});
    CHECK(north.azimuth_deg == doctest::Approx(0.0).epsilon(1e-12));
    const LookAngles west = look_angles(origin, site_ecef(origin) + Vec3{0.0, -1e5, 0.0});
    CHECK(west.azimuth_deg == doctest::Approx(270.0));

    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 8e6);
    for (int i = 0; i < 100; ++i) {
        const Vec3 sat{n(rng), n(rng), n(rng)};
        const LookAngles la = look_angles(padova, sat);
        CHECK(rel_close(la.slant_range_m, norm(sat - site), 1e-6));
        CHECK(la.azimuth_deg >= 0.0);
        CHECK(la.azimuth_deg < 360.0);
    }
    CHECK_THROWS_AS(look_angles(padova, site), std::invalid_argument);
}

TEST_CASE("off-nadir angle") {
    const double re = 6371e3, h = 550e3;
    const Vec3 sat{re + h, 0.0, 0.0};
    CHECK(off_nadir_angle(sat, Vec3{re, 0.0, 0.0}) == doctest::Approx(0.0));
    // Tangent point on a sphere of radius re.
    const double central = std::acos(re / (re + h));
    const Vec3 horizon{re * std::cos(central), re * std::sin(central), 0.0};
    CHECK(off_nadir_angle(sat, horizon) == doctest::Approx(std::asin(re / (re + h)) * kRadToDeg).epsilon(1e-12));

    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const Vec3 axis{n(rng), n(rng), n(rng)};
        const double ang = n(rng);
        const Vec3 site{re * 0.8, re * 0.5, re * 0.2};
        CHECK(off_nadir_angle(rotate(sat, axis, ang), rotate(site, axis, ang)) ==
              doctest::Approx(off_nadir_angle(sat, site)).epsilon(1e-10));
    }
    CHECK_THROWS_AS(off_nadir_angle(Vec3{0.0, 0.0, 0.0}, Vec3{1.0, 0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(off_nadir_angle(sat, sat), std::invalid_argument);
}

TEST_CASE("visibility predicate") {
    CHECK(is_visible(45.0, 20.0, VisibilityRule{10.0, 90.0}));
    CHECK_FALSE(is_visible(35.0, 50.0, VisibilityRule{40.0, 60.0}));
    CHECK_FALSE(is_visible(50.0, 61.0, VisibilityRule{40.0, 60.0}));
    CHECK(is_visible(40.0, 60.0, VisibilityRule{40.0, 60.0}));

    CHECK_THROWS_AS((VisibilityRule{90.0, 10.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((VisibilityRule{-1.0, 10.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((VisibilityRule{10.0, 0.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((VisibilityRule{10.0, 91.0}.validate()), std::invalid_argument);

    // Tightening either threshold never adds a visible satellite.
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> el(-90.0, 90.0), off(0.0, 90.0), th(0.0, 89.0), ph(0.1, 90.0);
    for (int i = 0; i < 2000; ++i) {
        const double e = el(rng), o = off(rng);
        const VisibilityRule loose{th(rng), ph(rng)};
        VisibilityRule tight = loose;
        tight.masking_angle_deg = std::min(89.0, loose.masking_angle_deg + 5.0);
        tight.beamwidth_deg = std::max(0.1, loose.beamwidth_deg - 5.0);
        if (is_visible(e, o, tight)) CHECK(is_visible(e, o, loose));
    }
}

TEST_CASE("wide beam reduces to elevation check over a day of passes") {
    const GroundSite padova{"Padova", 45.409, 11.894, 0.0};
    const Vec3 site = site_ecef(padova);
    const VisibilityRule rule{10.0, 90.0};
    const UtcTime t0 = parse_rfc3339("2024-04-19T00:00:00Z");
    int checked = 0;
    for (double raan : {0.0, 90.0, 200.0}) {
        OrbitalElements e = circular(550.0, 53.0);
        e.raan_deg = raan;
        const Propagator p(e);
        for (int k = 0; k < 1440; k += 2) {
            const Vec3 sat = eci_to_ecef(p.propagate(add_seconds(t0, 60.0 * k)));
            const LookAngles la = look_angles(padova, sat);
            const double off = off_nadir_angle(sat, site);
            CHECK(is_visible(la.elevation_deg, off, rule) == (la.elevation_deg >= rule.masking_angle_deg));
            ++checked;
        }
    }
    CHECK(checked == 2160);
}
