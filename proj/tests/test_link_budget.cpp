#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "soop/link_budget.hpp"
#include "test_util.hpp"

using namespace soop;

TEST_CASE("reference path losses") {
    CHECK(std::abs(fspl_db(550e3, 11.57e9) - 168.5) <= 0.05);
    CHECK(std::abs(fspl_db(1200e3, 11.075e9) - 174.9) <= 0.05);
    CHECK(std::abs(fspl_db(780e3, 1.621e9) - 154.5) <= 0.05);
    CHECK(std::abs(fspl_db(750e3, 137.5e6) - 132.7) <= 0.05);
}

TEST_CASE("inverse square law") {
    for (double d : {1.0, 550e3, 3.6e7})
        for (double f : {1e6, 11.57e9}) {
            CHECK(std::abs(fspl_db(2 * d, f) - fspl_db(d, f) - 20 * std::log10(2.0)) < 1e-9);
            CHECK(std::abs(fspl_db(d, 2 * f) - fspl_db(d, f) - 6.0206) < 1e-4);
        }
    CHECK(fspl_db(550e3, 11.57e9, LightSpeed::Exact) > fspl_db(550e3, 11.57e9));
    CHECK_THROWS_AS(fspl_db(0.0, 1e9), std::invalid_argument);
    CHECK_THROWS_AS(fspl_db(1.0, -1e9), std::invalid_argument);
}

TEST_CASE("default budgets reproduce reference maxima") {
    const double expected[] = {109.3, 105.53, 80.6, 79.6};
    for (std::size_t i = 0; i < kAllSystems.size(); ++i) {
        const SystemId id = kAllSystems[i];
        CHECK(reference_cn0_max_dbhz(id) == expected[i]);
        const LinkBudgetSpec s = default_link_budget(id);
        CHECK(s.slant_range_m == catalog_get(id).altitude_m);
        CHECK(s.g_over_t_dbk == 0.0);
        CHECK(std::abs(cn0_max_dbhz(s) - expected[i]) <= 0.1);
    }
    CHECK(std::abs(default_link_budget(SystemId::Starlink).eirp_dbw - 49.2) < 0.05);
    CHECK(literature_cn0_dbhz(SystemId::Starlink) == 42.6);
    CHECK(literature_cn0_dbhz(SystemId::OneWeb) == 31.9);
    CHECK_FALSE(literature_cn0_dbhz(SystemId::Iridium));
}

TEST_CASE("balanced budget and unit slopes") {
    LinkBudgetSpec s;
    s.slant_range_m = 1000e3;
    s.carrier_hz = 2e9;
    s.eirp_dbw = fspl_db(s.slant_range_m, s.carrier_hz) + s.boltzmann_dbwkhz;
    CHECK(std::abs(cn0_max_dbhz(s)) < 1e-9);
    const double base = cn0_max_dbhz(s);
    s.eirp_dbw += 3.0;
    CHECK(cn0_max_dbhz(s) - base == doctest::Approx(3.0));
    s.g_over_t_dbk -= 7.5;
    CHECK(cn0_max_dbhz(s) - base == doctest::Approx(-4.5));
    s.slant_range_m = 0.0;
    CHECK_THROWS_AS(cn0_max_dbhz(s), std::invalid_argument);
}

TEST_CASE("slant range") {
    CHECK(slant_range_m(550e3, 90.0) == doctest::Approx(550e3));
    CHECK(slant_range_m(550e3, 10.0) > 550e3);
    CHECK(slant_range_m(550e3, 0.0) == doctest::Approx(std::sqrt(std::pow(6371e3 + 550e3, 2) - std::pow(6371e3, 2))));
    CHECK_THROWS_AS(slant_range_m(550e3, -1.0), std::invalid_argument);
}
