#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "soop/constants.hpp"
#include "soop/signal_catalog.hpp"
#include "test_util.hpp"

using namespace soop;

TEST_CASE("catalog entries") {
    const SignalSpec starlink = catalog_get(SystemId::Starlink);
    CHECK(starlink.carrier_frequency_hz == 11.57e9);
    CHECK(starlink.channel_bandwidth_hz == 240e6);
    CHECK(starlink.altitude_m == 550e3);
    CHECK(starlink.beacon_length_s == 1.33e-3);
    REQUIRE(starlink.ofdm);
    CHECK(starlink.ofdm->subcarrier_count == 1024);
    CHECK(starlink.ofdm->symbol_period_s == 4.4e-6);
    CHECK(starlink.ofdm->chip_period_s == 4.167e-9);
    CHECK(starlink.ofdm->subcarrier_spacing_hz == 234375.0);
    CHECK_FALSE(starlink.rolloff);

    const SignalSpec orbcomm = catalog_get(SystemId::Orbcomm);
    CHECK(orbcomm.channel_bandwidth_hz == 4.8e3);
    CHECK(orbcomm.carrier_frequency_hz == 137.5e6);
    CHECK(orbcomm.altitude_m == 750e3);

    const SignalSpec iridium = catalog_get(SystemId::Iridium);
    CHECK(iridium.symbol_period_s == 40e-6);
    REQUIRE(iridium.rolloff);
    CHECK(*iridium.rolloff == 0.40);
    CHECK(iridium.carrier_frequency_hz == 1.621e9);

    CHECK(catalog_get(SystemId::OneWeb).modulation == Modulation::FlatSpectrum);
    for (SystemId id : kAllSystems) CHECK_NOTHROW(catalog_get(id).validate());
}

TEST_CASE("system names") {
    CHECK(parse_system("starlink") == SystemId::Starlink);
    CHECK(parse_system("ONEWEB") == SystemId::OneWeb);
    CHECK_FALSE(parse_system("globalstar"));
    for (SystemId id : kAllSystems) CHECK(parse_system(to_string(id)) == id);
}

TEST_CASE("spec invariants") {
    SignalSpec s = catalog_get(SystemId::Iridium);
    s.rolloff.reset();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    s = catalog_get(SystemId::Starlink);
    s.ofdm.reset();
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    CHECK_THROWS_AS(psd_model(s), std::invalid_argument);

    s = catalog_get(SystemId::Orbcomm);
    s.carrier_frequency_hz = 0.0;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);

    OfdmSpec o = OfdmSpec::starlink();
    o.subcarrier_count = 1023;
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
    o = OfdmSpec::starlink();
    o.symbol_period_s = 4.0e-6;  // shorter than 1/F
    CHECK_THROWS_AS(o.validate(), std::invalid_argument);
}

TEST_CASE("flat spectrum support") {
    const SpectrumModel m = flat_spectrum(4.8e3);
    CHECK(m(0.0) > 0.0);
    CHECK(m(0.0) == m(2e3));
    CHECK(m(3e3) == 0.0);
    CHECK_THROWS_AS(flat_spectrum(0.0), std::invalid_argument);
}

TEST_CASE("raised cosine support edge") {
    const SpectrumModel m = raised_cosine_spectrum(40e-6, 0.4);
    const double edge = 1.4 / (2.0 * 40e-6);
    CHECK(edge == doctest::Approx(17.5e3));
    CHECK(m(0.0) == 1.0);
    CHECK(m(edge * 1.0001) == 0.0);
    CHECK(m(-edge * 1.0001) == 0.0);
    CHECK(m(edge * 0.99) > 0.0);
    CHECK(m(0.6 / (2.0 * 40e-6)) == doctest::Approx(1.0));
    // Half-amplitude point at 1/(2T).
    CHECK(raised_cosine(1.0 / (2.0 * 40e-6), 40e-6, 0.4) == doctest::Approx(0.5));
}

TEST_CASE("trapezoid sub-pulse spectrum") {
    const double tsym = 4.4e-6, tc = 4.167e-9;
    CHECK(rel_close(trapezoid_subpulse_psd(0.0, tsym, tc), tsym * tsym, 1e-15));
    // Independent form: [sin(pi f Tsym) sin(pi f Tc) / (pi^2 f^2 Tc)]^2.
    for (double f : {1.0e3, 1.7e5, 2.3e6, 9.9e7, 4.1e8}) {
        const double g = std::sin(kPi * f * tsym) * std::sin(kPi * f * tc) / (kPi * kPi * f * f * tc);
        CHECK(rel_close(trapezoid_subpulse_psd(f, tsym, tc), g * g, 1e-9));
        CHECK(trapezoid_subpulse_psd(-f, tsym, tc) == trapezoid_subpulse_psd(f, tsym, tc));
    }
}

TEST_CASE("ofdm model equals direct subcarrier sum") {
    const OfdmSpec o = OfdmSpec::starlink();
    const SpectrumModel m = ofdm_spectrum(o);
    for (double f : {0.0, 1.0e3, 117187.5, 3.3e7, -1.19e8, 1.2e8, 1.5e8, -6.0e8}) {
        double direct = 0.0;
        for (int i = -o.subcarrier_count / 2 + 1; i <= o.subcarrier_count / 2; ++i)
            direct += trapezoid_subpulse_psd(f - i * o.subcarrier_spacing_hz, o.symbol_period_s, o.chip_period_s);
        CHECK(rel_close(m(f), direct, 1e-9));
    }
}

TEST_CASE("evenness of built-in models") {
    for (SystemId id : kAllSystems) {
        const SignalSpec spec = catalog_get(id);
        const SpectrumModel m = psd_model(spec);
        CHECK(std::isfinite(m(0.0)));
        // Subcarriers run from -N/2+1 to N/2, so the OFDM comb is symmetric
        // about F/2 rather than about zero.
        const double centre = spec.ofdm ? spec.ofdm->subcarrier_spacing_hz / 2.0 : 0.0;
        const double span = m.occupied_hi - m.occupied_lo;
        for (int k = 0; k <= 40; ++k) {
            const double df = span * 0.6 * k / 40.0;
            const double a = m(centre + df), b = m(centre - df);
            CHECK(a >= 0.0);
            CHECK(rel_close(a, b, 1e-9));
        }
    }
}

TEST_CASE("ofdm occupied support") {
    const OfdmSpec o = OfdmSpec::starlink();
    const SpectrumModel m = ofdm_spectrum(o);
    const double nf = o.subcarrier_count * o.subcarrier_spacing_hz;
    CHECK(std::abs((m.occupied_hi - m.occupied_lo) - nf) <= o.subcarrier_spacing_hz);
    CHECK(o.occupied_bandwidth_hz() == doctest::Approx(240e6));
    CHECK(m.tail);
    CHECK(m.tail->power > 3.0);
}

TEST_CASE("tone grid") {
    const auto tones = starlink_tone_grid(5);
    REQUIRE(tones.size() == 5);
    CHECK(tones[2] == 11.325e9);
    CHECK(tones[1] - tones[0] == doctest::Approx(44e3));
    CHECK(starlink_tone_grid(0).empty());
}
