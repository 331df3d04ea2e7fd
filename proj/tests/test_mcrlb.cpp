#include <doctest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cmath>
#include <random>
#include <stdexcept>

#include "soop/mcrlb.hpp"
#include "test_util.hpp"

using namespace soop;
using Big = boost::multiprecision::cpp_dec_float_50;

namespace {

const Big kBigPi = boost::math::constants::pi<Big>();

Big big_cn0(double dbhz) { return boost::multiprecision::pow(Big(10), Big(dbhz) / 10); }

// Closed form with the sub-pulse term rewritten as 1 / (2 pi^2 T_C (3 T_sym - T_C) / 3).
double oracle_closed_form(const OfdmSpec& o) {
    const Big t(o.symbol_period_s), tc(o.chip_period_s), f(o.subcarrier_spacing_hz), n(o.subcarrier_count);
    const Big sub = Big(3) / (Big(2) * kBigPi * kBigPi * tc * (Big(3) * t - tc));
    return static_cast<double>(t * t * (sub + f * f * (n * n + 2) / 12));
}

}  // namespace

TEST_CASE("cn0 density") {
    CHECK(CnDensity::from_dbhz(60.0).linear() == doctest::Approx(1e6));
    CHECK(CnDensity::from_dbhz(0.0).linear() == 1.0);
    CHECK(CnDensity::from_dbhz(-10.0).linear() > 0.0);
    CHECK_THROWS_AS(CnDensity::from_dbhz(std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(CnDensity::from_dbhz(INFINITY), std::invalid_argument);
}

TEST_CASE("flat spectrum nmsb is 1/12") {
    for (double b : {4.8e3, 250e6}) {
        const double xi = nmsb_numeric(flat_spectrum(b), 1.0 / b);
        CHECK(rel_close(xi, 1.0 / 12.0, 1e-12));
    }
}

TEST_CASE("narrow bump has vanishing nmsb") {
    double prev = INFINITY;
    for (double width : {1e3, 1e2, 1e1, 1.0}) {
        SpectrumModel m;
        m.evaluator = [width](double f) { return std::exp(-0.5 * (f / width) * (f / width)); };
        m.support_lo = -12 * width;
        m.support_hi = 12 * width;
        const double xi = nmsb_numeric(m, 1e-6);
        CHECK(xi < prev);
        prev = xi;
    }
    CHECK(prev < 1e-11);
}

TEST_CASE("nmsb is scale invariant") {
    const SpectrumModel base = raised_cosine_spectrum(40e-6, 0.4);
    const double xi = nmsb_numeric(base, 40e-6);
    for (double k : {1e-9, 3.7, 1e12}) {
        SpectrumModel scaled = base;
        scaled.evaluator = [k, e = base.evaluator](double f) { return k * e(f); };
        CHECK(rel_close(nmsb_numeric(scaled, 40e-6), xi, 1e-12));
    }
}

TEST_CASE("raised cosine nmsb matches hand integral") {
    // |G|^2 of a raised cosine; the f^2 moment over the roll-off band is
    // integrated independently with a fine midpoint sum in long double.
    const double t = 40e-6, r = 0.4;
    long double m0 = 0, m2 = 0;
    const int n = 400000;
    const double edge = (1 + r) / (2 * t);
    const long double h = 2.0L * edge / n;
    for (int i = 0; i < n; ++i) {
        const long double f = -edge + (i + 0.5L) * h;
        const long double g = raised_cosine(static_cast<double>(f), t, r);
        m0 += g * g * h;
        m2 += f * f * g * g * h;
    }
    CHECK(rel_close(nmsb_numeric(raised_cosine_spectrum(t, r), t), static_cast<double>(t * t * m2 / m0), 1e-8));
}

TEST_CASE("degenerate spectra") {
    SpectrumModel zero;
    zero.evaluator = [](double) { return 0.0; };
    zero.support_lo = -1.0;
    zero.support_hi = 1.0;
    CHECK_THROWS_AS(nmsb_numeric(zero, 1.0), DegenerateSpectrum);
    SpectrumModel empty = zero;
    empty.support_hi = -1.0;
    CHECK_THROWS_AS(nmsb_numeric(empty, 1.0), DegenerateSpectrum);
    SpectrumModel slow = flat_spectrum(1.0);
    slow.tail = SpectrumTail{1.0, 2.0};
    CHECK_THROWS_AS(nmsb_numeric(slow, 1.0), DegenerateSpectrum);
    CHECK_THROWS_AS(nmsb_numeric(flat_spectrum(1.0), 0.0), std::invalid_argument);
}

TEST_CASE("ofdm closed form") {
    const OfdmSpec s = OfdmSpec::starlink();
    const double xi = nmsb_ofdm_closed_form(s);
    CHECK(rel_close(xi, oracle_closed_form(s), 1e-13));
    CHECK(rel_close(xi, 92981.687443789, 1e-11));  // regression constant

    OfdmSpec doubled = s;
    doubled.subcarrier_count *= 2;
    CHECK(nmsb_ofdm_closed_form(doubled) > xi);

    // N = 2: the spread term is T^2 F^2 (4/12 + 1/6) = T^2 F^2 / 2.
    for (double f : {1e3, 1e-3}) {
        const OfdmSpec two{2, 2.0 / f, 0.1 / f, f};
        const double t = two.symbol_period_s, tc = two.chip_period_s;
        const double sub = t * t * (2.0 / tc) / (4.0 * kPi * kPi) / (t - tc / 3.0);
        CHECK(rel_close(nmsb_ofdm_closed_form(two) - sub, 0.5 * t * t * f * f, 1e-12));
    }
}

TEST_CASE("ofdm closed form agrees with quadrature for small specs") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> half_n(2, 16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 4; ++k) {
        OfdmSpec o;
        o.subcarrier_count = 2 * half_n(rng);
        o.subcarrier_spacing_hz = 1e4 * (1.0 + u(rng));
        o.symbol_period_s = (1.0 + 0.3 * u(rng)) / o.subcarrier_spacing_hz;
        o.chip_period_s = 1.0 / (o.subcarrier_count * o.subcarrier_spacing_hz);
        const double numeric = nmsb_numeric(ofdm_spectrum(o), o.symbol_period_s);
        CHECK(rel_close(numeric, nmsb_ofdm_closed_form(o), 1e-6));
    }
}

TEST_CASE("nmsb for catalog entries") {
    CHECK(rel_close(nmsb_for(catalog_get(SystemId::OneWeb)), 1.0 / 12.0, 1e-10));
    const double iridium = nmsb_for(catalog_get(SystemId::Iridium));
    CHECK(rel_close(iridium, nmsb_for(catalog_get(SystemId::Orbcomm)), 1e-9));
    CHECK(iridium > 0.0);
    CHECK(iridium < 1.0 / 12.0);  // roll-off narrows the squared shape below a flat 1/T band
}

TEST_CASE("delay bound") {
    // Flat 240 MHz band: xi / T^2 = B^2 / 12.
    const double b = 240e6, t0 = 1.33e-3;
    const BoundResult r = mcrlb_delay(1.0 / 12.0, 1.0 / b, t0, CnDensity::from_dbhz(60.0));
    CHECK(rel_close(r.variance, 1.0 / (8.0 * kPi * kPi * (b * b / 12.0) * t0 * 1e6), 1e-12));
    CHECK(r.variance == doctest::Approx(1.98e-21).scale(0).epsilon(0.01));
    REQUIRE(r.std_range_m);
    CHECK(*r.std_range_m == doctest::Approx(0.0133).epsilon(0.01));
    CHECK(*r.std_range_m / r.std_native == 3e8);
    CHECK(rel_close(mcrlb_delay(1.0 / 12.0, 1.0 / b, t0, CnDensity::from_dbhz(60.0), LightSpeed::Exact)
                            .std_range_m.value() /
                        r.std_native,
                    299792458.0, 1e-15));

    const BoundResult doubled = mcrlb_delay(1.0 / 12.0, 1.0 / b, t0, CnDensity::from_dbhz(60.0 + 10 * std::log10(2.0)));
    CHECK(rel_close(doubled.variance, r.variance / 2.0, 1e-12));
    CHECK(rel_close(mcrlb_delay(1.0 / 12.0, 1.0 / b, 10 * t0, CnDensity::from_dbhz(60.0)).variance, r.variance / 10.0,
                    1e-12));
    CHECK_THROWS_AS(mcrlb_delay(0.0, 1.0, 1.0, CnDensity::from_dbhz(0.0)), std::invalid_argument);
    CHECK_THROWS_AS(mcrlb_delay(1.0, 1.0, 0.0, CnDensity::from_dbhz(0.0)), std::invalid_argument);
}

TEST_CASE("phase and frequency bounds") {
    const BoundResult p = mcrlb_phase(1.33e-3, CnDensity::from_dbhz(60.0));
    CHECK(p.variance == doctest::Approx(3.759e-4).scale(0).epsilon(1e-3));
    CHECK(p.std_native == doctest::Approx(0.0194).epsilon(0.01));
    CHECK(mcrlb_phase(1.0, CnDensity::from_dbhz(0.0)).variance == 0.5);
    CHECK(mcrlb_phase(1.0, CnDensity::from_dbhz(300.0)).variance < 1e-30);
    CHECK_THROWS_AS(mcrlb_phase(-1.0, CnDensity::from_dbhz(0.0)), std::invalid_argument);

    const BoundResult f = mcrlb_freq(1.33e-3, CnDensity::from_dbhz(60.0), 11.57e9);
    CHECK(f.variance == doctest::Approx(64.6).epsilon(1e-3));
    CHECK(f.std_native == doctest::Approx(8.0).epsilon(0.01));
    REQUIRE(f.std_rangerate_mps);
    CHECK(*f.std_rangerate_mps == doctest::Approx(0.21).epsilon(0.02));
    CHECK(rel_close(mcrlb_freq(2.66e-3, CnDensity::from_dbhz(60.0)).variance, f.variance / 8.0, 1e-12));
    CHECK_FALSE(mcrlb_freq(1.0, CnDensity::from_dbhz(0.0)).std_rangerate_mps);
    CHECK_THROWS_AS(mcrlb_freq(0.0, CnDensity::from_dbhz(0.0)), std::invalid_argument);
}

TEST_CASE("angle of arrival bound") {
    const ArrayGeometry a = ArrayGeometry::from_length(2, 0.5);
    CHECK(a.spacing_m == 0.5);
    const double beta = 50.0 * kDegToRad;
    const BoundResult r = mcrlb_aoa(a, 11.57e9, beta, 5e-3, CnDensity::from_dbhz(40.0));
    CHECK(std::isfinite(r.variance));
    CHECK(r.variance > 0.0);
    const double aperture = 0.5 * 11.57e9 / 3e8;
    const double expected =
        12.0 / (4.0 * kPi * kPi * 2.0 * 1e4 * 5e-3 * 3.0 * aperture * aperture * std::pow(std::sin(beta), 2));
    CHECK(rel_close(r.variance, expected, 1e-13));
    CHECK(r.variance == doctest::Approx(4.6433e-6).scale(0).epsilon(1e-4));

    double best = INFINITY, best_beta = 0.0;
    for (int d = 1; d < 180; ++d) {
        const double v = mcrlb_aoa(a, 11.57e9, d * kDegToRad, 5e-3, CnDensity::from_dbhz(40.0)).variance;
        if (v < best) best = v, best_beta = d;
    }
    CHECK(best_beta == 90.0);
    CHECK_THROWS_AS(mcrlb_aoa(a, 11.57e9, 0.0, 5e-3, CnDensity::from_dbhz(40.0)), EndfireSingularity);
    CHECK_THROWS_AS(mcrlb_aoa(a, 11.57e9, kPi, 5e-3, CnDensity::from_dbhz(40.0)), EndfireSingularity);
    CHECK_THROWS_AS(mcrlb_aoa(a, 11.57e9, 1e-200, 5e-3, CnDensity::from_dbhz(40.0)), EndfireSingularity);
    CHECK_THROWS_AS(ArrayGeometry::from_length(1, 0.5), std::invalid_argument);
    CHECK_THROWS_AS((ArrayGeometry{3, 1.0, 0.4}.validate()), std::invalid_argument);
    CHECK(ArrayGeometry::from_spacing(5, 0.25).length_m == 1.0);
}

TEST_CASE("random oracle grid and scaling laws") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double cn0 = 20.0 + 70.0 * u(rng);
        const double t0 = std::pow(10.0, -5.0 + 4.0 * u(rng));
        const double xi = std::pow(10.0, -2.0 + 7.0 * u(rng));
        const double t = std::pow(10.0, -9.0 + 6.0 * u(rng));
        const CnDensity c = CnDensity::from_dbhz(cn0);
        const Big lin = big_cn0(cn0);

        const Big dv = Big(t) * Big(t) / (8 * kBigPi * kBigPi * Big(xi) * Big(t0) * lin);
        CHECK(rel_close(mcrlb_delay(xi, t, t0, c).variance, static_cast<double>(dv), 1e-12));
        const Big pv = 1 / (2 * Big(t0) * lin);
        CHECK(rel_close(mcrlb_phase(t0, c).variance, static_cast<double>(pv), 1e-12));
        const Big fv = 3 / (2 * kBigPi * kBigPi * Big(t0) * Big(t0) * Big(t0) * lin);
        CHECK(rel_close(mcrlb_freq(t0, c).variance, static_cast<double>(fv), 1e-12));

        const double k = 1.0 + 9.0 * u(rng);
        const double v = mcrlb_delay(xi, t, t0, c).variance;
        CHECK(rel_close(mcrlb_delay(k * xi, t, t0, c).variance, v / k, 1e-12));
        CHECK(rel_close(mcrlb_freq(k * t0, c).variance, mcrlb_freq(t0, c).variance / (k * k * k), 1e-12));
        CHECK(mcrlb_phase(t0, CnDensity::from_dbhz(cn0 + 0.1)).variance < mcrlb_phase(t0, c).variance);
        CHECK(mcrlb_freq(t0 * 1.01, c).variance < mcrlb_freq(t0, c).variance);
    }
}

TEST_CASE("position accuracy") {
    CHECK(position_accuracy(1.0, 2.38) == 2.38);
    CHECK(position_accuracy(0.0, 17.0) == 0.0);
    CHECK(position_accuracy(3.0, 0.482) == doctest::Approx(1.446));
    CHECK_THROWS_AS(position_accuracy(-1.0, 1.0), std::invalid_argument);
}
