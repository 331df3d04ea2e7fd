#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>

#include "soop/acquisition.hpp"

using namespace soop;
using namespace soop::acq;

namespace {

constexpr double kFs = 240e6;

double err_samples(double est_s, double true_s) { return (est_s - true_s) * kFs; }

// |sum r[n + tau] conj(s[n])| on a dense grid by direct band-limited
// interpolation of the delayed reference: the oracle for fractional delays.
double oracle_peak(const std::vector<Sample>& received, const std::vector<Sample>& reference, double lo, double hi) {
    double best = lo, best_mag = -1.0;
    for (double tau = lo; tau <= hi; tau += 0.005) {
        ChannelParams p;
        p.delay_s = tau / kFs;
        p.cn0 = CnDensity::from_dbhz(400.0);
        p.max_delay_s = 1.0;
        const auto shifted = apply_channel(reference, p);
        Sample acc{0.0, 0.0};
        for (std::size_t n = 0; n < reference.size() + 40 && n < received.size(); ++n)
            acc += received[n] * std::conj(n < shifted.size() ? shifted[n] : Sample{0.0, 0.0});
        if (std::abs(acc) > best_mag) best_mag = std::abs(acc), best = tau;
    }
    return best;
}

}  // namespace

TEST_CASE("sync symbols") {
    const OfdmSpec o = OfdmSpec::starlink();
    const auto a = generate_sync_symbols(o, 1, kFs);
    CHECK(a.size() == sample_count(8.8e-6, kFs));
    CHECK(a.size() == 2112);
    CHECK(a == generate_sync_symbols(o, 1, kFs));
    CHECK(a != generate_sync_symbols(o, 2, kFs));
    CHECK(std::isfinite(mean_power(a)));
    CHECK(mean_power(a) > 0.0);
    // Cyclic prefix: the first 32 samples of each symbol repeat its last 32.
    for (std::size_t s = 0; s < 2; ++s)
        for (std::size_t k = 0; k < 32; ++k) CHECK(std::abs(a[s * 1056 + k] - a[s * 1056 + 1024 + k]) < 1e-12);
    // Zero mean over a symbol (empty DC bin).
    const Sample m = std::accumulate(a.begin() + 32, a.begin() + 1056, Sample{0.0, 0.0});
    CHECK(std::abs(m) < 1e-9);
    CHECK_THROWS_AS(generate_sync_symbols(o, 1, 250e6), std::invalid_argument);
    CHECK_THROWS_AS(generate_sync_symbols(o, 1, kFs, 0), std::invalid_argument);
}

TEST_CASE("frame") {
    const OfdmSpec o = OfdmSpec::starlink();
    const auto f = generate_frame(o, 5, kFs);
    CHECK(f.size() == sample_count(1.33e-3, kFs));
    const std::size_t silence = sample_count(5.33e-6, kFs);
    for (std::size_t k = f.size() - silence; k < f.size(); ++k) CHECK(f[k] == Sample{0.0, 0.0});
    const auto sync = generate_sync_symbols(o, 5, kFs);
    CHECK(std::equal(sync.begin(), sync.end(), f.begin()));
    CHECK(std::abs(f[f.size() - silence - 2000]) > 0.0);
}

TEST_CASE("channel") {
    const auto s = generate_sync_symbols(OfdmSpec::starlink(), 3, kFs);
    std::vector<Sample> x(s);
    x.resize(8000);

    ChannelParams p;
    p.cn0 = CnDensity::from_dbhz(200.0);
    p.delay_s = 17.0 / kFs;
    p.carrier_power = 0.0;
    const auto y = apply_channel(x, p);
    REQUIRE(y.size() == x.size());
    for (std::size_t n = 0; n < 17; ++n) CHECK(y[n] == Sample{0.0, 0.0});
    for (std::size_t n = 17; n < x.size(); ++n) CHECK(y[n] == x[n - 17]);
    // Near the noiseless limit the output approaches the delayed input.
    p.carrier_power.reset();
    const auto y200 = apply_channel(x, p);
    double worst = 0.0;
    for (std::size_t n = 17; n < x.size(); ++n) worst = std::max(worst, std::abs(y200[n] - x[n - 17]));
    CHECK(worst < 1e-4 * std::sqrt(mean_power(s)));

    // Fractional delays compose: 0.25 + 0.75 samples equals a one-sample
    // shift. The OFDM comb fills the whole 240 MHz band, so the Nyquist bin
    // cannot be delayed exactly and the match is only approximate.
    std::vector<Sample> padded(512, Sample{0.0, 0.0});
    padded.insert(padded.end(), s.begin(), s.end());
    padded.resize(8000);
    ChannelParams q = p;
    q.delay_s = 0.25 / kFs;
    q.carrier_power = 0.0;
    ChannelParams r = q;
    r.delay_s = 0.75 / kFs;
    const auto z = apply_channel(apply_channel(padded, q), r);
    double err = 0.0, ref = 0.0;
    for (std::size_t n = 1; n < padded.size(); ++n) {
        err += std::norm(z[n] - padded[n - 1]);
        ref += std::norm(padded[n - 1]);
    }
    CHECK(std::sqrt(err / ref) < 1e-2);

    p.delay_s = -1e-9;
    CHECK_THROWS_AS(apply_channel(x, p), std::invalid_argument);
    p.delay_s = p.max_delay_s * 1.01;
    CHECK_THROWS_AS(apply_channel(x, p), std::invalid_argument);

    // Input is not touched.
    const std::vector<Sample> before = x;
    p.delay_s = 3.3 / kFs;
    p.cn0 = CnDensity::from_dbhz(60.0);
    apply_channel(x, p);
    CHECK(before == x);
}

TEST_CASE("noise level") {
    std::vector<Sample> zeros(1'000'000, Sample{0.0, 0.0});
    ChannelParams p;
    p.cn0 = CnDensity::from_dbhz(80.0);
    p.carrier_power = 2.0;
    p.seed = 11;
    const auto y = apply_channel(zeros, p);
    const double expected = noise_variance(2.0, p.cn0, kFs);
    CHECK(expected == doctest::Approx(2.0 * 240e6 / 1e8));
    CHECK(mean_power(y) == doctest::Approx(expected).epsilon(0.01));
    const Sample m = std::accumulate(y.begin(), y.end(), Sample{0.0, 0.0}) / static_cast<double>(y.size());
    CHECK(std::abs(m) < 5.0 * std::sqrt(expected / y.size()));
    CHECK(y == apply_channel(zeros, p));
}

TEST_CASE("noiseless acquisition") {
    const auto ref = generate_sync_symbols(OfdmSpec::starlink(), 1, kFs);
    const double window = 20.83e-6;
    const std::size_t w = sample_count(window, kFs);
    std::vector<Sample> tx(ref);
    tx.resize(w + ref.size() + 64);
    for (int k : {0, 1, 250, 4998}) {
        ChannelParams p;
        p.cn0 = CnDensity::from_dbhz(200.0);
        p.delay_s = k / kFs;
        const auto rx = apply_channel(tx, p);
        for (Refinement ref_mode : {Refinement::Parabolic, Refinement::Nearest}) {
            const DelayEstimate e = acquire_delay(rx, ref, window, kFs, {ref_mode, 8});
            CHECK(std::abs(err_samples(e.delay_s, k / kFs)) < 1e-6);
            CHECK(e.peak_metric == doctest::Approx(1.0).epsilon(1e-3));
        }
    }
    for (double frac : {0.5, 10.25, 1234.7}) {
        ChannelParams p;
        p.cn0 = CnDensity::from_dbhz(200.0);
        p.delay_s = frac / kFs;
        const auto rx = apply_channel(tx, p);
        const DelayEstimate e = acquire_delay(rx, ref, window, kFs);
        CHECK(std::abs(err_samples(e.delay_s, frac / kFs)) < 0.05);
        const DelayEstimate raw = acquire_delay(rx, ref, window, kFs, {Refinement::Parabolic, 1});
        CHECK(std::abs(err_samples(raw.delay_s, frac / kFs)) < 0.5);
        const DelayEstimate nearest = acquire_delay(rx, ref, window, kFs, {Refinement::Nearest, 8});
        CHECK(std::abs(err_samples(nearest.delay_s, frac / kFs)) <= 0.5 + 1e-9);
    }
}

TEST_CASE("fractional delay against a dense correlation oracle") {
    const auto ref = generate_sync_symbols(OfdmSpec::starlink(), 4, kFs);
    std::vector<Sample> tx(ref);
    tx.resize(5000 + ref.size() + 64);
    ChannelParams p;
    p.cn0 = CnDensity::from_dbhz(200.0);
    p.delay_s = 0.5 / kFs;
    const auto rx = apply_channel(tx, p);
    const double oracle = oracle_peak(rx, ref, 0.0, 1.0);
    CHECK(std::abs(oracle - 0.5) < 0.01);
    CHECK(std::abs(acquire_delay(rx, ref, 20.83e-6, kFs).delay_s * kFs - oracle) < 0.05);
}

TEST_CASE("phase invariance and errors") {
    const auto ref = generate_sync_symbols(OfdmSpec::starlink(), 1, kFs);
    std::vector<Sample> tx(ref);
    tx.resize(5000 + ref.size() + 64);
    ChannelParams p;
    p.cn0 = CnDensity::from_dbhz(75.0);
    p.delay_s = 812.3 / kFs;
    p.seed = 4;
    const auto rx = apply_channel(tx, p);
    std::vector<Sample> rot(rx);
    for (Sample& s : rot) s *= std::polar(1.0, 1.234);
    const DelayEstimate a = acquire_delay(rx, ref, 20.83e-6, kFs);
    const DelayEstimate b = acquire_delay(rot, ref, 20.83e-6, kFs);
    CHECK(std::abs(a.delay_s - b.delay_s) * kFs < 1e-9);
    CHECK(a.delay_s >= 0.0);
    CHECK(a.delay_s < 20.83e-6);

    std::vector<Sample> zeros(rx.size());
    CHECK_THROWS_AS(acquire_delay(zeros, ref, 20.83e-6, kFs), AcquisitionError);
    CHECK_THROWS_AS(acquire_delay(std::span(rx).first(100), ref, 20.83e-6, kFs), std::invalid_argument);
    CHECK_THROWS_AS(acquire_delay(rx, ref, 20.83e-6, kFs, {Refinement::Parabolic, 0}), std::invalid_argument);
}

TEST_CASE("pure noise spreads over the window") {
    const auto ref = generate_sync_symbols(OfdmSpec::starlink(), 1, kFs);
    std::vector<Sample> zeros(5000 + ref.size() + 64);
    std::vector<double> est;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        ChannelParams p;
        p.cn0 = CnDensity::from_dbhz(60.0);
        p.carrier_power = 1.0;
        p.seed = seed;
        est.push_back(acquire_delay(apply_channel(zeros, p), ref, 20.83e-6, kFs).delay_s);
    }
    const double mean = std::accumulate(est.begin(), est.end(), 0.0) / est.size();
    double ss = 0.0;
    for (double e : est) ss += (e - mean) * (e - mean);
    const double std = std::sqrt(ss / (est.size() - 1));
    CHECK(mean == doctest::Approx(20.83e-6 / 2).epsilon(0.1));
    CHECK(std == doctest::Approx(20.83e-6 / std::sqrt(12.0)).epsilon(0.1));
}

TEST_CASE("trial seeds") {
    CHECK(trial_seed(1, 0, 0) != trial_seed(1, 0, 1));
    CHECK(trial_seed(1, 0, 1) != trial_seed(1, 1, 0));
    CHECK(trial_seed(1, 2, 3) == trial_seed(1, 2, 3));
    CHECK(trial_seed(1, 2, 3) != trial_seed(2, 2, 3));
}

TEST_CASE("monte carlo") {
    AcqConfig c;
    c.cn0_grid_dbhz = {50.0, 80.0};
    c.trials_per_point = 24;
    CHECK_NOTHROW(c.validate());
    const AcqResults serial = run_acq_montecarlo(c, Execution::Serial);
    const AcqResults parallel = run_acq_montecarlo(c, Execution::Parallel);
    REQUIRE(serial.points.size() == 2);
    REQUIRE(serial.trials.size() == 48);
    std::ostringstream a, b, ta, tb;
    write_results_csv(a, serial);
    write_results_csv(b, parallel);
    write_trials_csv(ta, serial);
    write_trials_csv(tb, parallel);
    CHECK(a.str() == b.str());
    CHECK(ta.str() == tb.str());
    CHECK(a.str().rfind("cn0_dbhz,trials,bias_s,std_s,std_m,mcrlb_std_s,mcrlb_std_m\n", 0) == 0);
    CHECK(ta.str().rfind("cn0_dbhz,true_delay_s,est_delay_s,peak_metric,seed\n", 0) == 0);

    CHECK(serial.observation_time_s == doctest::Approx(8.8e-6));
    CHECK(serial.xi == doctest::Approx(nmsb_ofdm_closed_form(c.ofdm)));
    const AcqPointStats& hi = serial.points[1];
    CHECK(hi.failures == 0);
    CHECK(hi.std_s * 3e8 < 1.0);
    CHECK(hi.std_s >= 0.8 * hi.mcrlb_std_s);
    CHECK(hi.std_s <= 3.0 * hi.mcrlb_std_s);
    const double bound = mcrlb_delay(serial.xi, c.ofdm.symbol_period_s, 8.8e-6, CnDensity::from_dbhz(80.0)).std_native;
    CHECK(hi.mcrlb_std_s == doctest::Approx(bound).scale(0).epsilon(1e-12));
    for (const AcqTrial& t : serial.trials) {
        CHECK(t.est_delay_s >= 0.0);
        CHECK(t.est_delay_s < c.search_window_s);
        CHECK(std::abs(t.true_delay_s - c.search_window_s / 2) <= c.delay_jitter_s / 2);
    }

    AcqConfig bad = c;
    bad.trials_per_point = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.sample_rate_hz = 200e6;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.cn0_grid_dbhz.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.delay_jitter_s = 1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    AcqConfig uni = c;
    uni.delay_draw = DelayDraw::UniformWindow;
    for (const AcqTrial& t : run_acq_montecarlo(uni).trials) CHECK(t.true_delay_s <= c.search_window_s);
}

TEST_CASE("analysis") {
    AcqResults r;
    r.points = {{40.0, 10, 0, 0.0, 6e-6, 1e-8},
                {50.0, 10, 0, 0.0, 6e-6, 3e-9},
                {60.0, 10, 0, 0.0, 3e-8, 1e-9},
                {70.0, 10, 0, 0.0, std::sqrt(0.1) * 1e-9, std::sqrt(0.1) * 1e-9},
                {80.0, 10, 0, 0.0, 1e-10, 1e-10},
                {90.0, 10, 0, 0.0, std::sqrt(0.1) * 1e-10, std::sqrt(0.1) * 1e-10}};
    AcqConfig c;
    const AcqAnalysis a = analyze(r, c);
    REQUIRE(a.knee_cn0_dbhz);
    CHECK(*a.knee_cn0_dbhz == 60.0);
    CHECK(a.high_cn0_slope == doctest::Approx(-0.5));
    CHECK(a.uniform_window_std_s == doctest::Approx(20.83e-6 / std::sqrt(12.0)).scale(0));
    CHECK_THROWS_AS(analyze(AcqResults{}, c), std::invalid_argument);
}
