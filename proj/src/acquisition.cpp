#include "soop/acquisition.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>

#include "soop/constants.hpp"
#include "soop/csv.hpp"

namespace soop::acq {

namespace {

// FFTW plans are created once per (size, direction) under a lock; executing
// a plan on other buffers through the new-array interface is thread-safe.
class PlanCache {
public:
    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    fftw_plan get(int n, int sign) {
        std::lock_guard lock(mutex_);
        auto& plan = plans_[{n, sign}];
        if (!plan) {
            fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(n));
            plan = fftw_plan_dft_1d(n, tmp, tmp, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
            fftw_free(tmp);
            if (!plan) throw std::runtime_error("FFTW planning failed");
        }
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

// In-place transform; unnormalised in both directions.
void fft(std::vector<Sample>& x, int sign) {
    const fftw_plan plan = PlanCache::instance().get(static_cast<int>(x.size()), sign);
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_execute_dft(plan, p, p);
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Signed frequency index of bin k in an n-point DFT; the Nyquist bin is
// reported as n/2 and handled by the callers.
long long signed_bin(std::size_t k, std::size_t n) {
    return k <= n / 2 ? static_cast<long long>(k) : static_cast<long long>(k) - static_cast<long long>(n);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Sample qpsk(std::uint64_t bits) {
    constexpr double a = 0.70710678118654752440;
    return {(bits & 1U) ? -a : a, (bits & 2U) ? -a : a};
}

// One OFDM symbol (cyclic prefix + useful part) at `oversampling` x N F.
std::vector<Sample> ofdm_symbol(const OfdmSpec& ofdm, std::uint64_t seed, std::size_t oversampling,
                                std::size_t cp_samples) {
    const std::size_t n = static_cast<std::size_t>(ofdm.subcarrier_count);
    const std::size_t nfft = n * oversampling;
    std::vector<Sample> bins(nfft);
    std::mt19937_64 rng(seed);
    const long long first = -static_cast<long long>(n) / 2 + 1;
    std::size_t active = 0;
    for (long long i = first; i < first + static_cast<long long>(n); ++i) {
        const std::uint64_t bits = rng();
        if (i == 0) continue;  // DC left empty
        const std::size_t k = static_cast<std::size_t>((i + static_cast<long long>(nfft)) % static_cast<long long>(nfft));
        bins[k] = qpsk(bits);
        ++active;
    }
    fft(bins, FFTW_BACKWARD);
    const double scale = 1.0 / std::sqrt(static_cast<double>(active));
    std::vector<Sample> out;
    out.reserve(cp_samples + nfft);
    for (std::size_t k = nfft - cp_samples; k < nfft; ++k) out.push_back(bins[k] * scale);
    for (std::size_t k = 0; k < nfft; ++k) out.push_back(bins[k] * scale);
    return out;
}

struct SymbolGrid {
    std::size_t oversampling;
    std::size_t cp_samples;
    std::size_t symbol_samples;
};

SymbolGrid symbol_grid(const OfdmSpec& ofdm, double sample_rate_hz) {
    ofdm.validate();
    const double base = ofdm.subcarrier_count * ofdm.subcarrier_spacing_hz;
    const double ratio = sample_rate_hz / base;
    const double os = std::round(ratio);
    if (!(os >= 1.0) || std::abs(ratio - os) > 1e-9 * ratio)
        throw std::invalid_argument("sample rate must be an integer multiple of N F");
    const double cp_exact = (ofdm.symbol_period_s - 1.0 / ofdm.subcarrier_spacing_hz) * sample_rate_hz;
    const double cp = std::round(cp_exact);
    if (std::abs(cp - cp_exact) > 1e-6) throw std::invalid_argument("cyclic prefix is not a whole number of samples");
    const auto oversampling = static_cast<std::size_t>(os);
    const auto cp_samples = static_cast<std::size_t>(cp);
    return {oversampling, cp_samples, cp_samples + static_cast<std::size_t>(ofdm.subcarrier_count) * oversampling};
}

std::uint64_t symbol_seed(std::uint64_t seed, std::uint64_t index) { return splitmix64(seed ^ splitmix64(index)); }

// Band-limited correlation at fractional lag `tau` (samples) from the
// cross-spectrum of an n-point circular correlation.
Sample correlation_at(const std::vector<Sample>& cross, double tau) {
    const std::size_t n = cross.size();
    const double w = 2.0 * kPi * tau / static_cast<double>(n);
    Sample acc{0.0, 0.0};
    Sample rot, step = std::polar(1.0, w);
    for (std::size_t k = 0; k < n; ++k) {
        if (k % 256 == 0) rot = std::polar(1.0, w * static_cast<double>(signed_bin(k, n)));
        if (k == n / 2 && n % 2 == 0) {
            acc += cross[k] * std::cos(kPi * tau);
            rot = std::polar(1.0, w * static_cast<double>(signed_bin(k + 1, n)));
            continue;
        }
        acc += cross[k] * rot;
        rot *= step;
    }
    return acc / static_cast<double>(n);
}

double parabolic_offset(double ym, double y0, double yp) {
    const double denom = ym - 2.0 * y0 + yp;
    if (!(denom < 0.0)) return 0.0;
    return std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
}

}  // namespace

std::size_t sample_count(double duration_s, double sample_rate_hz) {
    if (!(duration_s >= 0.0) || !(sample_rate_hz > 0.0)) throw std::invalid_argument("negative duration or rate");
    return static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
}

std::vector<Sample> generate_sync_symbols(const OfdmSpec& ofdm, std::uint64_t seed, double sample_rate_hz,
                                          int symbol_count) {
    if (symbol_count < 1) throw std::invalid_argument("at least one sync symbol is required");
    const SymbolGrid g = symbol_grid(ofdm, sample_rate_hz);
    std::vector<Sample> out;
    out.reserve(g.symbol_samples * static_cast<std::size_t>(symbol_count));
    for (int s = 0; s < symbol_count; ++s) {
        const auto sym = ofdm_symbol(ofdm, symbol_seed(seed, static_cast<std::uint64_t>(s)), g.oversampling, g.cp_samples);
        out.insert(out.end(), sym.begin(), sym.end());
    }
    return out;
}

std::vector<Sample> generate_frame(const OfdmSpec& ofdm, std::uint64_t seed, double sample_rate_hz,
                                   const FrameLayout& layout) {
    const SymbolGrid g = symbol_grid(ofdm, sample_rate_hz);
    const std::size_t total = sample_count(layout.frame_duration_s, sample_rate_hz);
    const std::size_t silence = sample_count(layout.trailing_silence_s, sample_rate_hz);
    std::vector<Sample> frame = generate_sync_symbols(ofdm, seed, sample_rate_hz, layout.sync_symbol_count);
    if (frame.size() + silence > total) throw std::invalid_argument("frame too short for its sync symbols");
    std::uint64_t index = static_cast<std::uint64_t>(layout.sync_symbol_count);
    while (frame.size() + g.symbol_samples + silence <= total) {
        const auto sym = ofdm_symbol(ofdm, symbol_seed(seed, index++), g.oversampling, g.cp_samples);
        frame.insert(frame.end(), sym.begin(), sym.end());
    }
    frame.resize(total, Sample{0.0, 0.0});
    return frame;
}

double mean_power(std::span<const Sample> samples) {
    if (samples.empty()) return 0.0;
    double acc = 0.0;
    for (const Sample& s : samples) acc += std::norm(s);
    return acc / static_cast<double>(samples.size());
}

double noise_variance(double carrier_power, CnDensity cn0, double sample_rate_hz) {
    if (!(carrier_power >= 0.0) || !(sample_rate_hz > 0.0)) throw std::invalid_argument("invalid noise parameters");
    return carrier_power * sample_rate_hz / cn0.linear();
}

std::vector<Sample> apply_channel(std::span<const Sample> samples, const ChannelParams& params) {
    if (!(params.delay_s >= 0.0) || params.delay_s > params.max_delay_s)
        throw std::invalid_argument("delay outside the admissible window");
    if (samples.empty()) return {};
    const double fs = params.sample_rate_hz;
    const double d = params.delay_s * fs;  // samples

    std::vector<Sample> out;
    const double whole = std::round(d);
    if (std::abs(d - whole) < 1e-12) {
        const auto shift = static_cast<std::size_t>(whole);
        out.assign(samples.size(), Sample{0.0, 0.0});
        for (std::size_t n = shift; n < samples.size(); ++n) out[n] = samples[n - shift];
    } else {
        const std::size_t n = next_pow2(samples.size() + static_cast<std::size_t>(std::ceil(d)) + 64);
        std::vector<Sample> buf(n);
        std::copy(samples.begin(), samples.end(), buf.begin());
        fft(buf, FFTW_FORWARD);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == n / 2) {
                buf[k] *= std::cos(kPi * d);
                continue;
            }
            buf[k] *= std::polar(1.0 / static_cast<double>(n), -2.0 * kPi * static_cast<double>(signed_bin(k, n)) * d /
                                                                   static_cast<double>(n));
        }
        buf[n / 2] /= static_cast<double>(n);
        fft(buf, FFTW_BACKWARD);
        out.assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(samples.size()));
    }

    double carrier = 0.0;
    if (params.carrier_power) {
        carrier = *params.carrier_power;
    } else {
        std::size_t active = 0;
        for (const Sample& s : samples)
            if (s != Sample{0.0, 0.0}) {
                carrier += std::norm(s);
                ++active;
            }
        if (active > 0) carrier /= static_cast<double>(active);
    }
    const double sigma = std::sqrt(noise_variance(carrier, params.cn0, fs) / 2.0);
    if (sigma > 0.0) {
        std::mt19937_64 rng(params.seed);
        std::normal_distribution<double> gauss(0.0, sigma);
        for (Sample& s : out) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            s += Sample{re, im};
        }
    }
    return out;
}

DelayEstimate acquire_delay(std::span<const Sample> received, std::span<const Sample> reference,
                            double search_window_s, double sample_rate_hz, const AcquisitionOptions& options) {
    if (reference.empty()) throw std::invalid_argument("empty reference");
    const std::size_t window = sample_count(search_window_s, sample_rate_hz);
    if (window < 1) throw std::invalid_argument("search window shorter than one sample");
    if (received.size() < window + reference.size())
        throw std::invalid_argument("received span shorter than window + reference");
    if (options.correlation_upsampling < 1) throw std::invalid_argument("correlation upsampling must be >= 1");

    const double ref_energy = mean_power(reference) * static_cast<double>(reference.size());
    if (!(ref_energy > 0.0)) throw std::invalid_argument("all-zero reference");
    const std::size_t span = window + reference.size() - 1;
    if (std::all_of(received.begin(), received.begin() + static_cast<std::ptrdiff_t>(span),
                    [](const Sample& s) { return s == Sample{0.0, 0.0}; }))
        throw AcquisitionError("all-zero received signal");

    const std::size_t n = next_pow2(span);
    std::vector<Sample> r(n), s(n);
    std::copy(received.begin(), received.begin() + static_cast<std::ptrdiff_t>(span), r.begin());
    std::copy(reference.begin(), reference.end(), s.begin());
    fft(r, FFTW_FORWARD);
    fft(s, FFTW_FORWARD);
    std::vector<Sample> cross(n);
    for (std::size_t k = 0; k < n; ++k) cross[k] = r[k] * std::conj(s[k]);
    std::vector<Sample> corr = cross;
    fft(corr, FFTW_BACKWARD);

    std::size_t best = 0;
    double best_mag = -1.0;
    for (std::size_t k = 0; k < window; ++k) {
        const double m = std::norm(corr[k]);
        if (m > best_mag) {
            best_mag = m;
            best = k;
        }
    }

    double lag = static_cast<double>(best);
    double peak = std::sqrt(best_mag) / static_cast<double>(n);
    if (options.refinement == Refinement::Parabolic) {
        const int u = options.correlation_upsampling;
        if (u == 1) {
            if (best > 0 && best + 1 < window) {
                const double ym = std::abs(corr[best - 1]), y0 = std::abs(corr[best]), yp = std::abs(corr[best + 1]);
                lag += parabolic_offset(ym, y0, yp);
            }
        } else {
            // Band-limited magnitudes on a 1/u grid spanning one sample either side.
            std::vector<double> fine(static_cast<std::size_t>(2 * u + 1));
            for (int j = -u; j <= u; ++j)
                fine[static_cast<std::size_t>(j + u)] =
                    std::abs(correlation_at(cross, static_cast<double>(best) + static_cast<double>(j) / u));
            const auto jmax = static_cast<int>(std::max_element(fine.begin(), fine.end()) - fine.begin());
            double offset = static_cast<double>(jmax - u);
            double y = fine[static_cast<std::size_t>(jmax)];
            if (jmax > 0 && jmax < 2 * u) {
                offset += parabolic_offset(fine[static_cast<std::size_t>(jmax - 1)], y,
                                           fine[static_cast<std::size_t>(jmax + 1)]);
            }
            lag += offset / u;
            peak = std::max(peak, y);
        }
    }
    lag = std::clamp(lag, 0.0, static_cast<double>(window) - 1e-9);
    return {lag / sample_rate_hz, peak / ref_energy};
}

void AcqConfig::validate() const {
    ofdm.validate();
    if (sync_symbol_count < 1) throw std::invalid_argument("sync_symbol_count must be >= 1");
    if (sample_rate_hz < ofdm.subcarrier_count * ofdm.subcarrier_spacing_hz * (1.0 - 1e-12))
        throw std::invalid_argument("sample_rate_hz below N F aliases the OFDM channel");
    symbol_grid(ofdm, sample_rate_hz);
    if (cn0_grid_dbhz.empty()) throw std::invalid_argument("cn0_grid_dbhz is empty");
    for (double c : cn0_grid_dbhz)
        if (!std::isfinite(c)) throw std::invalid_argument("cn0_grid_dbhz has a non-finite entry");
    if (trials_per_point < 1) throw std::invalid_argument("trials_per_point must be >= 1");
    if (search_window_s * sample_rate_hz < 8.0)
        throw std::invalid_argument("search_window_s must span several sample periods");
    if (!(delay_jitter_s >= 0.0) || delay_jitter_s > search_window_s)
        throw std::invalid_argument("delay_jitter_s must lie in [0, search_window_s]");
    if (acquisition.correlation_upsampling < 1) throw std::invalid_argument("correlation_upsampling must be >= 1");
}

std::uint64_t trial_seed(std::uint64_t master, std::size_t point, std::size_t trial) {
    return splitmix64(splitmix64(master ^ splitmix64(point)) ^ trial);
}

AcqResults run_acq_montecarlo(const AcqConfig& config, Execution execution) {
    config.validate();
    const double fs = config.sample_rate_hz;
    const std::vector<Sample> reference =
        generate_sync_symbols(config.ofdm, config.sync_seed, fs, config.sync_symbol_count);
    FrameLayout layout;
    layout.sync_symbol_count = config.sync_symbol_count;
    const std::vector<Sample> frame = generate_frame(config.ofdm, config.sync_seed, fs, layout);
    const std::size_t window = sample_count(config.search_window_s, fs);
    const std::size_t tx_len = std::min(frame.size(), window + reference.size());
    const std::span<const Sample> transmitted(frame.data(), tx_len);
    const double carrier = mean_power(reference);

    AcqResults results;
    results.xi = nmsb_ofdm_closed_form(config.ofdm);
    results.observation_time_s = config.sync_symbol_count * config.ofdm.symbol_period_s;

    const std::size_t points = config.cn0_grid_dbhz.size();
    const auto per_point = static_cast<std::size_t>(config.trials_per_point);
    results.trials.resize(points * per_point);
    std::vector<char> failed(points * per_point, 0);

    // Warm the plan cache outside the parallel region.
    {
        std::vector<Sample> warm(next_pow2(tx_len + window + 64));
        fft(warm, FFTW_FORWARD);
        fft(warm, FFTW_BACKWARD);
        std::vector<Sample> warm2(next_pow2(window + reference.size() - 1));
        fft(warm2, FFTW_FORWARD);
        fft(warm2, FFTW_BACKWARD);
    }

    auto run_trial = [&](long long flat) {
        const std::size_t p = static_cast<std::size_t>(flat) / per_point;
        const std::size_t t = static_cast<std::size_t>(flat) % per_point;
        const std::uint64_t seed = trial_seed(config.rng_seed, p, t);
        std::mt19937_64 rng(seed);
        const double u = unit_uniform(rng);
        double delay = config.delay_draw == DelayDraw::UniformWindow
                           ? u * config.search_window_s
                           : 0.5 * config.search_window_s + (u - 0.5) * config.delay_jitter_s;
        delay = std::clamp(delay, 0.0, config.search_window_s);

        AcqTrial& trial = results.trials[static_cast<std::size_t>(flat)];
        trial.cn0_dbhz = config.cn0_grid_dbhz[p];
        trial.true_delay_s = delay;
        trial.seed = seed;
        try {
            ChannelParams ch;
            ch.delay_s = delay;
            ch.cn0 = CnDensity::from_dbhz(config.cn0_grid_dbhz[p]);
            ch.sample_rate_hz = fs;
            ch.seed = splitmix64(seed ^ 0x6a09e667f3bcc909ULL);
            ch.max_delay_s = config.search_window_s;
            ch.carrier_power = carrier;
            const std::vector<Sample> rx = apply_channel(transmitted, ch);
            const DelayEstimate est = acquire_delay(rx, reference, config.search_window_s, fs, config.acquisition);
            trial.est_delay_s = est.delay_s;
            trial.peak_metric = est.peak_metric;
        } catch (const std::exception&) {
            failed[static_cast<std::size_t>(flat)] = 1;
            trial.est_delay_s = std::numeric_limits<double>::quiet_NaN();
            trial.peak_metric = std::numeric_limits<double>::quiet_NaN();
        }
    };

    const auto total = static_cast<long long>(points * per_point);
    if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (long long k = 0; k < total; ++k) run_trial(k);
    } else {
        for (long long k = 0; k < total; ++k) run_trial(k);
    }

    if (std::all_of(failed.begin(), failed.end(), [](char f) { return f != 0; }))
        throw AcquisitionError("every acquisition trial failed");

    for (std::size_t p = 0; p < points; ++p) {
        std::vector<double> err;
        int failures = 0;
        for (std::size_t t = 0; t < per_point; ++t) {
            const std::size_t k = p * per_point + t;
            if (failed[k]) {
                ++failures;
                continue;
            }
            err.push_back(results.trials[k].est_delay_s - results.trials[k].true_delay_s);
        }
        AcqPointStats st{};
        st.cn0_dbhz = config.cn0_grid_dbhz[p];
        st.trials = static_cast<int>(err.size());
        st.failures = failures;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        if (err.empty()) {
            st.bias_s = nan;
            st.std_s = nan;
        } else {
            const double mean = std::accumulate(err.begin(), err.end(), 0.0) / static_cast<double>(err.size());
            double ss = 0.0;
            for (double e : err) ss += (e - mean) * (e - mean);
            st.bias_s = mean;
            st.std_s = err.size() > 1 ? std::sqrt(ss / static_cast<double>(err.size() - 1)) : 0.0;
        }
        st.mcrlb_std_s = mcrlb_delay(results.xi, config.ofdm.symbol_period_s, results.observation_time_s,
                                     CnDensity::from_dbhz(st.cn0_dbhz))
                             .std_native;
        results.points.push_back(st);
    }
    return results;
}

AcqAnalysis analyze(const AcqResults& results, const AcqConfig& config, double departure_factor,
                    double slope_span_db) {
    if (results.points.empty()) throw std::invalid_argument("no results to analyze");
    AcqAnalysis a{};
    for (const AcqPointStats& p : results.points)
        if (std::isfinite(p.std_s) && p.std_s > departure_factor * p.mcrlb_std_s)
            if (!a.knee_cn0_dbhz || p.cn0_dbhz > *a.knee_cn0_dbhz) a.knee_cn0_dbhz = p.cn0_dbhz;

    double top = -std::numeric_limits<double>::infinity();
    for (const AcqPointStats& p : results.points) top = std::max(top, p.cn0_dbhz);
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const AcqPointStats& p : results.points) {
        if (p.cn0_dbhz < top - slope_span_db || !(p.std_s > 0.0)) continue;
        const double x = p.cn0_dbhz / 10.0, y = std::log10(p.std_s);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    const double denom = n * sxx - sx * sx;
    a.high_cn0_slope = n >= 2 && denom > 0.0 ? (n * sxy - sx * sy) / denom : std::numeric_limits<double>::quiet_NaN();
    a.uniform_window_std_s = config.search_window_s / std::sqrt(12.0);
    return a;
}

void write_results_csv(std::ostream& out, const AcqResults& results, LightSpeed light) {
    const double c = speed_of_light(light);
    out << "cn0_dbhz,trials,bias_s,std_s,std_m,mcrlb_std_s,mcrlb_std_m\n";
    for (const AcqPointStats& p : results.points)
        out << csv::number(p.cn0_dbhz) << ',' << p.trials << ',' << csv::number(p.bias_s) << ','
            << csv::number(p.std_s) << ',' << csv::number(p.std_s * c) << ',' << csv::number(p.mcrlb_std_s) << ','
            << csv::number(p.mcrlb_std_s * c) << '\n';
}

void write_trials_csv(std::ostream& out, const AcqResults& results) {
    out << "cn0_dbhz,true_delay_s,est_delay_s,peak_metric,seed\n";
    for (const AcqTrial& t : results.trials)
        out << csv::number(t.cn0_dbhz) << ',' << csv::number(t.true_delay_s) << ',' << csv::number(t.est_delay_s)
            << ',' << csv::number(t.peak_metric) << ',' << t.seed << '\n';
}

}  // namespace soop::acq
