#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "soop/mcrlb.hpp"
#include "soop/parallel.hpp"
#include "soop/signal_catalog.hpp"

namespace soop::acq {

using Sample = std::complex<double>;

/// Integer number of samples in `duration_s` at `sample_rate_hz` (rounded).
std::size_t sample_count(double duration_s, double sample_rate_hz);

/// Two OFDM symbols (PSS/SSS stand-ins) whose active subcarriers carry a
/// seed-derived QPSK sequence; the DC subcarrier is left empty. Each symbol
/// is the useful part preceded by its cyclic prefix, so the sequence lasts
/// 2 T_sym. The sample rate must be an integer multiple of N F.
std::vector<Sample> generate_sync_symbols(const OfdmSpec& ofdm, std::uint64_t seed, double sample_rate_hz,
                                          int symbol_count = 2);

struct FrameLayout {
    double frame_duration_s = 1.33e-3;
    double trailing_silence_s = 5.33e-6;
    int sync_symbol_count = 2;
};

/// Sync symbols, then pseudo-random QPSK payload symbols while whole symbols
/// fit, zero padding, and a zeroed trailing silence.
std::vector<Sample> generate_frame(const OfdmSpec& ofdm, std::uint64_t seed, double sample_rate_hz,
                                   const FrameLayout& layout = {});

/// Mean |x|^2.
double mean_power(std::span<const Sample> samples);

struct ChannelParams {
    double delay_s = 0.0;
    CnDensity cn0 = CnDensity::from_dbhz(60.0);
    double sample_rate_hz = 240e6;
    std::uint64_t seed = 0;
    /// Largest admissible delay (the search window). Delays outside
    /// [0, max_delay_s] are rejected.
    double max_delay_s = 20.83e-6;
    /// Carrier power C used for the noise level; measured over the non-zero
    /// input samples when absent.
    std::optional<double> carrier_power;
};

/// Delays the input by a possibly fractional number of samples (linear, not
/// circular: phase ramp on a zero-padded FFT buffer) and adds circular white
/// Gaussian noise of variance C f_s / (C/N0) per complex sample. Output has
/// the input's length.
std::vector<Sample> apply_channel(std::span<const Sample> samples, const ChannelParams& params);

/// Noise variance per complex sample for a carrier power and C/N0.
double noise_variance(double carrier_power, CnDensity cn0, double sample_rate_hz);

enum class Refinement { Parabolic, Nearest };

struct AcquisitionOptions {
    Refinement refinement = Refinement::Parabolic;
    /// Band-limited interpolation factor applied to the correlation around
    /// the coarse peak before the parabolic fit (1 = fit the raw samples).
    int correlation_upsampling = 8;
};

struct DelayEstimate {
    double delay_s;
    double peak_metric;  // |correlation| at the refined peak, normalised by |reference|^2
};

class AcquisitionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Delay in [0, search_window) maximising |sum received[n + k] conj(reference[n])|,
/// refined to sub-sample precision. `received` must hold at least
/// window + reference samples. Throws AcquisitionError for all-zero input.
DelayEstimate acquire_delay(std::span<const Sample> received, std::span<const Sample> reference,
                            double search_window_s, double sample_rate_hz, const AcquisitionOptions& options = {});

/// How true delays are drawn for each trial.
enum class DelayDraw {
    /// Uniform over the whole search window.
    UniformWindow,
    /// Uniform over `delay_jitter_s` centred in the window; failed
    /// acquisitions then spread with std W/sqrt(12) about the truth.
    CenteredJitter,
};

struct AcqConfig {
    OfdmSpec ofdm = OfdmSpec::starlink();
    int sync_symbol_count = 2;
    double sample_rate_hz = 240e6;
    std::vector<double> cn0_grid_dbhz;
    int trials_per_point = 300;
    double search_window_s = 20.83e-6;
    DelayDraw delay_draw = DelayDraw::CenteredJitter;
    double delay_jitter_s = 1e-6;
    std::uint64_t rng_seed = 20240419;
    std::uint64_t sync_seed = 1;
    AcquisitionOptions acquisition;

    void validate() const;
};

struct AcqTrial {
    double cn0_dbhz;
    double true_delay_s;
    double est_delay_s;
    double peak_metric;
    std::uint64_t seed;
};

struct AcqPointStats {
    double cn0_dbhz;
    int trials;
    int failures;
    double bias_s;
    double std_s;
    double mcrlb_std_s;
};

struct AcqResults {
    std::vector<AcqPointStats> points;
    std::vector<AcqTrial> trials;  // grid-major, trial order within a point
    double xi;                     // closed-form NMSB used for the bound
    double observation_time_s;     // sync duration
};

/// Seed of trial `trial` at grid point `point`, independent of scheduling.
std::uint64_t trial_seed(std::uint64_t master, std::size_t point, std::size_t trial);

/// Monte Carlo of delay acquisition over the C/N0 grid. Trials that throw are
/// counted as failures; throws AcquisitionError only if every trial fails.
AcqResults run_acq_montecarlo(const AcqConfig& config, Execution execution = Execution::Parallel);

/// Threshold analysis of a run.
struct AcqAnalysis {
    /// Highest grid C/N0 whose std exceeds 3x the bound (absent if none).
    std::optional<double> knee_cn0_dbhz;
    /// Least-squares slope of log10(std) against C/N0/10 over the top 15 dB.
    double high_cn0_slope;
    double uniform_window_std_s;  // W / sqrt(12)
};

AcqAnalysis analyze(const AcqResults& results, const AcqConfig& config, double departure_factor = 3.0,
                    double slope_span_db = 15.0);

void write_results_csv(std::ostream& out, const AcqResults& results, LightSpeed light = LightSpeed::Rounded);
void write_trials_csv(std::ostream& out, const AcqResults& results);

}  // namespace soop::acq
