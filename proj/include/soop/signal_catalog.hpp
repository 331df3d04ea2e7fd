#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace soop {

enum class SystemId { Starlink, OneWeb, Iridium, Orbcomm };
enum class Modulation { Ofdm, Qpsk, SdQpsk, FlatSpectrum };

inline constexpr std::array<SystemId, 4> kAllSystems = {SystemId::Starlink, SystemId::OneWeb,
                                                        SystemId::Iridium, SystemId::Orbcomm};

std::string_view to_string(SystemId id);
std::string_view to_string(Modulation m);

/// Case-insensitive lookup by system name ("starlink", "OneWeb", ...).
std::optional<SystemId> parse_system(std::string_view name);

/// OFDM numerology of one channel.
struct OfdmSpec {
    int subcarrier_count = 0;           // N
    double symbol_period_s = 0.0;       // T_sym, cyclic prefix included
    double chip_period_s = 0.0;         // T_C
    double subcarrier_spacing_hz = 0.0; // F

    /// Throws std::invalid_argument unless N >= 2 is even, all periods are
    /// positive and T_sym * F >= 1 (non-negative cyclic prefix).
    void validate() const;

    double useful_duration_s() const { return 1.0 / subcarrier_spacing_hz; }
    double cyclic_prefix_s() const { return symbol_period_s - useful_duration_s(); }
    double occupied_bandwidth_hz() const { return subcarrier_count * subcarrier_spacing_hz; }

    /// Reverse-engineered Starlink downlink numerology: N = 1024,
    /// T_sym = 4.4 us, T_C = 4.167 ns, F = 234375 Hz.
    static OfdmSpec starlink();
};

/// Physical-layer description of one LEO signal of opportunity.
struct SignalSpec {
    SystemId system_id = SystemId::Starlink;
    Modulation modulation = Modulation::Ofdm;
    double carrier_frequency_hz = 0.0;
    double channel_bandwidth_hz = 0.0;
    int channel_count = 0;
    double symbol_period_s = 0.0;
    std::optional<double> rolloff;       // PSK pulse shaping only
    std::optional<OfdmSpec> ofdm;        // OFDM only
    double altitude_m = 0.0;
    double beacon_length_s = 0.0;
    std::optional<double> max_duty_cycle;
    /// Reported C/N0 range of the unmodulated Starlink tones, kept verbatim.
    std::optional<std::pair<double, double>> tone_cn0_range_dbhz;
    std::string notes;

    /// Throws std::invalid_argument when a field or a modulation pairing
    /// (OFDM <=> ofdm, PSK <=> rolloff) is violated.
    void validate() const;
};

/// Built-in parameters for the four LEO candidates.
///
/// OneWeb's OFDM numerology is unpublished, so it is carried as a flat
/// spectrum over its 250 MHz channel with symbol period 1/B.
SignalSpec catalog_get(SystemId id);

/// Unmodulated Starlink tones: `count` lines centred on 11.325 GHz, 44 kHz apart.
std::vector<double> starlink_tone_grid(int count);

/// Asymptotic envelope |G(f)|^2 ~ coefficient / |f|^power beyond the support hint,
/// averaged over any oscillation. Used to close the quadrature analytically.
struct SpectrumTail {
    double coefficient = 0.0;
    double power = 0.0;  // must exceed 3 so that the f^2-weighted tail converges
};

/// Unnormalized one-sided magnitude-squared spectral shape |G(f)|^2.
struct SpectrumModel {
    std::function<double(double)> evaluator;
    /// Outside [support_lo, support_hi] the evaluator is treated as zero, or
    /// replaced by `tail` when one is given.
    double support_lo = 0.0;
    double support_hi = 0.0;
    /// Sorted interior points where the shape is not smooth (kinks, band edges).
    std::vector<double> breakpoints;
    /// Preferred quadrature panel width; 0 lets the integrator choose.
    double panel_width_hz = 0.0;
    std::optional<SpectrumTail> tail;
    /// Nominal occupied band, informative only.
    double occupied_lo = 0.0;
    double occupied_hi = 0.0;

    double operator()(double f) const { return evaluator(f); }
};

/// |G0(f)|^2 of a unit-height trapezoid whose plateau lasts T_sym - T_C with
/// linear T_C ramps on both sides (total duration T_sym + T_C).
double trapezoid_subpulse_psd(double f, double symbol_period_s, double chip_period_s);

/// Raised-cosine spectrum value G(f) (unit passband) for symbol period T.
double raised_cosine(double f, double symbol_period_s, double rolloff);

SpectrumModel flat_spectrum(double bandwidth_hz);
SpectrumModel raised_cosine_spectrum(double symbol_period_s, double rolloff);

/// Sum over subcarriers i = -N/2+1 .. N/2 of the trapezoid sub-pulse spectrum
/// shifted to i*F.
SpectrumModel ofdm_spectrum(const OfdmSpec& ofdm);

/// Per-system spectral model: OFDM, squared raised cosine, or flat.
SpectrumModel psd_model(const SignalSpec& spec);

}  // namespace soop
