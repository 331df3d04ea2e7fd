#include "soop/signal_catalog.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "soop/constants.hpp"

namespace soop {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

// sin(x)/x with the removable singularity filled in.
double sinc_unnormalized(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sin(x) / x;
}

// Number of subcarrier terms evaluated between re-seeds of the sine recurrence.
constexpr int kRecurrenceReseed = 64;

// Far-out integration limit, in multiples of the chip rate, beyond which the
// OFDM spectrum is replaced by its averaged 1/f^4 envelope.
constexpr double kOfdmTailChipRates = 20.0;

}  // namespace

std::string_view to_string(SystemId id) {
    switch (id) {
        case SystemId::Starlink: return "Starlink";
        case SystemId::OneWeb: return "OneWeb";
        case SystemId::Iridium: return "Iridium";
        case SystemId::Orbcomm: return "Orbcomm";
    }
    return "unknown";
}

std::string_view to_string(Modulation m) {
    switch (m) {
        case Modulation::Ofdm: return "OFDM";
        case Modulation::Qpsk: return "QPSK";
        case Modulation::SdQpsk: return "SD-QPSK";
        case Modulation::FlatSpectrum: return "FlatSpectrum";
    }
    return "unknown";
}

std::optional<SystemId> parse_system(std::string_view name) {
    const std::string key = lower(name);
    for (SystemId id : kAllSystems)
        if (lower(to_string(id)) == key) return id;
    return std::nullopt;
}

void OfdmSpec::validate() const {
    if (subcarrier_count < 2 || subcarrier_count % 2 != 0)
        throw std::invalid_argument("OFDM subcarrier count must be even and >= 2");
    if (!(symbol_period_s > 0.0) || !(chip_period_s > 0.0) || !(subcarrier_spacing_hz > 0.0))
        throw std::invalid_argument("OFDM periods and spacing must be positive");
    if (symbol_period_s * subcarrier_spacing_hz < 1.0 - 1e-12)
        throw std::invalid_argument("OFDM symbol period shorter than 1/F (negative cyclic prefix)");
    if (chip_period_s >= symbol_period_s)
        throw std::invalid_argument("OFDM chip period must be shorter than the symbol period");
}

OfdmSpec OfdmSpec::starlink() {
    return OfdmSpec{1024, 4.4e-6, 4.167e-9, 234375.0};
}

void SignalSpec::validate() const {
    if (!(carrier_frequency_hz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
    if (!(channel_bandwidth_hz > 0.0)) throw std::invalid_argument("channel bandwidth must be positive");
    if (!(altitude_m > 0.0)) throw std::invalid_argument("altitude must be positive");
    if (!(symbol_period_s > 0.0)) throw std::invalid_argument("symbol period must be positive");
    const bool is_ofdm = modulation == Modulation::Ofdm;
    if (is_ofdm != ofdm.has_value())
        throw std::invalid_argument("OFDM parameters must be present exactly when the modulation is OFDM");
    const bool is_psk = modulation == Modulation::Qpsk || modulation == Modulation::SdQpsk;
    if (is_psk != rolloff.has_value())
        throw std::invalid_argument("roll-off must be present exactly for PSK modulations");
    if (rolloff && (*rolloff < 0.0 || *rolloff > 1.0)) throw std::invalid_argument("roll-off must lie in [0, 1]");
    if (max_duty_cycle && !(*max_duty_cycle > 0.0 && *max_duty_cycle <= 1.0))
        throw std::invalid_argument("duty cycle must lie in (0, 1]");
    if (ofdm) ofdm->validate();
}

SignalSpec catalog_get(SystemId id) {
    SignalSpec s;
    s.system_id = id;
    switch (id) {
        case SystemId::Starlink:
            s.modulation = Modulation::Ofdm;
            s.carrier_frequency_hz = 11.57e9;  // 4th channel
            s.channel_bandwidth_hz = 240e6;
            s.channel_count = 8;
            s.symbol_period_s = 4.4e-6;
            s.ofdm = OfdmSpec::starlink();
            s.altitude_m = 550e3;
            s.beacon_length_s = 1.33e-3;
            s.max_duty_cycle = 0.997;
            s.tone_cn0_range_dbhz = std::pair{24.0, 36.0};
            s.notes = "unmodulated carriers around 11.325 GHz spaced by 44 kHz; tone C/N0 between 24 and 36 dB-Hz";
            break;
        case SystemId::OneWeb:
            s.modulation = Modulation::FlatSpectrum;
            s.carrier_frequency_hz = 11.075e9;
            s.channel_bandwidth_hz = 250e6;
            s.channel_count = 8;
            s.symbol_period_s = 1.0 / 250e6;
            s.altitude_m = 1200e3;
            s.beacon_length_s = 10e-3;
            s.notes = "OFDM inner structure unknown; delay bound evaluated on a flat spectrum";
            break;
        case SystemId::Iridium:
            s.modulation = Modulation::Qpsk;
            s.carrier_frequency_hz = 1.621e9;  // 120th channel
            s.channel_bandwidth_hz = 31.5e3;
            s.channel_count = 240;
            s.symbol_period_s = 40e-6;
            s.rolloff = 0.40;
            s.altitude_m = 780e3;
            s.beacon_length_s = 90e-3;
            s.max_duty_cycle = 0.368;
            break;
        case SystemId::Orbcomm:
            s.modulation = Modulation::SdQpsk;
            s.carrier_frequency_hz = 137.5e6;
            s.channel_bandwidth_hz = 4.8e3;
            s.channel_count = 1;
            s.symbol_period_s = 208.33e-6;
            s.rolloff = 0.40;
            s.altitude_m = 750e3;
            s.beacon_length_s = 1.0;
            s.max_duty_cycle = 0.50;
            s.notes = "duty cycle commonly between 6% and 10%";
            break;
    }
    return s;
}

std::vector<double> starlink_tone_grid(int count) {
    constexpr double center = 11.325e9;
    constexpr double spacing = 44e3;
    std::vector<double> tones;
    tones.reserve(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) tones.push_back(center + (k - (count - 1) / 2.0) * spacing);
    return tones;
}

double trapezoid_subpulse_psd(double f, double symbol_period_s, double chip_period_s) {
    // G0 = T_sym sinc(pi f T_sym) * sinc(pi f T_C): a T_sym rectangle convolved
    // with a unit-area T_C rectangle.
    const double g = symbol_period_s * sinc_unnormalized(kPi * f * symbol_period_s) *
                     sinc_unnormalized(kPi * f * chip_period_s);
    return g * g;
}

double raised_cosine(double f, double symbol_period_s, double rolloff) {
    const double af = std::abs(f);
    const double inner = (1.0 - rolloff) / (2.0 * symbol_period_s);
    const double outer = (1.0 + rolloff) / (2.0 * symbol_period_s);
    if (af <= inner) return 1.0;
    if (af > outer) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * symbol_period_s / rolloff * (af - inner)));
}

SpectrumModel flat_spectrum(double bandwidth_hz) {
    if (!(bandwidth_hz > 0.0)) throw std::invalid_argument("flat spectrum bandwidth must be positive");
    const double half = bandwidth_hz / 2.0;
    SpectrumModel m;
    m.evaluator = [half](double f) { return std::abs(f) <= half ? 1.0 : 0.0; };
    m.support_lo = -half;
    m.support_hi = half;
    m.occupied_lo = -half;
    m.occupied_hi = half;
    return m;
}

SpectrumModel raised_cosine_spectrum(double symbol_period_s, double rolloff) {
    if (!(symbol_period_s > 0.0) || rolloff < 0.0 || rolloff > 1.0)
        throw std::invalid_argument("raised cosine needs T > 0 and roll-off in [0, 1]");
    const double inner = (1.0 - rolloff) / (2.0 * symbol_period_s);
    const double outer = (1.0 + rolloff) / (2.0 * symbol_period_s);
    SpectrumModel m;
    m.evaluator = [symbol_period_s, rolloff](double f) {
        const double g = raised_cosine(f, symbol_period_s, rolloff);
        return g * g;
    };
    m.support_lo = -outer;
    m.support_hi = outer;
    if (rolloff > 0.0 && inner > 0.0) m.breakpoints = {-inner, inner};
    m.occupied_lo = -outer;
    m.occupied_hi = outer;
    return m;
}

SpectrumModel ofdm_spectrum(const OfdmSpec& ofdm) {
    ofdm.validate();
    const int n = ofdm.subcarrier_count;
    const double tsym = ofdm.symbol_period_s;
    const double tc = ofdm.chip_period_s;
    const double spacing = ofdm.subcarrier_spacing_hz;
    const int first = -n / 2 + 1;

    SpectrumModel m;
    m.evaluator = [=](double f) {
        // Sum of |G0(f - iF)|^2 for i = first .. first + n - 1. The sines of
        // pi (f - iF) T_sym and pi (f - iF) T_C advance by fixed rotations.
        const std::complex<double> step_sym = std::polar(1.0, -kPi * spacing * tsym);
        const std::complex<double> step_chip = std::polar(1.0, -kPi * spacing * tc);
        double sum = 0.0;
        std::complex<double> rot_sym, rot_chip;
        for (int k = 0; k < n; ++k) {
            const double x = f - (first + k) * spacing;
            if (k % kRecurrenceReseed == 0) {
                rot_sym = std::polar(1.0, kPi * x * tsym);
                rot_chip = std::polar(1.0, kPi * x * tc);
            }
            double term;
            if (std::abs(x) * tsym < 1e-4) {
                term = trapezoid_subpulse_psd(x, tsym, tc);
            } else {
                const double g = rot_sym.imag() * rot_chip.imag() / (kPi * kPi * x * x * tc);
                term = g * g;
            }
            sum += term;
            rot_sym *= step_sym;
            rot_chip *= step_chip;
        }
        return sum;
    };
    const double band_lo = (first - 0.5) * spacing;
    const double band_hi = (first + n - 0.5) * spacing;
    const double reach = kOfdmTailChipRates / tc;
    m.support_lo = first * spacing - reach;
    m.support_hi = (first + n - 1) * spacing + reach;
    m.panel_width_hz = std::min(spacing, 1.0 / tsym);
    // Averaging sin^2 over both oscillations gives 1/4 per subcarrier.
    m.tail = SpectrumTail{n / (4.0 * std::pow(kPi, 4) * tc * tc), 4.0};
    m.occupied_lo = band_lo;
    m.occupied_hi = band_hi;
    return m;
}

SpectrumModel psd_model(const SignalSpec& spec) {
    spec.validate();
    switch (spec.modulation) {
        case Modulation::Ofdm: return ofdm_spectrum(*spec.ofdm);
        case Modulation::Qpsk:
        case Modulation::SdQpsk: return raised_cosine_spectrum(spec.symbol_period_s, *spec.rolloff);
        case Modulation::FlatSpectrum: return flat_spectrum(spec.channel_bandwidth_hz);
    }
    throw std::invalid_argument("unknown modulation");
}

}  // namespace soop
