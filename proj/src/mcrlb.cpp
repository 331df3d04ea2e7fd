#include "soop/mcrlb.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace soop {

namespace {

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(what) + " must be positive and finite");
}

BoundResult from_variance(double variance) {
    BoundResult r;
    r.variance = variance;
    r.std_native = std::sqrt(variance);
    return r;
}

}  // namespace

CnDensity CnDensity::from_dbhz(double value_dbhz) {
    if (!std::isfinite(value_dbhz)) throw std::invalid_argument("C/N0 must be finite");
    return CnDensity{value_dbhz};
}

double CnDensity::linear() const { return std::pow(10.0, value_dbhz_ / 10.0); }

ArrayGeometry ArrayGeometry::from_length(int element_count, double length_m) {
    if (element_count < 2) throw std::invalid_argument("array needs at least two elements");
    ArrayGeometry g{element_count, length_m, length_m / (element_count - 1)};
    g.validate();
    return g;
}

ArrayGeometry ArrayGeometry::from_spacing(int element_count, double spacing_m) {
    if (element_count < 2) throw std::invalid_argument("array needs at least two elements");
    ArrayGeometry g{element_count, spacing_m * (element_count - 1), spacing_m};
    g.validate();
    return g;
}

void ArrayGeometry::validate() const {
    if (element_count < 2) throw std::invalid_argument("array needs at least two elements");
    require_positive(spacing_m, "array spacing");
    const double expected = spacing_m * (element_count - 1);
    if (std::abs(length_m - expected) > 1e-12 * expected)
        throw std::invalid_argument("array length must equal spacing * (M - 1)");
}

double nmsb_numeric(const SpectrumModel& spectrum, double symbol_period_s, const QuadratureOptions& options) {
    require_positive(symbol_period_s, "symbol period");
    if (!spectrum.evaluator) throw std::invalid_argument("spectrum model has no evaluator");
    if (!(spectrum.support_hi > spectrum.support_lo)) throw DegenerateSpectrum("degenerate spectrum: empty support");

    const double width = spectrum.support_hi - spectrum.support_lo;
    const double panel = spectrum.panel_width_hz > 0.0 ? spectrum.panel_width_hz : width / 64.0;
    const auto edges = panel_edges(spectrum.support_lo, spectrum.support_hi, spectrum.breakpoints, panel);

    SpectralMoments moments;
    try {
        moments = integrate_moments(spectrum.evaluator, edges, options);
    } catch (const QuadratureError& e) {
        throw DegenerateSpectrum(std::string("degenerate spectrum: ") + e.what());
    }

    double m0 = moments.m0;
    double m2 = moments.m2;
    if (spectrum.tail) {
        // Closed-form integrals of coefficient / |f|^p beyond each support edge.
        const double a = spectrum.tail->coefficient;
        const double p = spectrum.tail->power;
        if (!(p > 3.0)) throw DegenerateSpectrum("degenerate spectrum: tail decays too slowly for a finite moment");
        for (double edge : {std::abs(spectrum.support_lo), std::abs(spectrum.support_hi)}) {
            m0 += a * std::pow(edge, 1.0 - p) / (p - 1.0);
            m2 += a * std::pow(edge, 3.0 - p) / (p - 3.0);
        }
    }

    if (!(m0 > 0.0) || !std::isfinite(m0) || !std::isfinite(m2))
        throw DegenerateSpectrum("degenerate spectrum: zero or non-finite spectral energy");
    return symbol_period_s * symbol_period_s * m2 / m0;
}

double nmsb_ofdm_closed_form(const OfdmSpec& ofdm) {
    ofdm.validate();
    const double t = ofdm.symbol_period_s;
    const double tc = ofdm.chip_period_s;
    const double f = ofdm.subcarrier_spacing_hz;
    const double n = ofdm.subcarrier_count;
    const double two_pi = 2.0 * kPi;

    // Sub-pulse term: second over zeroth moment of the trapezoid,
    // (2 / T_C) / (2 pi)^2 over (T_sym - T_C / 3).
    const double subpulse = (2.0 / tc) / (two_pi * two_pi) / (t - tc / 3.0);
    const double spread = (f * n) * (f * n) / 12.0 + f * f / 6.0;
    const double xi = t * t * (subpulse + spread);
    if (!(xi > 0.0) || !std::isfinite(xi)) throw InconsistentOfdm("inconsistent OFDM parameters: non-positive xi");
    return xi;
}

double nmsb_for(const SignalSpec& spec, const QuadratureOptions& options) {
    spec.validate();
    if (spec.modulation == Modulation::Ofdm) return nmsb_ofdm_closed_form(*spec.ofdm);
    return nmsb_numeric(psd_model(spec), spec.symbol_period_s, options);
}

BoundResult mcrlb_delay(double xi, double symbol_period_s, double obs_time_s, CnDensity cn0, LightSpeed light) {
    if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("xi must be positive");
    require_positive(symbol_period_s, "symbol period");
    require_positive(obs_time_s, "observation time");
    const double variance =
        symbol_period_s * symbol_period_s / (8.0 * kPi * kPi * xi * obs_time_s * cn0.linear());
    BoundResult r = from_variance(variance);
    r.std_range_m = speed_of_light(light) * r.std_native;
    return r;
}

BoundResult mcrlb_phase(double obs_time_s, CnDensity cn0) {
    require_positive(obs_time_s, "observation time");
    return from_variance(1.0 / (2.0 * obs_time_s * cn0.linear()));
}

BoundResult mcrlb_freq(double obs_time_s, CnDensity cn0, std::optional<double> carrier_hz, LightSpeed light) {
    require_positive(obs_time_s, "observation time");
    const double variance = 3.0 / (2.0 * kPi * kPi * obs_time_s * obs_time_s * obs_time_s * cn0.linear());
    BoundResult r = from_variance(variance);
    if (carrier_hz) {
        require_positive(*carrier_hz, "carrier frequency");
        r.std_rangerate_mps = speed_of_light(light) * r.std_native / *carrier_hz;
    }
    return r;
}

BoundResult mcrlb_aoa(const ArrayGeometry& array, double carrier_hz, double beta_rad, double obs_time_s,
                      CnDensity cn0, LightSpeed light) {
    array.validate();
    require_positive(carrier_hz, "carrier frequency");
    require_positive(obs_time_s, "observation time");
    const double s = std::sin(beta_rad);
    if (!std::isfinite(s) || std::abs(s) < 1e-12)
        throw EndfireSingularity("endfire singularity: sin(beta) = 0");

    const double m = array.element_count;
    const double aperture = array.length_m * carrier_hz / speed_of_light(light);
    const double two_pi = 2.0 * kPi;
    const double denom =
        two_pi * two_pi * m * cn0.linear() * obs_time_s * ((m + 1.0) / (m - 1.0)) * aperture * aperture * s * s;
    const double variance = 12.0 / denom;
    if (!std::isfinite(variance) || !(denom > 0.0))
        throw EndfireSingularity("endfire singularity: AoA bound overflows");
    return from_variance(variance);
}

double position_accuracy(double sigma_uere_m, double gdop) {
    if (sigma_uere_m < 0.0 || gdop < 0.0) throw std::invalid_argument("UERE and GDOP must be non-negative");
    return sigma_uere_m * gdop;
}

}  // namespace soop
