#pragma once

#include <optional>
#include <stdexcept>

#include "soop/constants.hpp"
#include "soop/quadrature.hpp"
#include "soop/signal_catalog.hpp"

namespace soop {

/// Carrier-to-noise density ratio. Held in dB-Hz, evaluated in linear units.
class CnDensity {
public:
    /// Throws std::invalid_argument for a non-finite value.
    static CnDensity from_dbhz(double value_dbhz);

    double dbhz() const { return value_dbhz_; }
    double linear() const;

private:
    explicit CnDensity(double v) : value_dbhz_(v) {}
    double value_dbhz_;
};

struct BoundResult {
    double variance = 0.0;     // s^2, rad^2 or Hz^2
    double std_native = 0.0;   // sqrt(variance)
    std::optional<double> std_range_m;        // delay bounds
    std::optional<double> std_rangerate_mps;  // frequency bound with a carrier
};

/// Uniform linear array: M elements, spacing d, aperture L = d (M - 1).
struct ArrayGeometry {
    int element_count = 0;
    double length_m = 0.0;
    double spacing_m = 0.0;

    static ArrayGeometry from_length(int element_count, double length_m);
    static ArrayGeometry from_spacing(int element_count, double spacing_m);
    void validate() const;
};

class DegenerateSpectrum : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InconsistentOfdm : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class EndfireSingularity : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Normalized mean-square bandwidth xi = T^2 * int f^2 |G|^2 / int |G|^2,
/// integrated numerically over the model's support (plus its analytic tail).
/// Throws DegenerateSpectrum when the zeroth moment vanishes or the
/// quadrature fails to converge.
double nmsb_numeric(const SpectrumModel& spectrum, double symbol_period_s,
                    const QuadratureOptions& options = {});

/// Closed-form xi of the trapezoidal-subcarrier OFDM model, with T = T_sym:
///   xi = T^2 ( (2/T_C) / ((2 pi)^2 (T_sym - T_C/3)) + (F N)^2 / 12 + F^2 / 6 ).
/// Throws InconsistentOfdm if the result is not positive.
double nmsb_ofdm_closed_form(const OfdmSpec& ofdm);

/// xi for a catalog entry: closed form for OFDM, numeric otherwise.
double nmsb_for(const SignalSpec& spec, const QuadratureOptions& options = {});

/// Delay: var = T^2 / (8 pi^2 xi T0 C/N0) [s^2]; std_range_m = c * std.
BoundResult mcrlb_delay(double xi, double symbol_period_s, double obs_time_s, CnDensity cn0,
                        LightSpeed light = LightSpeed::Rounded);

/// Phase: var = 1 / (2 T0 C/N0) [rad^2].
BoundResult mcrlb_phase(double obs_time_s, CnDensity cn0);

/// Frequency: var = 3 / (2 pi^2 T0^3 C/N0) [Hz^2]; with a carrier,
/// std_rangerate_mps = c * std / f_c.
BoundResult mcrlb_freq(double obs_time_s, CnDensity cn0, std::optional<double> carrier_hz = std::nullopt,
                       LightSpeed light = LightSpeed::Rounded);

/// Angle of arrival on a uniform linear array:
///   var = 12 / ((2 pi)^2 M C/N0 T0 (M+1)/(M-1) (L f_c / c)^2 sin^2 beta) [rad^2].
/// Throws EndfireSingularity when sin(beta) vanishes or the bound overflows.
BoundResult mcrlb_aoa(const ArrayGeometry& array, double carrier_hz, double beta_rad, double obs_time_s,
                      CnDensity cn0, LightSpeed light = LightSpeed::Rounded);

/// sigma_pos = sigma_UERE * GDOP.
double position_accuracy(double sigma_uere_m, double gdop);

}  // namespace soop
