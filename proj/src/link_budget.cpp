#include "soop/link_budget.hpp"

#include <cmath>
#include <stdexcept>

namespace soop {

namespace {

// Path loss printed alongside each system's altitude.
double table_fspl_db(SystemId id) {
    switch (id) {
        case SystemId::Starlink: return 168.5;
        case SystemId::OneWeb: return 174.9;
        case SystemId::Iridium: return 154.5;
        case SystemId::Orbcomm: return 132.7;
    }
    return 0.0;
}

constexpr double kEarthRadiusM = 6371e3;

}  // namespace

void LinkBudgetSpec::validate() const {
    if (!(slant_range_m > 0.0)) throw std::invalid_argument("slant range must be positive");
    if (!(carrier_hz > 0.0)) throw std::invalid_argument("carrier frequency must be positive");
}

double fspl_db(double range_m, double carrier_hz, LightSpeed light) {
    if (!(range_m > 0.0) || !(carrier_hz > 0.0)) throw std::invalid_argument("range and carrier must be positive");
    return 20.0 * std::log10(4.0 * kPi * range_m * carrier_hz / speed_of_light(light));
}

double cn0_max_dbhz(const LinkBudgetSpec& spec, LightSpeed light) {
    spec.validate();
    return spec.eirp_dbw + spec.g_over_t_dbk - fspl_db(spec.slant_range_m, spec.carrier_hz, light) -
           spec.boltzmann_dbwkhz;
}

double reference_cn0_max_dbhz(SystemId id) {
    switch (id) {
        case SystemId::Starlink: return 109.3;
        case SystemId::OneWeb: return 105.53;
        case SystemId::Iridium: return 80.6;
        case SystemId::Orbcomm: return 79.6;
    }
    return 0.0;
}

LinkBudgetSpec default_link_budget(SystemId id) {
    const SignalSpec signal = catalog_get(id);
    LinkBudgetSpec spec;
    spec.eirp_dbw = reference_cn0_max_dbhz(id) + table_fspl_db(id) + kBoltzmannDbWPerKHz;
    spec.g_over_t_dbk = 0.0;
    spec.slant_range_m = signal.altitude_m;
    spec.carrier_hz = signal.carrier_frequency_hz;
    return spec;
}

std::optional<double> literature_cn0_dbhz(SystemId id) {
    switch (id) {
        case SystemId::Starlink: return 42.6;
        case SystemId::OneWeb: return 31.9;
        default: return std::nullopt;
    }
}

double slant_range_m(double altitude_m, double elevation_deg) {
    if (!(altitude_m > 0.0)) throw std::invalid_argument("altitude must be positive");
    if (elevation_deg < 0.0 || elevation_deg > 90.0) throw std::invalid_argument("elevation must lie in [0, 90]");
    const double el = elevation_deg * kDegToRad;
    const double r = kEarthRadiusM;
    const double rs = r + altitude_m;
    return std::sqrt(rs * rs - r * r * std::cos(el) * std::cos(el)) - r * std::sin(el);
}

}  // namespace soop
