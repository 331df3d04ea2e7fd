#pragma once

#include <optional>

#include "soop/constants.hpp"
#include "soop/signal_catalog.hpp"

namespace soop {

struct LinkBudgetSpec {
    double eirp_dbw = 0.0;
    double g_over_t_dbk = 0.0;
    double boltzmann_dbwkhz = kBoltzmannDbWPerKHz;
    double slant_range_m = 0.0;
    double carrier_hz = 0.0;

    void validate() const;
};

/// Free-space path loss 20 log10(4 pi d f / c) in dB.
double fspl_db(double range_m, double carrier_hz, LightSpeed light = LightSpeed::Rounded);

/// Maximum C/N0 in dB-Hz: EIRP + G/T - FSPL - 10 log10(k). No atmospheric,
/// polarization or pointing losses.
double cn0_max_dbhz(const LinkBudgetSpec& spec, LightSpeed light = LightSpeed::Rounded);

/// Per-system defaults with the range set to the orbit altitude.
///
/// Only the resulting C/N0 and path loss are known, so each default
/// carries the sum EIRP + G/T reverse-solved from them
/// (C/N0 + FSPL - 228.601 dB) in `eirp_dbw`, with `g_over_t_dbk` = 0.
LinkBudgetSpec default_link_budget(SystemId id);

/// Reference maximum C/N0 that the defaults were solved from.
double reference_cn0_max_dbhz(SystemId id);

/// Measured C/N0 reported in the literature (Starlink 42.6, OneWeb 31.9 dB-Hz).
std::optional<double> literature_cn0_dbhz(SystemId id);

/// Spherical-Earth slant range to a satellite at `altitude_m` seen at the
/// given elevation; for overriding the altitude-as-range convention.
double slant_range_m(double altitude_m, double elevation_deg);

}  // namespace soop
