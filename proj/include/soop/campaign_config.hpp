#pragma once

#include <filesystem>
#include <string_view>
#include <vector>

#include "soop/acquisition.hpp"
#include "soop/config.hpp"
#include "soop/scenario.hpp"

namespace soop {

/// Parses a `name,lat_deg,lon_deg,alt_m` site table (header required).
/// Throws config::ConfigError naming the line and column.
std::vector<orbits::GroundSite> parse_sites_csv(std::string_view text, const std::string& source = "<sites>");
std::vector<orbits::GroundSite> load_sites_csv(const std::filesystem::path& path);

/// A scenario config plus the beamwidth sweep it requests. A single
/// beamwidth gives one run; several give one run per value.
struct ScenarioCampaign {
    ScenarioConfig base;
    std::vector<double> beamwidths_deg;
    std::vector<std::filesystem::path> inputs;  // every file read, for the manifest
};

/// Reads `[scenario]` and one `[constellation NAME]` section per
/// constellation. Throws config::ConfigError on missing or invalid fields.
ScenarioCampaign load_scenario_campaign(const config::Document& doc);

/// Reads the optional `[acqsim]` section; absent keys keep the defaults.
acq::AcqConfig load_acq_config(const config::Document& doc);

}  // namespace soop
