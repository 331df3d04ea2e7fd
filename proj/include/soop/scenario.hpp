#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "soop/orbits.hpp"
#include "soop/parallel.hpp"
#include "soop/time.hpp"

namespace soop {

struct ConstellationSource {
    std::string name;
    std::vector<std::string> tle_paths;
};

struct ScenarioConfig {
    std::vector<ConstellationSource> constellations;
    std::vector<orbits::GroundSite> sites;
    UtcTime start{};
    UtcTime end{};        // inclusive when it falls on the grid
    double step_s = 60.0;
    orbits::VisibilityRule rule;
    std::uint64_t rng_seed = 0;  // reserved for randomized sub-sampling
    orbits::PropagationOptions propagation;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    /// Epochs start, start + step, ... up to and including end.
    std::vector<UtcTime> epoch_grid() const;
};

struct Constellation {
    std::string name;
    std::vector<orbits::OrbitalElements> satellites;
};

/// Loads every constellation's TLE files in order; throws on unreadable or
/// entirely invalid files.
std::vector<Constellation> load_constellations(const ScenarioConfig& config);

struct GdopSample {
    UtcTime epoch{};
    std::string site;
    std::string constellation;
    int visible_count = 0;
    std::optional<double> gdop;  // absent below four satellites or for singular geometry
};

struct ScenarioDiagnostics {
    std::size_t init_failures = 0;         // element sets SGP4 refused
    std::size_t propagation_failures = 0;  // (satellite, epoch) pairs skipped
    std::size_t stale_states = 0;
    std::size_t singular_epochs = 0;
    std::vector<std::string> messages;     // first few, for logging
};

struct ScenarioResult {
    /// Ordered by constellation (config order), then site, then epoch.
    std::vector<GdopSample> samples;
    ScenarioDiagnostics diagnostics;
};

/// Propagates every satellite on the epoch grid, applies the visibility rule
/// at every site and records the visible count and GDOP. Satellites that fail
/// to propagate at an epoch are skipped for that epoch.
ScenarioResult run_scenario(const ScenarioConfig& config, const std::vector<Constellation>& constellations,
                            Execution execution = Execution::Parallel);

/// Convenience overload that loads the constellations named in the config.
ScenarioResult run_scenario(const ScenarioConfig& config, Execution execution = Execution::Parallel);

struct CcdfPoint {
    int n;
    double p_exceed;  // P(count > n)
};

/// Empirical CCDF on n = 0 .. max(count). Throws std::invalid_argument on
/// empty input.
std::vector<CcdfPoint> ccdf(const std::vector<int>& counts);

struct CdfPoint {
    double x;
    double p;  // P(v <= x)
};

/// Empirical CDF at each distinct sorted value. Throws on empty input.
std::vector<CdfPoint> cdf(std::vector<double> values);

struct Summary {
    double mean;
    double std;  // unbiased (n - 1); 0 for a single value
};

Summary summarize(const std::vector<double>& values);

/// Per (site, constellation) aggregate of a sample list.
struct SiteSummary {
    std::string site;
    std::string constellation;
    std::optional<Summary> gdop;
    double pct_epochs_with_fix;
    std::size_t epochs;
};

std::vector<SiteSummary> summarize_samples(const std::vector<GdopSample>& samples);

/// Fraction of a (site, constellation) series whose visible count is >= 4.
double fix_availability(const std::vector<GdopSample>& samples, const std::string& site,
                        const std::string& constellation);

void write_samples_csv(std::ostream& out, const std::vector<GdopSample>& samples);
void write_ccdf_csv(std::ostream& out, const std::vector<GdopSample>& samples);
void write_gdop_cdf_csv(std::ostream& out, const std::vector<GdopSample>& samples);
void write_summary_csv(std::ostream& out, const std::vector<GdopSample>& samples);

}  // namespace soop
