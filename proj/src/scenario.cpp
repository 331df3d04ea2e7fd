#include "soop/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "soop/csv.hpp"
#include "soop/gdop.hpp"

namespace soop {

namespace {

constexpr std::size_t kMaxMessages = 20;

struct EpochTally {
    std::size_t propagation_failures = 0;
    std::size_t stale = 0;
    std::size_t singular = 0;
    std::vector<std::string> messages;
};

void note(std::vector<std::string>& messages, std::string text) {
    if (messages.size() < kMaxMessages) messages.push_back(std::move(text));
}

// Groups in order of first appearance.
template <class F>
void for_each_group(const std::vector<GdopSample>& samples, F&& f) {
    std::vector<std::pair<std::string, std::string>> order;
    std::map<std::pair<std::string, std::string>, std::vector<const GdopSample*>> groups;
    for (const GdopSample& s : samples) {
        auto key = std::pair{s.site, s.constellation};
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) order.push_back(key);
        it->second.push_back(&s);
    }
    for (const auto& key : order) f(key.first, key.second, groups[key]);
}

}  // namespace

void ScenarioConfig::validate() const {
    if (constellations.empty()) throw std::invalid_argument("constellations: at least one TLE source is required");
    for (const auto& c : constellations) {
        if (c.name.empty()) throw std::invalid_argument("constellations: empty constellation name");
        if (c.tle_paths.empty()) throw std::invalid_argument("constellations: '" + c.name + "' has no TLE path");
    }
    if (sites.empty()) throw std::invalid_argument("sites: at least one ground site is required");
    for (const auto& s : sites) {
        if (std::abs(s.latitude_deg) > 90.0 || !std::isfinite(s.latitude_deg))
            throw std::invalid_argument("sites: latitude of '" + s.name + "' outside [-90, 90]");
        if (!std::isfinite(s.longitude_deg) || !std::isfinite(s.altitude_m))
            throw std::invalid_argument("sites: non-finite coordinate for '" + s.name + "'");
    }
    if (!(start < end)) throw std::invalid_argument("start/end: start must precede end");
    if (!(step_s > 0.0) || !std::isfinite(step_s)) throw std::invalid_argument("step_s: must be positive");
    rule.validate();
    if (!(propagation.max_staleness_days > 0.0))
        throw std::invalid_argument("max_staleness_days: must be positive");
}

std::vector<UtcTime> ScenarioConfig::epoch_grid() const {
    const auto step = std::chrono::nanoseconds{std::llround(step_s * 1e9)};
    if (step.count() <= 0) throw std::invalid_argument("step_s: below one nanosecond");
    std::vector<UtcTime> grid;
    for (UtcTime t = start; t <= end; t += step) grid.push_back(t);
    return grid;
}

std::vector<Constellation> load_constellations(const ScenarioConfig& config) {
    std::vector<Constellation> out;
    for (const auto& source : config.constellations) {
        Constellation c{source.name, {}};
        for (const auto& path : source.tle_paths) {
            auto parsed = orbits::load_tle_file(path);
            for (auto& e : parsed.records) c.satellites.push_back(std::move(e));
        }
        out.push_back(std::move(c));
    }
    return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config, const std::vector<Constellation>& constellations,
                            Execution execution) {
    config.validate();
    std::vector<orbits::GroundSite> sites = config.sites;
    for (auto& s : sites) s.validate_and_normalize();
    std::vector<Vec3> site_xyz, site_up;
    for (const auto& s : sites) {
        site_xyz.push_back(orbits::site_ecef(s));
        site_up.push_back(orbits::enu_basis(s.latitude_deg, s.longitude_deg).up);
    }

    const std::vector<UtcTime> grid = config.epoch_grid();
    const std::size_t n_epochs = grid.size();
    const std::size_t n_sites = sites.size();

    ScenarioResult result;
    result.samples.reserve(constellations.size() * n_sites * n_epochs);

    for (const Constellation& c : constellations) {
        std::vector<orbits::Propagator> props;
        props.reserve(c.satellites.size());
        for (const auto& e : c.satellites) {
            try {
                props.emplace_back(e, config.propagation);
            } catch (const std::exception& ex) {
                ++result.diagnostics.init_failures;
                note(result.diagnostics.messages, c.name + ": " + ex.what());
            }
        }

        // [epoch][site]
        std::vector<GdopSample> block(n_epochs * n_sites);
        std::vector<EpochTally> tallies(n_epochs);

        auto run_epoch = [&](long long ei) {
            const UtcTime t = grid[ei];
            EpochTally& tally = tallies[ei];
            const double gmst = orbits::gmst_rad(t);
            std::vector<Vec3> sat_xyz;
            sat_xyz.reserve(props.size());
            for (const auto& p : props) {
                try {
                    const orbits::SatelliteState st = p.propagate(t);
                    if (st.stale) ++tally.stale;
                    sat_xyz.push_back(orbits::teme_to_ecef(st.position_eci_m, gmst));
                } catch (const std::exception& ex) {
                    ++tally.propagation_failures;
                    note(tally.messages, c.name + " @ " + format_rfc3339(t) + ": " + ex.what());
                }
            }
            std::vector<Vec3> visible;
            for (std::size_t si = 0; si < n_sites; ++si) {
                visible.clear();
                for (const Vec3& sat : sat_xyz) {
                    // Cheap horizon cut before the full look-angle computation.
                    if (dot(sat - site_xyz[si], site_up[si]) < 0.0) continue;
                    const auto look = orbits::look_angles(sites[si], sat);
                    if (look.elevation_deg < config.rule.masking_angle_deg) continue;
                    if (orbits::is_visible(look.elevation_deg, orbits::off_nadir_angle(sat, site_xyz[si]), config.rule))
                        visible.push_back(sat);
                }
                GdopSample& s = block[static_cast<std::size_t>(ei) * n_sites + si];
                s.epoch = t;
                s.site = sites[si].name;
                s.constellation = c.name;
                s.visible_count = static_cast<int>(visible.size());
                if (visible.size() >= 4) {
                    try {
                        s.gdop = gdop(geometry_matrix(site_xyz[si], visible)).gdop;
                    } catch (const SingularGeometry&) {
                        ++tally.singular;
                    }
                }
            }
        };

        const long long count = static_cast<long long>(n_epochs);
        if (execution == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic, 4)
            for (long long ei = 0; ei < count; ++ei) run_epoch(ei);
        } else {
            for (long long ei = 0; ei < count; ++ei) run_epoch(ei);
        }

        for (const EpochTally& t : tallies) {
            result.diagnostics.propagation_failures += t.propagation_failures;
            result.diagnostics.stale_states += t.stale;
            result.diagnostics.singular_epochs += t.singular;
            for (const auto& m : t.messages) note(result.diagnostics.messages, m);
        }
        for (std::size_t si = 0; si < n_sites; ++si)
            for (std::size_t ei = 0; ei < n_epochs; ++ei) result.samples.push_back(std::move(block[ei * n_sites + si]));
    }
    return result;
}

ScenarioResult run_scenario(const ScenarioConfig& config, Execution execution) {
    config.validate();
    return run_scenario(config, load_constellations(config), execution);
}

std::vector<CcdfPoint> ccdf(const std::vector<int>& counts) {
    if (counts.empty()) throw std::invalid_argument("ccdf of an empty sample");
    const int max = *std::max_element(counts.begin(), counts.end());
    if (*std::min_element(counts.begin(), counts.end()) < 0) throw std::invalid_argument("ccdf of negative counts");
    std::vector<std::size_t> hist(static_cast<std::size_t>(max) + 1, 0);
    for (int c : counts) ++hist[static_cast<std::size_t>(c)];
    std::vector<CcdfPoint> out;
    std::size_t above = counts.size();
    const double total = static_cast<double>(counts.size());
    for (int n = 0; n <= max; ++n) {
        above -= hist[static_cast<std::size_t>(n)];
        out.push_back({n, static_cast<double>(above) / total});
    }
    return out;
}

std::vector<CdfPoint> cdf(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("cdf of an empty sample");
    std::sort(values.begin(), values.end());
    std::vector<CdfPoint> out;
    const double total = static_cast<double>(values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        if (i + 1 == values.size() || values[i + 1] != values[i])
            out.push_back({values[i], static_cast<double>(i + 1) / total});
    return out;
}

Summary summarize(const std::vector<double>& values) {
    if (values.empty()) throw std::invalid_argument("summary of an empty sample");
    const double n = static_cast<double>(values.size());
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0};
}

std::vector<SiteSummary> summarize_samples(const std::vector<GdopSample>& samples) {
    std::vector<SiteSummary> out;
    for_each_group(samples, [&](const std::string& site, const std::string& cons,
                                const std::vector<const GdopSample*>& group) {
        std::vector<double> g;
        for (const GdopSample* s : group)
            if (s->gdop) g.push_back(*s->gdop);
        SiteSummary row{site, cons, std::nullopt, 0.0, group.size()};
        if (!g.empty()) row.gdop = summarize(g);
        row.pct_epochs_with_fix = 100.0 * static_cast<double>(g.size()) / static_cast<double>(group.size());
        out.push_back(std::move(row));
    });
    return out;
}

double fix_availability(const std::vector<GdopSample>& samples, const std::string& site,
                        const std::string& constellation) {
    std::size_t total = 0, fixed = 0;
    for (const GdopSample& s : samples) {
        if (s.site != site || s.constellation != constellation) continue;
        ++total;
        if (s.visible_count >= 4) ++fixed;
    }
    if (total == 0) throw std::invalid_argument("no samples for " + site + " / " + constellation);
    return static_cast<double>(fixed) / static_cast<double>(total);
}

void write_samples_csv(std::ostream& out, const std::vector<GdopSample>& samples) {
    out << "epoch_utc,site,constellation,visible_count,gdop\n";
    for (const GdopSample& s : samples)
        out << format_rfc3339(s.epoch) << ',' << s.site << ',' << s.constellation << ',' << s.visible_count << ','
            << csv::number(s.gdop) << '\n';
}

void write_ccdf_csv(std::ostream& out, const std::vector<GdopSample>& samples) {
    out << "site,constellation,N,p_exceed\n";
    for_each_group(samples, [&](const std::string& site, const std::string& cons,
                                const std::vector<const GdopSample*>& group) {
        std::vector<int> counts;
        for (const GdopSample* s : group) counts.push_back(s->visible_count);
        for (const CcdfPoint& p : ccdf(counts))
            out << site << ',' << cons << ',' << p.n << ',' << csv::number(p.p_exceed) << '\n';
    });
}

void write_gdop_cdf_csv(std::ostream& out, const std::vector<GdopSample>& samples) {
    out << "site,constellation,gdop,p\n";
    for_each_group(samples, [&](const std::string& site, const std::string& cons,
                                const std::vector<const GdopSample*>& group) {
        std::vector<double> g;
        for (const GdopSample* s : group)
            if (s->gdop) g.push_back(*s->gdop);
        if (g.empty()) return;
        for (const CdfPoint& p : cdf(g))
            out << site << ',' << cons << ',' << csv::number(p.x) << ',' << csv::number(p.p) << '\n';
    });
}

void write_summary_csv(std::ostream& out, const std::vector<GdopSample>& samples) {
    out << "site,constellation,mean_gdop,std_gdop,pct_epochs_with_fix\n";
    for (const SiteSummary& s : summarize_samples(samples)) {
        out << s.site << ',' << s.constellation << ',';
        if (s.gdop)
            out << csv::number(s.gdop->mean) << ',' << csv::number(s.gdop->std);
        else
            out << ',';
        out << ',' << csv::number(s.pct_epochs_with_fix) << '\n';
    }
}

}  // namespace soop
