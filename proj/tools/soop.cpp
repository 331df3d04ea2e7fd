#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "soop/acquisition.hpp"
#include "soop/campaign_config.hpp"
#include "soop/config.hpp"
#include "soop/csv.hpp"
#include "soop/link_budget.hpp"
#include "soop/manifest.hpp"
#include "soop/mcrlb.hpp"
#include "soop/parallel.hpp"
#include "soop/scenario.hpp"
#include "soop/signal_catalog.hpp"

namespace fs = std::filesystem;
using namespace soop;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string out_dir = ".";
    std::optional<unsigned long long> seed;
    int threads = 0;
    std::string config;
};

void add_common(CLI::App* cmd, Common& c, bool config_required = false) {
    cmd->add_option("--out-dir", c.out_dir, "Directory for outputs (created if missing)");
    cmd->add_option("--seed", c.seed, "Master seed, overriding the config");
    cmd->add_option("--threads", c.threads, "Worker threads (0 = machine default)")->check(CLI::NonNegativeNumber);
    auto* opt = cmd->add_option("--config", c.config, "Configuration file");
    if (config_required) opt->required();
}

// Collects outputs and writes the manifest once the run is complete.
class Run {
public:
    Run(std::string subcommand, const std::vector<std::string>& args, const Common& common)
        : out_dir_(common.out_dir), start_(std::chrono::steady_clock::now()) {
        manifest_.subcommand = std::move(subcommand);
        manifest_.arguments = args;
        fs::create_directories(out_dir_);
    }

    RunManifest& manifest() { return manifest_; }

    std::ofstream open(const std::string& relative) {
        const fs::path p = out_dir_ / relative;
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        manifest_.outputs.push_back(relative);
        return out;
    }

    void finish() {
        manifest_.wall_clock_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        manifest_.write(out_dir_ / "manifest.txt");
    }

private:
    fs::path out_dir_;
    std::chrono::steady_clock::time_point start_;
    RunManifest manifest_;
};

std::optional<config::Document> load_config(const Common& c) {
    if (c.config.empty()) return std::nullopt;
    return config::Document::load(c.config);
}

std::vector<SystemId> parse_systems(const std::string& text) {
    if (text == "all") return {kAllSystems.begin(), kAllSystems.end()};
    std::vector<SystemId> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto id = parse_system(item);
        if (!id) throw UsageError("unknown system '" + item + "'");
        out.push_back(*id);
    }
    return out;
}

std::string format_optional(const std::optional<double>& v) { return csv::number(v); }

// ---------------------------------------------------------------------------

int cmd_catalog(const Common& common, const std::vector<std::string>& args) {
    Run run("catalog", args, common);
    auto out = run.open("catalog.csv");
    out << "system,carrier_hz,bandwidth_hz,channels,symbol_period_s,rolloff,altitude_m,beacon_s,max_duty\n";
    for (SystemId id : kAllSystems) {
        const SignalSpec s = catalog_get(id);
        out << to_string(id) << ',' << csv::number(s.carrier_frequency_hz) << ','
            << csv::number(s.channel_bandwidth_hz) << ',' << s.channel_count << ','
            << csv::number(s.symbol_period_s) << ',' << format_optional(s.rolloff) << ','
            << csv::number(s.altitude_m) << ',' << csv::number(s.beacon_length_s) << ','
            << format_optional(s.max_duty_cycle) << '\n';
    }
    run.finish();
    return kExitOk;
}

int cmd_linkbudget(const Common& common, const std::vector<std::string>& args, const std::string& light_name) {
    const LightSpeed light = light_name == "exact" ? LightSpeed::Exact : LightSpeed::Rounded;
    Run run("linkbudget", args, common);
    const auto doc = load_config(common);
    if (doc) {
        run.manifest().config_snapshot = doc->canonical();
        run.manifest().add_input(common.config);
    }
    auto out = run.open("linkbudget.csv");
    out << "system,altitude_m,carrier_hz,fspl_db,cn0_max_dbhz,cn0_literature_dbhz\n";
    for (SystemId id : kAllSystems) {
        LinkBudgetSpec lb = default_link_budget(id);
        if (doc) {
            for (const config::Section* s : doc->sections_named("system")) {
                if (parse_system(s->argument) != id) continue;
                if (auto v = doc->find_double(*s, "eirp_dbw")) lb.eirp_dbw = *v;
                if (auto v = doc->find_double(*s, "g_over_t_dbk")) lb.g_over_t_dbk = *v;
                if (auto v = doc->find_double(*s, "slant_range_m")) lb.slant_range_m = *v;
                if (auto v = doc->find_double(*s, "carrier_hz")) lb.carrier_hz = *v;
            }
        }
        lb.validate();
        out << to_string(id) << ',' << csv::number(catalog_get(id).altitude_m) << ',' << csv::number(lb.carrier_hz)
            << ',' << csv::number(fspl_db(lb.slant_range_m, lb.carrier_hz, light)) << ','
            << csv::number(cn0_max_dbhz(lb, light)) << ',' << format_optional(literature_cn0_dbhz(id)) << '\n';
    }
    run.finish();
    return kExitOk;
}

struct McrlbOptions {
    std::string observable;
    std::string systems = "all";
    std::string cn0 = "20:80:1";
    std::string t0 = "1.33e-3";
    int elements = 2;
    double length_m = 0.5;
    double beta_deg = 50.0;
    std::string light = "rounded";
};

int cmd_mcrlb(const Common& common, const std::vector<std::string>& args, McrlbOptions o, CLI::App* cmd) {
    Run run("mcrlb", args, common);
    if (const auto doc = load_config(common)) {
        run.manifest().config_snapshot = doc->canonical();
        run.manifest().add_input(common.config);
        if (const config::Section* s = doc->section("mcrlb")) {
            // Command-line flags take precedence over the file.
            auto take = [&](const char* flag, const char* key, auto& field) {
                if (cmd->count(flag) > 0) return;
                if constexpr (std::is_same_v<std::decay_t<decltype(field)>, std::string>) {
                    if (auto v = doc->find_string(*s, key)) field = *v;
                } else if constexpr (std::is_same_v<std::decay_t<decltype(field)>, int>) {
                    if (auto v = doc->find_int(*s, key)) field = static_cast<int>(*v);
                } else {
                    if (auto v = doc->find_double(*s, key)) field = *v;
                }
            };
            take("--observable", "observable", o.observable);
            take("--system", "system", o.systems);
            take("--cn0", "cn0_dbhz", o.cn0);
            take("--t0", "obs_time_s", o.t0);
            take("--elements", "elements", o.elements);
            take("--length", "length_m", o.length_m);
            take("--beta", "beta_deg", o.beta_deg);
            take("--light", "light", o.light);
        }
    }
    if (o.observable != "delay" && o.observable != "phase" && o.observable != "freq" && o.observable != "aoa")
        throw UsageError("invalid observable '" + o.observable + "' (expected delay, phase, freq or aoa)");
    if (o.light != "rounded" && o.light != "exact") throw UsageError("--light must be 'rounded' or 'exact'");
    const LightSpeed light = o.light == "exact" ? LightSpeed::Exact : LightSpeed::Rounded;
    const double c = speed_of_light(light);

    std::vector<double> cn0_grid, t0_grid;
    try {
        cn0_grid = config::parse_range(o.cn0);
        t0_grid = config::parse_range(o.t0);
    } catch (const std::invalid_argument& e) {
        throw UsageError(std::string("invalid range: ") + e.what());
    }
    for (double t : t0_grid)
        if (!(t > 0.0)) throw UsageError("observation times must be positive");
    const auto systems = parse_systems(o.systems);

    auto out = run.open("mcrlb.csv");
    out << "observable,system,cn0_dbhz,obs_time_s,variance,std_native,std_converted\n";
    for (SystemId id : systems) {
        const SignalSpec spec = catalog_get(id);
        const double xi = o.observable == "delay" ? nmsb_for(spec) : 0.0;
        const double wavelength = c / spec.carrier_frequency_hz;
        std::optional<ArrayGeometry> array;
        if (o.observable == "aoa") array = ArrayGeometry::from_length(o.elements, o.length_m);
        for (double t0 : t0_grid) {
            for (double cn0_db : cn0_grid) {
                const CnDensity cn0 = CnDensity::from_dbhz(cn0_db);
                BoundResult r;
                double converted = 0.0;
                if (o.observable == "delay") {
                    r = mcrlb_delay(xi, spec.symbol_period_s, t0, cn0, light);
                    converted = *r.std_range_m;
                } else if (o.observable == "phase") {
                    r = mcrlb_phase(t0, cn0);
                    converted = r.std_native * wavelength / (2.0 * kPi);
                } else if (o.observable == "freq") {
                    r = mcrlb_freq(t0, cn0, spec.carrier_frequency_hz, light);
                    converted = *r.std_rangerate_mps;
                } else {
                    r = mcrlb_aoa(*array, spec.carrier_frequency_hz, o.beta_deg * kDegToRad, t0, cn0, light);
                    converted = r.std_native * kRadToDeg;
                }
                out << o.observable << ',' << to_string(id) << ',' << csv::number(cn0_db) << ','
                    << csv::number(t0) << ',' << csv::number(r.variance) << ',' << csv::number(r.std_native) << ','
                    << csv::number(converted) << '\n';
            }
        }
    }
    run.finish();
    return kExitOk;
}

std::string beam_dir(double beamwidth) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "phi_%g", beamwidth);
    return buf;
}

int cmd_scenario(const Common& common, const std::vector<std::string>& args) {
    const auto doc = config::Document::load(common.config);
    ScenarioCampaign campaign = load_scenario_campaign(doc);
    if (common.seed) campaign.base.rng_seed = *common.seed;

    Run run("scenario", args, common);
    run.manifest().config_snapshot = doc.canonical();
    run.manifest().master_seed = campaign.base.rng_seed;
    run.manifest().add_input(common.config);
    for (const auto& p : campaign.inputs) run.manifest().add_input(p);

    const auto constellations = load_constellations(campaign.base);
    for (const auto& c : constellations)
        std::cerr << c.name << ": " << c.satellites.size() << " element sets\n";

    for (double beam : campaign.beamwidths_deg) {
        ScenarioConfig cfg = campaign.base;
        cfg.rule.beamwidth_deg = beam;
        const ScenarioResult result = run_scenario(cfg, constellations);
        const auto& d = result.diagnostics;
        std::cerr << "beamwidth " << beam << " deg: " << result.samples.size() << " samples, " << d.init_failures
                  << " init failures, " << d.propagation_failures << " propagation failures, " << d.stale_states
                  << " stale states, " << d.singular_epochs << " singular geometries\n";
        for (const auto& m : d.messages) std::cerr << "  " << m << '\n';

        const std::string prefix = campaign.beamwidths_deg.size() > 1 ? beam_dir(beam) + "/" : "";
        {
            auto out = run.open(prefix + "samples.csv");
            write_samples_csv(out, result.samples);
        }
        {
            auto out = run.open(prefix + "ccdf.csv");
            write_ccdf_csv(out, result.samples);
        }
        {
            auto out = run.open(prefix + "gdop_cdf.csv");
            write_gdop_cdf_csv(out, result.samples);
        }
        {
            auto out = run.open(prefix + "summary.csv");
            write_summary_csv(out, result.samples);
        }
    }
    run.finish();
    return kExitOk;
}

int cmd_acqsim(const Common& common, const std::vector<std::string>& args, std::optional<int> trials,
               bool write_trials) {
    const auto doc = load_config(common);
    acq::AcqConfig cfg = doc ? load_acq_config(*doc) : load_acq_config(config::Document::parse(""));
    if (common.seed) cfg.rng_seed = *common.seed;
    if (trials) cfg.trials_per_point = *trials;
    cfg.validate();

    Run run("acqsim", args, common);
    run.manifest().master_seed = cfg.rng_seed;
    if (doc) {
        run.manifest().config_snapshot = doc->canonical();
        run.manifest().add_input(common.config);
    }

    const acq::AcqResults results = acq::run_acq_montecarlo(cfg);
    const acq::AcqAnalysis a = acq::analyze(results, cfg);
    {
        auto out = run.open("acq_results.csv");
        acq::write_results_csv(out, results);
    }
    if (write_trials) {
        auto out = run.open("acq_trials.csv");
        acq::write_trials_csv(out, results);
    }
    std::cerr << "knee: " << (a.knee_cn0_dbhz ? std::to_string(*a.knee_cn0_dbhz) + " dB-Hz" : "none")
              << ", high-C/N0 slope " << a.high_cn0_slope << '\n';
    run.finish();
    return kExitOk;
}

// ---------------------------------------------------------------------------

int dispatch(const std::vector<std::string>& args);

std::vector<std::string> replace_out_dir(std::vector<std::string> args, const std::string& out_dir) {
    std::vector<std::string> out;
    bool replaced = false;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--out-dir" && i + 1 < args.size()) {
            out.push_back("--out-dir");
            out.push_back(out_dir);
            ++i;
            replaced = true;
        } else if (args[i].rfind("--out-dir=", 0) == 0) {
            out.push_back("--out-dir=" + out_dir);
            replaced = true;
        } else {
            out.push_back(args[i]);
        }
    }
    if (!replaced) {
        out.push_back("--out-dir");
        out.push_back(out_dir);
    }
    return out;
}

bool same_bytes(const fs::path& a, const fs::path& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) return false;
    return std::equal(std::istreambuf_iterator<char>(fa), std::istreambuf_iterator<char>(),
                      std::istreambuf_iterator<char>(fb), std::istreambuf_iterator<char>());
}

int cmd_rerun(const std::string& manifest_path, const std::string& out_dir) {
    const RunManifest m = RunManifest::read(manifest_path);
    for (const auto& [path, digest] : m.input_digests) {
        if (!fs::exists(path)) throw UsageError("recorded input missing: " + path);
        if (sha256_file(path) != digest) {
            std::cerr << "input changed since the recorded run: " << path << '\n';
            return kExitRuntime;
        }
    }
    const fs::path original = fs::path(manifest_path).parent_path();
    if (fs::exists(out_dir) && fs::equivalent(out_dir, original.empty() ? "." : original))
        throw UsageError("rerun --out-dir must differ from the recorded output directory");

    const int code = dispatch(replace_out_dir(m.arguments, out_dir));
    if (code != kExitOk) return code;

    std::size_t differing = 0;
    for (const auto& rel : m.outputs) {
        if (!same_bytes(original / rel, fs::path(out_dir) / rel)) {
            std::cerr << "differs: " << rel << '\n';
            ++differing;
        }
    }
    std::cout << (differing == 0 ? "identical" : "DIFFERENT") << ": " << m.outputs.size() - differing << " of "
              << m.outputs.size() << " outputs byte-identical\n";
    return differing == 0 ? kExitOk : kExitRuntime;
}

int dispatch(const std::vector<std::string>& args) {
    CLI::App app{"LEO signals-of-opportunity bounds, visibility and acquisition campaigns", "soop"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    Common common;
    auto* catalog = app.add_subcommand("catalog", "Dump the signal catalogue");
    add_common(catalog, common);

    std::string lb_light = "rounded";
    auto* linkbudget = app.add_subcommand("linkbudget", "Path loss and maximum C/N0 per system");
    add_common(linkbudget, common);
    linkbudget->add_option("--light", lb_light, "Speed of light: rounded (3e8) or exact")
        ->check(CLI::IsMember({"rounded", "exact"}));

    McrlbOptions mo;
    auto* mcrlb = app.add_subcommand("mcrlb", "Sweep an MCRLB over C/N0 and observation time");
    add_common(mcrlb, common);
    mcrlb->add_option("--observable", mo.observable, "delay, phase, freq or aoa");
    mcrlb->add_option("--system", mo.systems, "Comma list of systems or 'all'");
    mcrlb->add_option("--cn0", mo.cn0, "C/N0 grid in dB-Hz: start:stop:step or a comma list");
    mcrlb->add_option("--t0", mo.t0, "Observation times in s: start:stop:step or a comma list");
    mcrlb->add_option("--elements", mo.elements, "AoA array elements M");
    mcrlb->add_option("--length", mo.length_m, "AoA array length L in m");
    mcrlb->add_option("--beta", mo.beta_deg, "AoA angle from the array axis in degrees");
    mcrlb->add_option("--light", mo.light, "Speed of light: rounded (3e8) or exact");

    auto* scenario = app.add_subcommand("scenario", "Visibility and GDOP campaign");
    add_common(scenario, common, true);

    std::optional<int> trials;
    bool write_trials = true;
    auto* acqsim = app.add_subcommand("acqsim", "Monte Carlo OFDM delay acquisition against the MCRLB");
    add_common(acqsim, common);
    acqsim->add_option("--trials", trials, "Trials per C/N0 point")->check(CLI::PositiveNumber);
    acqsim->add_flag("!--no-trials", write_trials, "Skip the per-trial dump");

    std::string manifest_path, rerun_out;
    auto* rerun = app.add_subcommand("rerun", "Re-execute a recorded run and compare its outputs byte by byte");
    rerun->add_option("manifest", manifest_path, "manifest.txt of the original run")->required()->check(CLI::ExistingFile);
    rerun->add_option("--out-dir", rerun_out, "Directory for the re-run outputs")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        // Record the config path absolutely so the manifest replays from anywhere.
        std::vector<std::string> recorded = args;
        for (std::size_t i = 0; i + 1 < recorded.size(); ++i)
            if (recorded[i] == "--config") recorded[i + 1] = fs::absolute(recorded[i + 1]).lexically_normal().string();
        if (!common.config.empty() && !fs::exists(common.config))
            throw config::ConfigError(common.config, 0, "--config", "file not found");

        set_thread_count(common.threads);
        if (*catalog) return cmd_catalog(common, recorded);
        if (*linkbudget) return cmd_linkbudget(common, recorded, lb_light);
        if (*mcrlb) return cmd_mcrlb(common, recorded, mo, mcrlb);
        if (*scenario) return cmd_scenario(common, recorded);
        if (*acqsim) return cmd_acqsim(common, recorded, trials, write_trials);
        if (*rerun) return cmd_rerun(manifest_path, rerun_out);
    } catch (const config::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args);
}
