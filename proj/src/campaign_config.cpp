#include "soop/campaign_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace soop {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto comma = line.find(',', pos);
        out.push_back(trim(line.substr(pos, comma == std::string_view::npos ? line.npos : comma - pos)));
        if (comma == std::string_view::npos) return out;
        pos = comma + 1;
    }
}

double to_number(const std::string& text, const std::string& source, std::size_t line, const char* field) {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v))
        throw config::ConfigError(source, line, field, "expected a number, got '" + text + "'");
    return v;
}

}  // namespace

std::vector<orbits::GroundSite> parse_sites_csv(std::string_view text, const std::string& source) {
    std::istringstream in{std::string(text)};
    std::vector<orbits::GroundSite> sites;
    std::size_t line_no = 0;
    bool header = false;
    for (std::string line; std::getline(in, line);) {
        ++line_no;
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        const auto cols = split(line);
        if (!header) {
            if (cols != std::vector<std::string>{"name", "lat_deg", "lon_deg", "alt_m"})
                throw config::ConfigError(source, line_no, "header", "expected 'name,lat_deg,lon_deg,alt_m'");
            header = true;
            continue;
        }
        if (cols.size() != 4) throw config::ConfigError(source, line_no, "", "expected 4 columns");
        if (cols[0].empty()) throw config::ConfigError(source, line_no, "name", "empty site name");
        orbits::GroundSite s{cols[0], to_number(cols[1], source, line_no, "lat_deg"),
                             to_number(cols[2], source, line_no, "lon_deg"),
                             to_number(cols[3], source, line_no, "alt_m")};
        try {
            s.validate_and_normalize();
        } catch (const std::invalid_argument& e) {
            throw config::ConfigError(source, line_no, "lat_deg", e.what());
        }
        sites.push_back(std::move(s));
    }
    if (sites.empty()) throw config::ConfigError(source, line_no, "", "no sites");
    return sites;
}

std::vector<orbits::GroundSite> load_sites_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config::ConfigError(path.string(), 0, "", "cannot open site table");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_sites_csv(buf.str(), path.string());
}

ScenarioCampaign load_scenario_campaign(const config::Document& doc) {
    const config::Section& sc = doc.require_section("scenario");
    ScenarioCampaign c;
    ScenarioConfig& cfg = c.base;

    auto time_field = [&](std::string_view key) {
        try {
            return parse_rfc3339(doc.get_string(sc, key));
        } catch (const std::invalid_argument& e) {
            doc.fail(sc, key, e.what());
        }
    };
    cfg.start = time_field("start");
    cfg.end = time_field("end");
    if (!(cfg.start < cfg.end)) doc.fail(sc, "end", "end must be after start");
    cfg.step_s = doc.find_double(sc, "step_s").value_or(60.0);
    if (!(cfg.step_s > 0.0)) doc.fail(sc, "step_s", "must be positive");
    cfg.rule.masking_angle_deg = doc.get_double(sc, "masking_angle_deg");
    c.beamwidths_deg = doc.get_double_list(sc, "beamwidth_deg");
    for (double b : c.beamwidths_deg)
        if (!(b > 0.0 && b <= 90.0)) doc.fail(sc, "beamwidth_deg", "each beamwidth must lie in (0, 90]");
    cfg.rule.beamwidth_deg = c.beamwidths_deg.front();
    try {
        cfg.rule.validate();
    } catch (const std::invalid_argument& e) {
        doc.fail(sc, "masking_angle_deg", e.what());
    }
    cfg.rng_seed = static_cast<std::uint64_t>(doc.find_int(sc, "rng_seed").value_or(0));
    cfg.propagation.max_staleness_days = doc.find_double(sc, "max_staleness_days").value_or(14.0);

    const auto sites_path = doc.get_path(sc, "sites");
    cfg.sites = load_sites_csv(sites_path);
    c.inputs.push_back(sites_path);

    for (const config::Section* s : doc.sections_named("constellation")) {
        if (s->argument.empty()) throw config::ConfigError(doc.source(), s->line, "constellation", "missing name");
        ConstellationSource src{s->argument, {}};
        for (const auto& p : doc.get_path_list(*s, "tle")) {
            src.tle_paths.push_back(p.string());
            c.inputs.push_back(p);
        }
        cfg.constellations.push_back(std::move(src));
    }
    if (cfg.constellations.empty())
        throw config::ConfigError(doc.source(), 0, "constellation", "at least one [constellation NAME] is required");
    return c;
}

acq::AcqConfig load_acq_config(const config::Document& doc) {
    acq::AcqConfig cfg;
    cfg.cn0_grid_dbhz = config::parse_range("40:90:1");
    const config::Section* s = doc.section("acqsim");
    if (!s) return cfg;

    if (auto v = doc.find_string(*s, "cn0_grid_dbhz")) cfg.cn0_grid_dbhz = doc.get_double_list(*s, "cn0_grid_dbhz");
    if (auto v = doc.find_int(*s, "trials_per_point")) cfg.trials_per_point = static_cast<int>(*v);
    if (auto v = doc.find_int(*s, "sync_symbol_count")) cfg.sync_symbol_count = static_cast<int>(*v);
    if (auto v = doc.find_double(*s, "sample_rate_hz")) cfg.sample_rate_hz = *v;
    if (auto v = doc.find_double(*s, "search_window_s")) cfg.search_window_s = *v;
    if (auto v = doc.find_double(*s, "delay_jitter_s")) cfg.delay_jitter_s = *v;
    if (auto v = doc.find_int(*s, "rng_seed")) cfg.rng_seed = static_cast<std::uint64_t>(*v);
    if (auto v = doc.find_int(*s, "sync_seed")) cfg.sync_seed = static_cast<std::uint64_t>(*v);
    if (auto v = doc.find_int(*s, "correlation_upsampling"))
        cfg.acquisition.correlation_upsampling = static_cast<int>(*v);
    if (auto v = doc.find_string(*s, "delay_draw")) {
        if (*v == "uniform_window")
            cfg.delay_draw = acq::DelayDraw::UniformWindow;
        else if (*v == "centered_jitter")
            cfg.delay_draw = acq::DelayDraw::CenteredJitter;
        else
            doc.fail(*s, "delay_draw", "expected 'uniform_window' or 'centered_jitter'");
    }
    if (auto v = doc.find_string(*s, "refinement")) {
        if (*v == "parabolic")
            cfg.acquisition.refinement = acq::Refinement::Parabolic;
        else if (*v == "nearest")
            cfg.acquisition.refinement = acq::Refinement::Nearest;
        else
            doc.fail(*s, "refinement", "expected 'parabolic' or 'nearest'");
    }
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        throw config::ConfigError(doc.source(), s->line, "acqsim", e.what());
    }
    return cfg;
}

}  // namespace soop
