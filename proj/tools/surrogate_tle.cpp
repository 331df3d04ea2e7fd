// Writes Walker-pattern element sets for the constellations used by the
// scenario configs, all with epoch 2024-04-19T00:00:00Z. Shell layouts follow
// the operators' public filings and approximate deployment in April 2024;
// they stand in for a real catalogue snapshot when none is available.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "soop/orbits.hpp"
#include "soop/time.hpp"

namespace {

constexpr double kMuKm3s2 = 398600.8;  // WGS-72
constexpr double kEarthRadiusKm = 6378.135;

struct Shell {
    double inclination_deg;
    double altitude_km;
    int planes;
    int per_plane;
    int phasing;            // Walker F
    double raan_spread_deg;  // 360 for delta patterns, 180 for star patterns
    double bstar;
};

struct Constellation {
    std::string file;
    std::string label;
    int first_id;
    std::vector<Shell> shells;
};

double mean_motion_revday(double altitude_km) {
    const double a = kEarthRadiusKm + altitude_km;
    return std::sqrt(kMuKm3s2 / (a * a * a)) * 86400.0 / (2.0 * 3.14159265358979323846);
}

double wrap360(double deg) {
    double d = std::fmod(deg, 360.0);
    return d < 0.0 ? d + 360.0 : d;
}

std::vector<Constellation> constellations() {
    return {
        {"starlink.tle",
         "STARLINK",
         70000,
         {
             {53.0, 550.0, 72, 20, 1, 360.0, 1.5e-4},
             {53.2, 540.0, 72, 22, 1, 360.0, 1.5e-4},
             {70.0, 570.0, 36, 11, 1, 360.0, 1.5e-4},
             {97.6, 560.0, 6, 38, 1, 360.0, 1.5e-4},
             {43.0, 530.0, 48, 35, 1, 360.0, 2.0e-4},
             {53.0, 525.0, 28, 22, 1, 360.0, 2.0e-4},
         }},
        {"oneweb.tle", "ONEWEB", 77000, {{87.9, 1200.0, 12, 49, 1, 180.0, 1.0e-5}}},
        {"iridium.tle", "IRIDIUM", 78000, {{86.4, 780.0, 6, 11, 2, 180.0, 5.0e-5}}},
        {"orbcomm.tle", "ORBCOMM", 78500, {{47.0, 750.0, 2, 6, 1, 360.0, 5.0e-5}}},
        {"galileo.tle", "GSAT", 79000, {{56.0, 29600.0 - kEarthRadiusKm, 3, 8, 1, 360.0, 0.0}}},
    };
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Write surrogate TLE files for the scenario configs"};
    std::string out_dir = "data/tle";
    std::string epoch_text = "2024-04-19T00:00:00Z";
    app.add_option("--out-dir", out_dir, "Output directory");
    app.add_option("--epoch", epoch_text, "Element epoch (RFC-3339 UTC)");
    CLI11_PARSE(app, argc, argv);

    try {
        const soop::UtcTime epoch = soop::parse_rfc3339(epoch_text);
        std::filesystem::create_directories(out_dir);
        for (const Constellation& c : constellations()) {
            const auto path = std::filesystem::path(out_dir) / c.file;
            std::ofstream out(path, std::ios::binary);
            if (!out) throw std::runtime_error("cannot write " + path.string());
            int id = c.first_id;
            int shell_index = 0;
            for (const Shell& s : c.shells) {
                ++shell_index;
                const int total = s.planes * s.per_plane;
                for (int p = 0; p < s.planes; ++p) {
                    for (int k = 0; k < s.per_plane; ++k) {
                        soop::orbits::OrbitalElements e;
                        e.satellite_id = id++;
                        e.epoch = epoch;
                        e.mean_motion_revday = mean_motion_revday(s.altitude_km);
                        e.eccentricity = 1.0e-4;
                        e.inclination_deg = s.inclination_deg;
                        e.raan_deg = wrap360(p * s.raan_spread_deg / s.planes);
                        e.arg_perigee_deg = 90.0;
                        e.mean_anomaly_deg = wrap360(k * 360.0 / s.per_plane + p * s.phasing * 360.0 / total - 90.0);
                        e.bstar = s.bstar;
                        char name[64];
                        std::snprintf(name, sizeof name, "%s-S%d-P%02d-%02d", c.label.c_str(), shell_index, p + 1,
                                      k + 1);
                        const auto [l1, l2] = soop::orbits::format_tle(e);
                        out << name << '\n' << l1 << '\n' << l2 << '\n';
                    }
                }
            }
            std::cout << path.string() << ": " << id - c.first_id << " element sets\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
