#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "soop_test_cli";

struct Outcome {
    int code;
    std::string err;
    std::string out;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome run(const std::string& args) {
    fs::create_directories(kRoot);
    const fs::path out = kRoot / "stdout.txt", err = kRoot / "stderr.txt";
    const std::string cmd = std::string("\"") + SOOP_CLI + "\" " + args + " >\"" + out.string() + "\" 2>\"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err), slurp(out)};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
    return out;
}

fs::path fresh(const std::string& name) {
    const fs::path p = kRoot / name;
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("catalog dump") {
    const fs::path dir = fresh("catalog");
    REQUIRE(run("catalog --out-dir " + dir.string()).code == 0);
    const auto rows = lines(slurp(dir / "catalog.csv"));
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].rfind("system,carrier_hz", 0) == 0);
    CHECK(rows[1].rfind("Starlink,", 0) == 0);
    CHECK(fs::exists(dir / "manifest.txt"));
}

TEST_CASE("link budget table") {
    const fs::path dir = fresh("linkbudget");
    REQUIRE(run("linkbudget --out-dir " + dir.string()).code == 0);
    const auto rows = lines(slurp(dir / "linkbudget.csv"));
    REQUIRE(rows.size() == 5);
    const auto header = split(rows[0]);
    const auto starlink = split(rows[1]);
    REQUIRE(header.size() == starlink.size());
    CHECK(header[3] == "fspl_db");
    CHECK(std::stod(starlink[3]) == doctest::Approx(168.5).epsilon(0.001));
    CHECK(std::stod(starlink[4]) == doctest::Approx(109.3).epsilon(0.001));
}

TEST_CASE("mcrlb sweep and overrides") {
    const fs::path dir = fresh("mcrlb");
    REQUIRE(run("mcrlb --observable delay --system starlink,oneweb --cn0 40:50:5 --t0 1e-3,2e-3 --out-dir " +
                dir.string())
                .code == 0);
    const auto rows = lines(slurp(dir / "mcrlb.csv"));
    CHECK(rows.size() == 1 + 2 * 3 * 2);

    const fs::path cfg = kRoot / "mcrlb.cfg";
    std::ofstream(cfg) << "[mcrlb]\nobservable = phase\ncn0_dbhz = 30\n";
    const fs::path dir2 = fresh("mcrlb_cfg");
    REQUIRE(run("mcrlb --config " + cfg.string() + " --cn0 35 --system iridium --out-dir " + dir2.string()).code ==
            0);
    const auto rows2 = lines(slurp(dir2 / "mcrlb.csv"));
    REQUIRE(rows2.size() == 2);
    const auto cells = split(rows2[1]);
    CHECK(cells[0] == "phase");
    CHECK(cells[1] == "Iridium");
    CHECK(std::stod(cells[2]) == 35.0);
}

TEST_CASE("outputs are byte-stable across runs") {
    const fs::path a = fresh("stable_a"), b = fresh("stable_b");
    const std::string args = "mcrlb --observable aoa --cn0 20:80:10 --out-dir ";
    REQUIRE(run(args + a.string()).code == 0);
    REQUIRE(run(args + b.string()).code == 0);
    CHECK(slurp(a / "mcrlb.csv") == slurp(b / "mcrlb.csv"));
}

TEST_CASE("usage errors exit with 2") {
    CHECK(run("").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("catalog --no-such-flag").code == 2);
    CHECK(run("mcrlb --observable bogus --out-dir " + fresh("bad1").string()).code == 2);
    CHECK(run("mcrlb --observable delay --cn0 9:1:1 --out-dir " + fresh("bad2").string()).code == 2);
    CHECK(run("mcrlb --observable delay --system globalstar --out-dir " + fresh("bad3").string()).code == 2);
    CHECK(run("acqsim --trials 0").code == 2);
    CHECK(run("scenario --out-dir " + fresh("bad4").string()).code == 2);
    CHECK(run("--version").code == 0);
}

TEST_CASE("configuration errors name the field") {
    const fs::path cfg = kRoot / "missing_tle.cfg";
    std::ofstream(cfg) << "[scenario]\nstart = 2024-04-19T00:00:00Z\nend = 2024-04-19T01:00:00Z\n"
                          "masking_angle_deg = 10\nbeamwidth_deg = 90\nsites = "
                       << (fs::path(SOOP_SOURCE_DIR) / "data" / "sites.csv").string()
                       << "\n[constellation X]\ntle = /nonexistent/x.tle\n";
    const Outcome o = run("scenario --config " + cfg.string() + " --out-dir " + fresh("bad_tle").string());
    CHECK(o.code == 2);
    CHECK(o.err.find("'tle'") != std::string::npos);
    CHECK(o.err.find("missing_tle.cfg:8") != std::string::npos);

    const Outcome absent = run("scenario --config " + (kRoot / "nope.cfg").string());
    CHECK(absent.code == 2);
    CHECK(absent.err.find("--config") != std::string::npos);
}

TEST_CASE("scenario run and rerun reproduce") {
    const fs::path cfg = kRoot / "small.cfg";
    const fs::path data = fs::path(SOOP_SOURCE_DIR) / "data";
    std::ofstream(cfg) << "[scenario]\nstart = 2024-04-19T00:00:00Z\nend = 2024-04-19T02:00:00Z\nstep_s = 120\n"
                          "masking_angle_deg = 10\nbeamwidth_deg = 60, 90\nsites = "
                       << (data / "sites.csv").string() << "\n[constellation Iridium]\ntle = "
                       << (data / "tle" / "iridium.tle").string() << "\n";
    const fs::path dir = fresh("scenario");
    REQUIRE(run("scenario --config " + cfg.string() + " --out-dir " + dir.string()).code == 0);
    for (const char* f : {"phi_60/samples.csv", "phi_90/ccdf.csv", "phi_90/gdop_cdf.csv", "phi_90/summary.csv"})
        CHECK(fs::exists(dir / f));
    const auto manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("subcommand: scenario") != std::string::npos);
    CHECK(manifest.find("iridium.tle") != std::string::npos);

    const Outcome again = run("rerun " + (dir / "manifest.txt").string() + " --out-dir " + fresh("rerun").string());
    CHECK(again.code == 0);
    CHECK(again.out.find("identical: 8 of 8") != std::string::npos);

    // Changing a recorded input is detected before anything is rerun.
    std::ofstream(cfg, std::ios::app) << "# edited\n";
    const Outcome changed =
        run("rerun " + (dir / "manifest.txt").string() + " --out-dir " + fresh("rerun2").string());
    CHECK(changed.code == 1);
    CHECK(changed.err.find("input changed") != std::string::npos);
}

TEST_CASE("acqsim small run and rerun") {
    const fs::path cfg = kRoot / "acq.cfg";
    std::ofstream(cfg) << "[acqsim]\ncn0_grid_dbhz = 60, 80\ntrials_per_point = 4\nrng_seed = 5\n";
    const fs::path dir = fresh("acq");
    REQUIRE(run("acqsim --config " + cfg.string() + " --threads 2 --out-dir " + dir.string()).code == 0);
    const auto results = lines(slurp(dir / "acq_results.csv"));
    CHECK(results.size() == 3);
    CHECK(lines(slurp(dir / "acq_trials.csv")).size() == 9);
    const Outcome again = run("rerun " + (dir / "manifest.txt").string() + " --out-dir " + fresh("acq_rerun").string());
    CHECK(again.code == 0);
    CHECK(again.out.find("identical") == 0);
}

TEST_CASE("delay overlay at 1.33 ms") {
    const fs::path dir = fresh("overlay");
    REQUIRE(run("mcrlb --observable delay --cn0 20:80:5 --t0 1.33e-3 --out-dir " + dir.string()).code == 0);
    std::map<std::string, std::vector<double>> std_m;
    const auto rows = lines(slurp(dir / "mcrlb.csv"));
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto c = split(rows[i]);
        std_m[c[1]].push_back(std::stod(c[6]));
    }
    REQUIRE(std_m.size() == 4);
    for (const auto& [system, values] : std_m) {
        REQUIRE(values.size() == 13);
        for (std::size_t k = 1; k < values.size(); ++k) CHECK(values[k] < values[k - 1]);
    }
    for (std::size_t k = 0; k < 13; ++k)
        for (const char* wide : {"Starlink", "OneWeb"})
            for (const char* narrow : {"Iridium", "Orbcomm"}) CHECK(std_m[wide][k] < std_m[narrow][k]);
}
