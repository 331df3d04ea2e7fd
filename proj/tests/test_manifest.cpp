#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "soop/manifest.hpp"

using namespace soop;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "soop_test_manifest";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

}  // namespace

TEST_CASE("sha256 of known inputs") {
    const auto abc = scratch("abc.txt");
    write_file(abc, "abc");
    CHECK(sha256_file(abc) == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    const auto empty = scratch("empty.txt");
    write_file(empty, "");
    CHECK(sha256_file(empty) == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    // Longer than one read buffer.
    const auto big = scratch("big.txt");
    write_file(big, std::string(1000000, 'a'));
    CHECK(sha256_file(big) == "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
    CHECK_THROWS_AS(sha256_file(scratch("does-not-exist")), std::runtime_error);
}

TEST_CASE("render and read round trip") {
    const auto input = scratch("input.cfg");
    write_file(input, "[s]\nk = 1\n");
    RunManifest m;
    m.subcommand = "scenario";
    m.arguments = {"scenario", "--config", "/tmp/a b.cfg", "--note", "line1\nline2\\x"};
    m.config_snapshot = "[s]\nk = 1\n";
    m.add_input(input);
    m.outputs = {"samples.csv", "phi_30/ccdf.csv"};
    m.master_seed = 18446744073709551615ull;
    m.wall_clock_s = 1.25;

    const auto path = scratch("manifest.txt");
    m.write(path);
    const RunManifest r = RunManifest::read(path);
    CHECK(r.tool_version == kToolVersion);
    CHECK(r.subcommand == m.subcommand);
    CHECK(r.arguments == m.arguments);
    CHECK(r.config_snapshot == m.config_snapshot);
    CHECK(r.input_digests == m.input_digests);
    CHECK(r.outputs == m.outputs);
    CHECK(r.master_seed == m.master_seed);
    CHECK(r.wall_clock_s == 1.25);
    CHECK(r.render() == m.render());
}

TEST_CASE("malformed manifests are rejected") {
    const auto p = scratch("bad.txt");
    write_file(p, "tool_version: 1\nsurprise: yes\nsubcommand: catalog\n");
    CHECK_THROWS_AS(RunManifest::read(p), std::runtime_error);
    write_file(p, "tool_version: 1\n");
    CHECK_THROWS_AS(RunManifest::read(p), std::runtime_error);
    write_file(p, "subcommand: catalog\ninput: deadbeef\n");
    CHECK_THROWS_AS(RunManifest::read(p), std::runtime_error);
    CHECK_THROWS_AS(RunManifest::read(scratch("absent.txt")), std::runtime_error);
}
