#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace soop {

inline constexpr const char* kToolVersion = "0.4.0";

/// SHA-256 of a file's bytes, lowercase hex. Throws std::runtime_error if unreadable.
std::string sha256_file(const std::filesystem::path& path);

/// Record of one CLI run, written as `manifest.txt` next to the outputs.
struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string subcommand;
    std::vector<std::string> arguments;   // argv after the program name
    std::string config_snapshot;          // resolved configuration
    std::vector<std::pair<std::string, std::string>> input_digests;  // path, sha256
    std::vector<std::string> outputs;
    double wall_clock_s = 0.0;
    unsigned long long master_seed = 0;

    void add_input(const std::filesystem::path& path);
    std::string render() const;
    void write(const std::filesystem::path& path) const;

    /// Reads back a rendered manifest (arguments, digests and seed).
    static RunManifest read(const std::filesystem::path& path);
};

}  // namespace soop
