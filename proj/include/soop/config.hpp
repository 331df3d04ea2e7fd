#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace soop::config {

/// Error carrying the file, line and field it refers to.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& file, std::size_t line, const std::string& field, const std::string& message);
    const std::string& field() const { return field_; }
    std::size_t line() const { return line_; }

private:
    std::string field_;
    std::size_t line_;
};

struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
};

struct Section {
    std::string name;      // e.g. "scenario"
    std::string argument;  // e.g. "Starlink" in [constellation Starlink]
    std::size_t line = 0;
    std::vector<Entry> entries;

    const Entry* find(std::string_view key) const;
};

/// Plain-text configuration:
///
///     # comment
///     [section optional-argument]
///     key = value            # trailing comment
///     list = 30, 40, 50
///
/// Keys before the first section belong to an unnamed section. Duplicate
/// keys within a section are an error.
class Document {
public:
    static Document parse(std::string_view text, std::string source_name = "<string>");
    static Document load(const std::filesystem::path& path);

    const std::string& source() const { return source_; }
    /// Directory used to resolve relative paths (the config file's directory).
    const std::filesystem::path& base_dir() const { return base_dir_; }
    const std::vector<Section>& sections() const { return sections_; }

    const Section* section(std::string_view name) const;
    std::vector<const Section*> sections_named(std::string_view name) const;
    /// Throws ConfigError if the section is absent.
    const Section& require_section(std::string_view name) const;

    std::string get_string(const Section& s, std::string_view key) const;
    std::optional<std::string> find_string(const Section& s, std::string_view key) const;
    double get_double(const Section& s, std::string_view key) const;
    std::optional<double> find_double(const Section& s, std::string_view key) const;
    long long get_int(const Section& s, std::string_view key) const;
    std::optional<long long> find_int(const Section& s, std::string_view key) const;
    std::vector<double> get_double_list(const Section& s, std::string_view key) const;
    /// Resolved against base_dir(); with `must_exist` a missing file is a ConfigError.
    std::filesystem::path get_path(const Section& s, std::string_view key, bool must_exist = true) const;
    std::vector<std::filesystem::path> get_path_list(const Section& s, std::string_view key,
                                                     bool must_exist = true) const;

    [[noreturn]] void fail(const Section& s, std::string_view key, const std::string& message) const;

    /// Canonical `[section arg]` / `key = value` rendering, used in manifests.
    std::string canonical() const;

private:
    std::string source_;
    std::filesystem::path base_dir_;
    std::vector<Section> sections_;
};

/// Parses `a:b:step` or a comma list into values; throws std::invalid_argument.
std::vector<double> parse_range(std::string_view text);

}  // namespace soop::config
