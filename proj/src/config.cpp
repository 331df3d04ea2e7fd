#include "soop/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace soop::config {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::string format_message(const std::string& file, std::size_t line, const std::string& field,
                           const std::string& message) {
    std::ostringstream out;
    out << file;
    if (line > 0) out << ':' << line;
    out << ": ";
    if (!field.empty()) out << "'" << field << "': ";
    out << message;
    return out.str();
}

std::optional<double> to_double(std::string_view text) {
    const std::string s(trim(text));
    if (s.empty()) return std::nullopt;
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = text.find(',', pos);
        const std::string_view item = trim(text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos));
        out.emplace_back(item);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

}  // namespace

ConfigError::ConfigError(const std::string& file, std::size_t line, const std::string& field,
                         const std::string& message)
    : std::runtime_error(format_message(file, line, field, message)), field_(field), line_(line) {}

const Entry* Section::find(std::string_view key) const {
    for (const Entry& e : entries)
        if (e.key == key) return &e;
    return nullptr;
}

Document Document::parse(std::string_view text, std::string source_name) {
    Document doc;
    doc.source_ = std::move(source_name);
    doc.base_dir_ = std::filesystem::current_path();
    doc.sections_.push_back(Section{});

    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
        const std::string_view line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(doc.source_, line_no, "", "unterminated section header");
            const std::string_view inner = trim(line.substr(1, line.size() - 2));
            if (inner.empty()) throw ConfigError(doc.source_, line_no, "", "empty section name");
            Section s;
            const auto space = inner.find_first_of(" \t");
            s.name = std::string(inner.substr(0, space));
            if (space != std::string_view::npos) s.argument = std::string(trim(inner.substr(space)));
            s.line = line_no;
            doc.sections_.push_back(std::move(s));
            seen.clear();
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(doc.source_, line_no, "", "expected 'key = value'");
        const std::string key(trim(line.substr(0, eq)));
        if (key.empty()) throw ConfigError(doc.source_, line_no, "", "missing key before '='");
        if (!seen.insert(key).second) throw ConfigError(doc.source_, line_no, key, "duplicate key");
        doc.sections_.back().entries.push_back({key, std::string(trim(line.substr(eq + 1))), line_no});
    }
    return doc;
}

Document Document::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), 0, "", "cannot open configuration file");
    std::ostringstream buf;
    buf << in.rdbuf();
    Document doc = parse(buf.str(), path.string());
    doc.base_dir_ = std::filesystem::absolute(path).parent_path();
    return doc;
}

const Section* Document::section(std::string_view name) const {
    for (const Section& s : sections_)
        if (s.name == name) return &s;
    return nullptr;
}

std::vector<const Section*> Document::sections_named(std::string_view name) const {
    std::vector<const Section*> out;
    for (const Section& s : sections_)
        if (s.name == name) out.push_back(&s);
    return out;
}

const Section& Document::require_section(std::string_view name) const {
    if (const Section* s = section(name)) return *s;
    throw ConfigError(source_, 0, std::string(name), "missing section [" + std::string(name) + "]");
}

void Document::fail(const Section& s, std::string_view key, const std::string& message) const {
    const Entry* e = s.find(key);
    throw ConfigError(source_, e ? e->line : s.line, std::string(key), message);
}

std::optional<std::string> Document::find_string(const Section& s, std::string_view key) const {
    if (const Entry* e = s.find(key)) return e->value;
    return std::nullopt;
}

std::string Document::get_string(const Section& s, std::string_view key) const {
    if (auto v = find_string(s, key)) return *v;
    fail(s, key, "missing required key in [" + s.name + (s.argument.empty() ? "" : " " + s.argument) + "]");
}

std::optional<double> Document::find_double(const Section& s, std::string_view key) const {
    const Entry* e = s.find(key);
    if (!e) return std::nullopt;
    if (auto v = to_double(e->value)) return v;
    fail(s, key, "expected a number, got '" + e->value + "'");
}

double Document::get_double(const Section& s, std::string_view key) const {
    get_string(s, key);
    return *find_double(s, key);
}

std::optional<long long> Document::find_int(const Section& s, std::string_view key) const {
    const Entry* e = s.find(key);
    if (!e) return std::nullopt;
    const std::string v(trim(e->value));
    char* end = nullptr;
    errno = 0;
    const long long out = std::strtoll(v.c_str(), &end, 10);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE)
        fail(s, key, "expected an integer, got '" + e->value + "'");
    return out;
}

long long Document::get_int(const Section& s, std::string_view key) const {
    get_string(s, key);
    return *find_int(s, key);
}

std::vector<double> Document::get_double_list(const Section& s, std::string_view key) const {
    const std::string text = get_string(s, key);
    try {
        return parse_range(text);
    } catch (const std::invalid_argument& e) {
        fail(s, key, e.what());
    }
}

std::filesystem::path Document::get_path(const Section& s, std::string_view key, bool must_exist) const {
    const std::string text = get_string(s, key);
    if (text.empty()) fail(s, key, "empty path");
    std::filesystem::path p(text);
    if (p.is_relative()) p = base_dir_ / p;
    p = p.lexically_normal();
    if (must_exist && !std::filesystem::exists(p)) fail(s, key, "file not found: " + p.string());
    return p;
}

std::vector<std::filesystem::path> Document::get_path_list(const Section& s, std::string_view key,
                                                           bool must_exist) const {
    std::vector<std::filesystem::path> out;
    for (const std::string& item : split_list(get_string(s, key))) {
        if (item.empty()) fail(s, key, "empty entry in path list");
        std::filesystem::path p(item);
        if (p.is_relative()) p = base_dir_ / p;
        p = p.lexically_normal();
        if (must_exist && !std::filesystem::exists(p)) fail(s, key, "file not found: " + p.string());
        out.push_back(std::move(p));
    }
    return out;
}

std::string Document::canonical() const {
    std::ostringstream out;
    for (const Section& s : sections_) {
        if (s.name.empty() && s.entries.empty()) continue;
        if (!s.name.empty()) out << '[' << s.name << (s.argument.empty() ? "" : " " + s.argument) << "]\n";
        for (const Entry& e : s.entries) out << e.key << " = " << e.value << '\n';
    }
    return out.str();
}

std::vector<double> parse_range(std::string_view text) {
    const std::string_view t = trim(text);
    if (t.empty()) throw std::invalid_argument("empty list");
    std::vector<double> out;
    if (t.find(':') != std::string_view::npos) {
        std::vector<double> parts;
        std::size_t pos = 0;
        while (true) {
            const std::size_t colon = t.find(':', pos);
            const auto v = to_double(t.substr(pos, colon == std::string_view::npos ? t.npos : colon - pos));
            if (!v) throw std::invalid_argument("malformed range '" + std::string(t) + "'");
            parts.push_back(*v);
            if (colon == std::string_view::npos) break;
            pos = colon + 1;
        }
        if (parts.size() != 3) throw std::invalid_argument("range must be 'start:stop:step'");
        const double a = parts[0], b = parts[1], step = parts[2];
        if (!(step > 0.0) || b < a) throw std::invalid_argument("range needs start <= stop and step > 0");
        const auto n = static_cast<long long>(std::floor((b - a) / step + 1e-9));
        if (n > 10'000'000) throw std::invalid_argument("range has too many points");
        for (long long k = 0; k <= n; ++k) out.push_back(a + static_cast<double>(k) * step);
        return out;
    }
    for (const std::string& item : split_list(t)) {
        const auto v = to_double(item);
        if (!v) throw std::invalid_argument("malformed number '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

}  // namespace soop::config
