#include "soop/manifest.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace soop {

namespace {

// Backslash-escapes newlines so multi-line values fit one manifest line.
std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '\\')
            out += "\\\\";
        else if (c == '\n')
            out += "\\n";
        else
            out += c;
    }
    return out;
}

std::string unescape(const std::string& s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
            out += s[i + 1] == 'n' ? '\n' : s[i + 1];
            ++i;
        } else {
            out += s[i];
        }
    }
    return out;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());

    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 initialisation failed");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);

    std::string hex;
    char byte[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(byte, sizeof byte, "%02x", digest[i]);
        hex += byte;
    }
    return hex;
}

void RunManifest::add_input(const std::filesystem::path& path) {
    input_digests.emplace_back(path.string(), sha256_file(path));
}

std::string RunManifest::render() const {
    std::ostringstream out;
    out << "tool_version: " << tool_version << '\n';
    out << "subcommand: " << subcommand << '\n';
    for (const auto& a : arguments) out << "argument: " << escape(a) << '\n';
    out << "master_seed: " << master_seed << '\n';
    for (const auto& [path, digest] : input_digests) out << "input: " << digest << "  " << escape(path) << '\n';
    for (const auto& o : outputs) out << "output: " << escape(o) << '\n';
    char wall[32];
    std::snprintf(wall, sizeof wall, "%.3f", wall_clock_s);
    out << "wall_clock_s: " << wall << '\n';
    out << "config:\n";
    std::istringstream cfg(config_snapshot);
    for (std::string line; std::getline(cfg, line);) out << "  " << line << '\n';
    return out.str();
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << render();
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read manifest " + path.string());
    RunManifest m;
    m.tool_version.clear();
    bool in_config = false;
    for (std::string line; std::getline(in, line);) {
        if (in_config) {
            if (line.rfind("  ", 0) == 0) {
                m.config_snapshot += line.substr(2) + '\n';
                continue;
            }
            in_config = false;
        }
        const auto colon = line.find(": ");
        const std::string key = line.substr(0, colon == std::string::npos ? line.size() : colon);
        const std::string value = colon == std::string::npos ? std::string{} : line.substr(colon + 2);
        if (key == "config:" || key == "config") {
            in_config = true;
        } else if (key == "tool_version") {
            m.tool_version = value;
        } else if (key == "subcommand") {
            m.subcommand = value;
        } else if (key == "argument") {
            m.arguments.push_back(unescape(value));
        } else if (key == "master_seed") {
            m.master_seed = std::stoull(value);
        } else if (key == "input") {
            const auto sep = value.find("  ");
            if (sep == std::string::npos) throw std::runtime_error("malformed input line in manifest");
            m.input_digests.emplace_back(unescape(value.substr(sep + 2)), value.substr(0, sep));
        } else if (key == "output") {
            m.outputs.push_back(unescape(value));
        } else if (key == "wall_clock_s") {
            m.wall_clock_s = std::stod(value);
        } else if (!line.empty()) {
            throw std::runtime_error("unknown manifest line: " + line);
        }
    }
    if (m.subcommand.empty()) throw std::runtime_error("manifest has no subcommand");
    return m;
}

}  // namespace soop
