#include "output.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <openssl/evp.h>
#include <toml.hpp>

namespace levylab::cli {

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string csv_field(const std::string& s) {
    bool quote = s.find_first_of(",\"\n\r") != std::string::npos ||
                 (!s.empty() && (s.front() == ' ' || s.back() == ' ' || s.front() == '#'));
    if (!quote) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_text(const Table& table, const std::string& config_digest) {
    std::string out = "# config_digest=" + config_digest + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += csv_field(cells[i]);
        }
        out += '\n';
    };
    line(table.columns);
    for (const auto& r : table.rows) line(r);
    return out;
}

ClaimSummary ClaimSummary::from(const VerifierReport& rep) {
    ClaimSummary c;
    c.claim = rep.claim;
    c.pass = rep.pass;
    c.key_statistic = rep.key_statistic;
    if (!rep.key_statistic.empty() && rep.has(rep.key_statistic)) c.key_value = rep.key_value();
    if (rep.interval) {
        c.has_interval = true;
        c.ci_lo = rep.interval->first;
        c.ci_hi = rep.interval->second;
    }
    c.note = rep.note;
    return c;
}

bool RunManifest::all_pass() const {
    if (!error.empty()) return false;
    for (const auto& c : claims)
        if (!c.pass) return false;
    return true;
}

namespace {

std::string q(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out + "\"";
}

std::string num(double x) {
    std::string s = format_number(x);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

constexpr std::string_view kManifestHeader = "[manifest]\n";

}  // namespace

std::string RunManifest::to_text() const {
    std::ostringstream o;
    o << "# levylab run manifest. The tables before [manifest] are the exact configuration of the run.\n";
    o << config_toml << "\n";
    o << kManifestHeader;
    o << "command = " << q(command) << "\n";
    o << "args = [";
    for (std::size_t i = 0; i < args.size(); ++i) o << (i ? ", " : "") << q(args[i]);
    o << "]\n";
    o << "version = " << q(version) << "\n";
    o << "config_digest = " << q(config_digest) << "\n";
    o << "started_at = " << q(started_at) << "\n";
    o << "wall_time_seconds = " << num(wall_seconds) << "\n";
    o << "workers = " << workers << "\n";
    o << "inner_cutoff = " << num(inner_cutoff) << "\n";
    o << "discarded_small_jump_variance = " << num(discarded_small_jump_variance) << "\n";
    o << "all_pass = " << (all_pass() ? "true" : "false") << "\n";
    if (!error.empty()) o << "error = " << q(error) << "\n";
    if (!diagnostics.empty()) {
        o << "\n[manifest.diagnostics]\n";
        for (const auto& [k, v] : diagnostics) o << k << " = " << num(v) << "\n";
    }
    o << "\n[manifest.outputs]\n";
    for (const auto& [name, digest] : outputs) o << q(name) << " = " << q(digest) << "\n";
    for (const auto& c : claims) {
        o << "\n[[manifest.claims]]\n";
        o << "claim = " << q(c.claim) << "\n";
        o << "pass = " << (c.pass ? "true" : "false") << "\n";
        o << "key_statistic = " << q(c.key_statistic) << "\n";
        o << "key_value = " << num(c.key_value) << "\n";
        if (c.has_interval) o << "ci = [" << num(c.ci_lo) << ", " << num(c.ci_hi) << "]\n";
        if (!c.note.empty()) o << "note = " << q(c.note) << "\n";
    }
    return o.str();
}

ParsedManifest parse_manifest(const std::string& text, const std::string& origin) {
    const std::size_t at = text.find(std::string("\n") + std::string(kManifestHeader));
    if (at == std::string::npos) throw std::runtime_error(origin + ": no [manifest] table");
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        throw std::runtime_error(origin + ":" + std::to_string(e.source().begin.line) + ": " +
                                 std::string(e.description()));
    }
    const toml::table* m = root["manifest"].as_table();
    if (!m) throw std::runtime_error(origin + ": [manifest] is not a table");

    ParsedManifest pm;
    // The config echo is everything before [manifest] minus the leading comment.
    pm.config_toml = text.substr(0, at + 1);
    if (pm.config_toml.rfind("# ", 0) == 0) pm.config_toml.erase(0, pm.config_toml.find('\n') + 1);
    while (pm.config_toml.size() >= 2 && pm.config_toml.compare(pm.config_toml.size() - 2, 2, "\n\n") == 0)
        pm.config_toml.pop_back();

    auto str = [&](const char* key) {
        auto v = (*m)[key].value<std::string>();
        if (!v) throw std::runtime_error(origin + ": manifest." + key + " missing");
        return *v;
    };
    pm.command = str("command");
    pm.config_digest = str("config_digest");
    if (const toml::array* a = (*m)["args"].as_array())
        for (const auto& el : *a)
            if (auto s = el.value<std::string>()) pm.args.push_back(*s);
    if (const toml::table* o = (*m)["outputs"].as_table())
        for (const auto& [k, v] : *o)
            if (auto s = v.value<std::string>()) pm.outputs.emplace(std::string(k.str()), *s);
    return pm;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

OutputDir::OutputDir(std::filesystem::path dir, std::string config_digest)
    : dir_(std::move(dir)), digest_(std::move(config_digest)) {
    std::filesystem::create_directories(dir_);
}

void OutputDir::write_csv(const std::string& name, const Table& table) {
    write_raw(name, csv_text(table, digest_));
}

void OutputDir::write_raw(const std::string& name, const std::string& content) {
    write_file(dir_ / name, content);
    digests_[name] = sha256_hex(content);
}

}  // namespace levylab::cli
