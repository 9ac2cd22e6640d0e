#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "levylab/report.hpp"

namespace levylab::cli {

std::string sha256_hex(std::string_view data);

// RFC 4180 quoting, only where needed.
std::string csv_field(const std::string& s);

// "# config_digest=<hex>", the header row, then the rows; '\n' line ends.
std::string csv_text(const Table& table, const std::string& config_digest);

struct ClaimSummary {
    std::string claim;
    bool pass = false;
    std::string key_statistic;
    double key_value = 0.0;
    bool has_interval = false;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    std::string note;

    static ClaimSummary from(const VerifierReport& rep);
};

struct RunManifest {
    std::string config_toml;
    std::string config_digest;
    std::string command;
    std::vector<std::string> args;
    std::string version;
    std::string started_at;
    double wall_seconds = 0.0;
    std::size_t workers = 1;
    double inner_cutoff = 0.0;
    double discarded_small_jump_variance = 0.0;
    // Free-form numbers, e.g. step statistics of a simulation.
    std::vector<std::pair<std::string, double>> diagnostics;
    std::vector<ClaimSummary> claims;
    std::string error;
    // file name -> sha256 of the whole file
    std::map<std::string, std::string> outputs;

    bool all_pass() const;
    // Config echo first, then a [manifest] table; the echo alone parses as a config.
    std::string to_text() const;
};

struct ParsedManifest {
    std::string config_toml;
    std::string config_digest;
    std::string command;
    std::vector<std::string> args;
    std::map<std::string, std::string> outputs;
};

// Throws std::runtime_error when the text is not a manifest.
ParsedManifest parse_manifest(const std::string& text, const std::string& origin);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& content);

// Collects output files of one run in a directory and records their digests.
class OutputDir {
public:
    OutputDir(std::filesystem::path dir, std::string config_digest);

    const std::filesystem::path& path() const noexcept { return dir_; }
    const std::string& config_digest() const noexcept { return digest_; }

    void write_csv(const std::string& name, const Table& table);
    void write_raw(const std::string& name, const std::string& content);
    const std::map<std::string, std::string>& digests() const noexcept { return digests_; }

private:
    std::filesystem::path dir_;
    std::string digest_;
    std::map<std::string, std::string> digests_;
};

}  // namespace levylab::cli
