#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"
#include "output.hpp"

namespace levylab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;

// Subcommands that run experiments from a config (replay is handled apart).
const std::vector<std::string>& experiment_commands();
// Values accepted by verify --claim.
const std::vector<std::string>& verify_claims();

struct RunRequest {
    std::string command;
    // verify only: A0, A1-1, A1-2, A1-3, e-property or all
    std::string claim = "all";
    std::filesystem::path out_dir = "levylab_out";
};

// Runs one command, writes its CSVs and manifest.toml into out_dir and
// returns the manifest. Errors inside the run are recorded in manifest.error.
RunManifest run_experiment(const ExperimentConfig& cfg, const RunRequest& req, std::ostream& log);

// Reruns a manifest into out_dir and compares every output digest.
// Returns true iff all outputs are byte-identical.
bool replay_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir, std::ostream& log);

// Lower-case file stem for a claim name: "A1-2" -> "a1_2".
std::string claim_file_stem(const std::string& claim);

}  // namespace levylab::cli
