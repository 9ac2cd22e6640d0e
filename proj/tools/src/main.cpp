#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "config.hpp"

using namespace levylab::cli;

namespace {

struct CommonFlags {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "levylab_out";
    std::optional<std::size_t> paths;
    bool full_state = false;
    std::string claim = "all";
};

void add_common(CLI::App* sub, CommonFlags& f, bool with_claim) {
    sub->add_option("--config", f.config, "experiment config (TOML)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", f.seed, "override the master seed");
    sub->add_option("--out", f.out, "output directory")->capture_default_str();
    sub->add_option("--paths", f.paths, "override every path-ensemble size")->check(CLI::PositiveNumber);
    sub->add_flag("--full-state", f.full_state, "write the full state in trajectory.csv");
    if (with_claim)
        sub->add_option("--claim", f.claim, "claim to verify")
            ->check(CLI::IsMember(verify_claims()))
            ->capture_default_str();
}

int run(const std::string& command, const CommonFlags& f) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config(f.config);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitFail;
    }
    if (f.seed) cfg.seed.master = *f.seed;
    if (f.paths) cfg.override_paths(*f.paths);
    if (f.full_state) cfg.simulate.full_state = true;
    // Overrides must still leave a valid config.
    if (auto v = cfg.violations(); !v.empty()) {
        std::cerr << ConfigError(v).what() << "\n";
        return kExitFail;
    }

    RunRequest req{command, f.claim, f.out};
    std::cout << command << ": " << f.config << " -> " << f.out << "\n";
    const RunManifest m = run_experiment(cfg, req, std::cout);
    std::cout << "manifest: " << (std::filesystem::path(f.out) / "manifest.toml").string() << " ("
              << m.claims.size() << " claims, " << (m.all_pass() ? "all pass" : "NOT all pass") << ")\n";
    return m.all_pass() ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"levylab: pure-jump Levy-driven monotone SPDE experiments"};
    app.require_subcommand(1);

    CommonFlags flags;
    const std::map<std::string, std::string> about{
        {"simulate", "one full-noise path: trajectory.csv and step statistics"},
        {"noise-test", "statistical checks of the jump sampler"},
        {"verify-conditions", "dissipativity, decay and continuity checks of the drift"},
        {"verify", "assumption checks, selected with --claim"},
        {"access", "probability of reaching a small ball around 0"},
        {"ergodic", "W1 between occupation measures from two starts"},
        {"lyapunov", "growth of the integrated Lyapunov moment"},
        {"all", "every command above in one run"},
    };
    for (const auto& name : experiment_commands()) {
        CLI::App* sub = app.add_subcommand(name, about.at(name));
        add_common(sub, flags, name == "verify");
    }

    std::string manifest;
    std::string replay_out;
    CLI::App* replay = app.add_subcommand("replay", "rerun a manifest and compare output digests");
    replay->add_option("manifest", manifest, "manifest.toml of an earlier run")->required()->check(CLI::ExistingFile);
    replay->add_option("--out", replay_out, "output directory (default: <manifest dir>/replay)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (replay->parsed()) {
            std::filesystem::path out = replay_out.empty()
                                            ? std::filesystem::path(manifest).parent_path() / "replay"
                                            : std::filesystem::path(replay_out);
            const bool same = replay_manifest(manifest, out, std::cout);
            std::cout << (same ? "replay: byte-identical\n" : "replay: outputs differ\n");
            return same ? kExitPass : kExitFail;
        }
        for (CLI::App* sub : app.get_subcommands()) return run(sub->get_name(), flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFail;
    }
    return kExitUsage;
}
