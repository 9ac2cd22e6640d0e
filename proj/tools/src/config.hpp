#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "levylab/assumptions.hpp"
#include "levylab/ergodicity.hpp"
#include "levylab/integrator.hpp"
#include "levylab/levy_noise.hpp"
#include "levylab/noise_tests.hpp"
#include "levylab/operators.hpp"

namespace levylab::cli {

// Every violation found in a config, not just the first.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> violations);
    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    std::vector<std::string> violations_;
};

struct OperatorBlock {
    DriftKind kind = DriftKind::PLaplace;
    // p for p_laplace, r for fast_diffusion.
    double exponent = 1.5;
    double delta_reg = DriftOperator::kDefaultRegularization;
    double scale = 1.0;
    std::size_t n = 32;
};

struct NoiseBlock {
    // cylindrical_stable | cylindrical_generic | subordinated_wiener | zero
    std::string kind = "cylindrical_stable";
    double alpha = 1.5;
    // beta_j = 0.1 / j on the first four modes
    std::vector<double> coefficients{0.1, 0.05, 0.1 / 3.0, 0.025};
    std::vector<double> covariance_diag;
    double inner_cutoff = LevyNoiseModel::kDefaultInnerCutoff;
    double subordinator_scale = 1.0;
    // cylindrical_generic only: stable | truncated_stable | tempered_stable
    std::string measure = "tempered_stable";
    // radius (truncated_stable) or rate (tempered_stable)
    double measure_parameter = 1.0;
};

struct SimBlock {
    double horizon = 1.0;
    double max_dt = 1e-2;
    double step_tolerance = 0.05;
    std::optional<double> truncation;  // unset = "full"
    double record_dt = 1e-2;
    StepScheme scheme = StepScheme::ImplicitEuler;
};

struct SeedBlock {
    std::uint64_t master = 0;
    // Only "counter": stream (master, tag) per experiment, child(i) per path.
    std::string policy = "counter";
};

struct InitialBlock {
    // random | sine_mode | zero | values
    std::string kind = "random";
    // H-norm of the random state, amplitude of the sine mode.
    double norm = 1.0;
    std::size_t mode = 1;
    std::vector<double> values;
};

struct ConditionsTask {
    std::size_t samples = 1000;
    std::vector<std::size_t> grid_sizes{8, 32, 128};
    std::vector<double> varpi_grid{1.0, 1.5, 2.0, 2.5, 3.0};
    std::size_t lines = 20;
};

struct A11Task {
    double horizon = 5.0;
    double target = 1e-2;
};

struct A12Task {
    double t = 1.0;
    std::vector<double> ladder{0.5, 0.25, 0.125};
    std::size_t paths = 2000;
};

struct A13Task {
    A13Params params;
    std::vector<double> zeta_grid;
    std::vector<double> t_grid;
};

struct EPropertyTask {
    std::vector<double> t_grid{0.1, 0.5, 1.0};
    std::size_t paths = 1000;
    // ||x - y||_H
    double distance = 1.0;
};

struct AccessTask {
    double kappa = 0.1;
    std::vector<double> times{1.0, 2.0, 4.0, 8.0};
    std::size_t paths = 1000;
    std::size_t min_window = 2;
};

struct ErgodicTask {
    UniquenessParams params;
    // ||x1 - x2||_H
    double distance = 2.0;
};

struct LyapunovTask {
    double theta_hat = 1.0;
    std::vector<double> horizons{10.0, 20.0, 40.0};
    std::size_t paths = 100;
};

struct SimulateTask {
    bool full_state = false;
};

struct ExperimentConfig {
    OperatorBlock op;
    NoiseBlock noise;
    SimBlock sim;
    SeedBlock seed;
    InitialBlock initial;

    SimulateTask simulate;
    NoiseTestParams noise_test;
    ConditionsTask conditions;
    std::size_t a0_samples = 10000;
    A11Task a1_1;
    A12Task a1_2;
    A13Task a1_3;
    EPropertyTask e_property;
    AccessTask access;
    ErgodicTask ergodic;
    LyapunovTask lyapunov;

    // Cross-field checks; empty when valid.
    std::vector<std::string> violations() const;

    DriftOperator make_operator() const;
    NormSuite make_norms() const;
    LevyNoiseModel make_noise() const;
    SimConfig make_sim(std::uint64_t stream_tag) const;
    GridFunction make_initial() const;
    // x + distance * (random unit direction); deterministic in the master seed.
    GridFunction make_partner(const GridFunction& x, double distance, std::uint64_t salt) const;

    // Replaces every path-ensemble size.
    void override_paths(std::size_t paths);
};

// Stream tags for config-derived states (the experiment tags live in rng.hpp).
inline constexpr std::uint64_t kInitialStateTag = 4;
inline constexpr std::uint64_t kPartnerStateTag = 5;

// Parses TOML text. Throws ConfigError listing every problem; syntax errors
// carry "origin:line:column".
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
ExperimentConfig parse_config(const std::filesystem::path& path);

// Canonical TOML for the config: every field, fixed order, round-trip floats.
// parse_config_text(to_toml(c)) reproduces c.
std::string to_toml(const ExperimentConfig& cfg);

}  // namespace levylab::cli
