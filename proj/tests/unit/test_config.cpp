#include <algorithm>
#include <string>

#include <gtest/gtest.h>

#include "config.hpp"

using namespace levylab;
using namespace levylab::cli;

namespace {

const std::string kMinimal = R"(
[operator]
kind = "p_laplace"
)";

// Every violation message of a config text; empty when it parses.
std::vector<std::string> problems(const std::string& text) {
    try {
        (void)parse_config_text(text, "t.toml");
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool any_contains(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Config, MinimalConfigTakesDefaults) {
    const auto cfg = parse_config_text(kMinimal);
    EXPECT_EQ(cfg.op.kind, DriftKind::PLaplace);
    EXPECT_EQ(cfg.op.exponent, 1.5);
    EXPECT_EQ(cfg.op.n, 32u);
    EXPECT_EQ(cfg.noise.kind, "cylindrical_stable");
    EXPECT_FALSE(cfg.sim.truncation.has_value());
    EXPECT_EQ(cfg.sim.scheme, StepScheme::ImplicitEuler);
    EXPECT_TRUE(cfg.violations().empty());
}

TEST(Config, ShippedConfigsParse) {
    for (const char* name : {"plaplace_reference", "fastdiffusion_reference", "heat_oracle", "degenerate_noise"}) {
        const auto cfg = parse_config(std::string(LEVYLAB_CONFIG_DIR) + "/" + name + ".toml");
        EXPECT_TRUE(cfg.violations().empty()) << name;
        EXPECT_NO_THROW((void)cfg.make_noise()) << name;
    }
}

TEST(Config, PAboveTwoNamesTheAdmissibleRange) {
    const auto v = problems("[operator]\nkind = \"p_laplace\"\np = 2.5\n");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("(1,2)"), std::string::npos) << v[0];
    EXPECT_NE(v[0].find("d = 1"), std::string::npos) << v[0];
}

TEST(Config, FastDiffusionExponentRange) {
    EXPECT_TRUE(any_contains(problems("[operator]\nkind = \"fast_diffusion\"\nr = 1.5\n"), "(0,1)"));
    EXPECT_TRUE(problems("[operator]\nkind = \"fast_diffusion\"\nr = 0.5\n").empty());
}

TEST(Config, TruncationBelowTheCutoffIsRejected) {
    const auto v = problems(kMinimal + "[noise]\ninner_cutoff = 0.01\n[sim]\ntruncation = 0.001\n");
    EXPECT_TRUE(any_contains(v, "eps >= eps0"));
    EXPECT_TRUE(problems(kMinimal + "[noise]\ninner_cutoff = 0.01\n[sim]\ntruncation = 0.5\n").empty());
    EXPECT_TRUE(problems(kMinimal + "[sim]\ntruncation = \"full\"\n").empty());
}

TEST(Config, AllViolationsAreListed) {
    const auto v = problems(R"(
[operator]
kind = "p_laplace"
p = 3.0
n = 0
[noise]
alpha = 2.5
[sim]
horizon = -1.0
[task.a1_3]
eta = 1.0
zeta = 0.9
)");
    EXPECT_GE(v.size(), 5u);
    EXPECT_TRUE(any_contains(v, "zeta"));
    EXPECT_TRUE(any_contains(v, "horizon"));
}

TEST(Config, UnknownKeysAndTypeErrorsAreReported) {
    const auto v = problems(kMinimal + "colour = 3\n[sim]\nhorizon = \"long\"\n[task.bogus]\nx = 1\n");
    EXPECT_TRUE(any_contains(v, "colour"));
    EXPECT_TRUE(any_contains(v, "sim.horizon"));
    EXPECT_TRUE(any_contains(v, "bogus"));
}

TEST(Config, MissingOperatorIsReported) {
    EXPECT_TRUE(any_contains(problems("[sim]\nhorizon = 1.0\n"), "[operator]"));
}

TEST(Config, SyntaxErrorCarriesLineAndColumn) {
    const auto v = problems("[operator]\nkind = \"p_laplace\"\np = = 1.5\n");
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].find("t.toml:3:"), std::string::npos) << v[0];
}

TEST(Config, LyapunovThetaAtTheStableIndexIsAViolation) {
    EXPECT_TRUE(any_contains(problems(kMinimal + "[task.lyapunov]\ntheta_hat = 1.5\n"), "theta_hat"));
}

// Property: canonical emission is a fixed point of parse . emit.
TEST(Config, CanonicalTomlRoundTrips) {
    for (const char* name : {"plaplace_reference", "fastdiffusion_reference", "heat_oracle", "degenerate_noise"}) {
        const auto cfg = parse_config(std::string(LEVYLAB_CONFIG_DIR) + "/" + name + ".toml");
        const std::string once = to_toml(cfg);
        const std::string twice = to_toml(parse_config_text(once));
        EXPECT_EQ(once, twice) << name;
    }
}

TEST(Config, SeedsBeyondInt64SurviveTheRoundTrip) {
    auto cfg = parse_config_text(kMinimal);
    cfg.seed.master = 18446744073709551557ull;
    EXPECT_EQ(parse_config_text(to_toml(cfg)).seed.master, 18446744073709551557ull);
}

TEST(Config, OverridePathsReachesEveryEnsemble) {
    auto cfg = parse_config_text(kMinimal);
    cfg.override_paths(17);
    EXPECT_EQ(cfg.a1_2.paths, 17u);
    EXPECT_EQ(cfg.e_property.paths, 17u);
    EXPECT_EQ(cfg.access.paths, 17u);
    EXPECT_EQ(cfg.lyapunov.paths, 17u);
    EXPECT_EQ(cfg.a1_3.params.paths_per_point, 17u);
}

TEST(Config, InitialAndPartnerStatesHaveTheRequestedNorms) {
    auto cfg = parse_config_text(kMinimal + "[initial]\nkind = \"random\"\nnorm = 2.0\n");
    const NormSuite ns = cfg.make_norms();
    const GridFunction x = cfg.make_initial();
    EXPECT_NEAR(h_norm(ns, x), 2.0, 1e-12);
    EXPECT_TRUE(x == cfg.make_initial());
    const GridFunction y = cfg.make_partner(x, 0.5, 0);
    EXPECT_NEAR(h_norm(ns, x - y), 0.5, 1e-12);
    EXPECT_FALSE(y == cfg.make_partner(x, 0.5, 1));
}
