#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "levylab/assumptions.hpp"
#include "levylab/errors.hpp"

using namespace levylab;

namespace {

const DriftOperator kPl = DriftOperator::p_laplace(1.5);

LevyNoiseModel small_noise(std::size_t n, HSpace space = HSpace::L2) {
    return LevyNoiseModel::cylindrical_stable({0.1, 0.05, 0.1 / 3, 0.025}, 1.5, n, space, 1e-2);
}

// Jumps along mode 1 with an exponential (one-signed) amplitude: nu is not symmetric.
std::vector<GridFunction> skewed_jumps(std::size_t n, std::size_t count, Engine& eng) {
    std::exponential_distribution<double> e;
    std::vector<GridFunction> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(e(eng) * sine_mode(n, 1));
    return out;
}

std::vector<GridFunction> symmetric_jumps(std::size_t n, std::size_t count, Engine& eng) {
    std::normal_distribution<double> g;
    std::vector<GridFunction> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(g(eng) * sine_mode(n, 1) + g(eng) * sine_mode(n, 2));
    return out;
}

}  // namespace

TEST(AssumptionA0, NoiseModelIsSymmetric) {
    const auto rep = verify_A0_symmetry(small_noise(16), 4000, {1, 0});
    EXPECT_TRUE(rep.pass) << rep.key_value();
    EXPECT_EQ(rep.claim, "A0");
}

TEST(AssumptionA0, SamplerDoublesSeparate) {
    const auto sym = verify_A0_symmetry([](std::size_t c, Engine& e) { return symmetric_jumps(8, c, e); },
                                        HSpace::L2, 8, 4000, {2, 0});
    EXPECT_TRUE(sym.pass);
    const auto skew = verify_A0_symmetry([](std::size_t c, Engine& e) { return skewed_jumps(8, c, e); },
                                         HSpace::L2, 8, 4000, {2, 0});
    EXPECT_FALSE(skew.pass);
    EXPECT_LT(skew.key_value(), 1e-6);
}

TEST(AssumptionA1_1, ReferenceDriftsDecay) {
    for (const auto& op : {kPl, DriftOperator::fast_diffusion(0.5)}) {
        const auto rep = verify_A1_1_decay(sine_mode(32, 1), op, NormSuite::for_operator(op), 5.0, 1e-2);
        EXPECT_TRUE(rep.pass) << op.describe() << " " << rep.key_value();
    }
}

// The heat flow decays like exp(-lambda_1 t), far slower than the finite-time
// extinction of the singular drifts; a 1e-6 target at t = 0.5 must fail.
TEST(AssumptionA1_1, SlowDecayFailsTheTarget) {
    const auto heat = DriftOperator::p_laplace(2.0, 0.0);
    SimConfig fine;
    fine.max_dt = 1e-4;
    const auto rep = verify_A1_1_decay(sine_mode(32, 1), heat, NormSuite::for_operator(heat), 0.5, 1e-6, fine);
    EXPECT_FALSE(rep.pass);
    EXPECT_NEAR(rep.key_value(), std::exp(-laplacian_eigenvalue(32, 1) * 0.5), 1e-4);
}

TEST(AssumptionA1_2, GapShrinksWithTruncation) {
    const auto rep = verify_A1_2_small_noise(sine_mode(16, 1), kPl, NormSuite::for_operator(kPl), small_noise(16), 1.0,
                                             {0.5, 0.25, 0.125}, 400, SimConfig{});
    EXPECT_TRUE(rep.pass) << rep.note << " " << rep.key_value();
    EXPECT_GT(rep.statistic("gap@0.5"), rep.statistic("gap@0.125"));
}

TEST(AssumptionA1_3, ZetaMustStayWithinHalfEta) {
    A13Params p;
    p.eta = 1.0;
    p.zeta = 0.6;
    EXPECT_THROW(p.validate(), PreconditionError);
    p.zeta = 0.5;
    EXPECT_NO_THROW(p.validate());
    p.points = 0;
    EXPECT_THROW(p.validate(), PreconditionError);
}

TEST(AssumptionA1_3, SmallBallIsLocallyBounded) {
    A13Params p;
    p.eta = 0.5;
    p.zeta = 0.25;
    p.t = 0.5;
    p.points = 3;
    p.paths_per_point = 100;
    const auto rep = verify_A1_3_local_boundedness(p, kPl, NormSuite::for_operator(kPl), small_noise(16), {});
    EXPECT_TRUE(rep.pass);
    EXPECT_GT(rep.key_value(), 0.0);
}

TEST(AssumptionA1_3, SearchReturnsFirstPassingCell) {
    A13Params p;
    p.eta = 0.5;
    p.points = 2;
    p.paths_per_point = 50;
    const auto rep = search_A1_3(p, {0.25, 0.1}, {0.5, 0.25}, kPl, NormSuite::for_operator(kPl), small_noise(16), {});
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.statistic("pairs_tried"), 1.0);
    bool found = false;
    for (const auto& [k, v] : rep.parameters)
        if (k == "zeta") found = v == "0.25";
    EXPECT_TRUE(found);
}

TEST(EProperty, CoupledPathsContract) {
    for (const auto& op : {kPl, DriftOperator::fast_diffusion(0.5)}) {
        const NormSuite ns = NormSuite::for_operator(op);
        const GridFunction x = basis_vector(ns.h, 16, 1);
        const GridFunction y = x + basis_vector(ns.h, 16, 2);  // ||x - y||_H = 1
        const auto rep = verify_e_property(x, y, op, ns, small_noise(16, ns.h), {0.1, 0.5, 1.0}, 100, {});
        EXPECT_TRUE(rep.pass) << op.describe();
        EXPECT_EQ(rep.statistic("contracting_fraction"), 1.0);
    }
}

TEST(EProperty, ContractsAllowsOnlyRounding) {
    EXPECT_TRUE(contracts(1.0, 1.0, 2.0));
    EXPECT_TRUE(contracts(1.0, 0.5, 2.0));
    EXPECT_TRUE(contracts(1.0, 1.0 + 1e-15, 2.0));
    EXPECT_FALSE(contracts(1.0, 1.0 + 1e-6, 2.0));
    EXPECT_TRUE(contracts(0.0, 0.0, 0.0));
}
