#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "levylab/ergodicity.hpp"
#include "levylab/errors.hpp"

using namespace levylab;

namespace {

const DriftOperator kPl = DriftOperator::p_laplace(1.5);

LevyNoiseModel small_noise(std::size_t n) {
    return LevyNoiseModel::cylindrical_stable({0.1, 0.05, 0.1 / 3, 0.025}, 1.5, n, HSpace::L2, 1e-2);
}

// W1 of two empirical laws as the integral of |F_a - F_b| over the merged support.
double cdf_area(std::vector<double> a, std::vector<double> b) {
    std::vector<double> all(a);
    all.insert(all.end(), b.begin(), b.end());
    std::sort(all.begin(), all.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    auto cdf = [](const std::vector<double>& s, double x) {
        return static_cast<double>(std::upper_bound(s.begin(), s.end(), x) - s.begin()) / s.size();
    };
    double area = 0.0;
    for (std::size_t i = 0; i + 1 < all.size(); ++i)
        area += std::abs(cdf(a, all[i]) - cdf(b, all[i])) * (all[i + 1] - all[i]);
    return area;
}

}  // namespace

TEST(Wasserstein, MatchesCdfAreaForEqualSizes) {
    Engine eng = RngStream{1, 0}.engine();
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> a(200), b(200);
        for (double& x : a) x = g(eng);
        for (double& x : b) x = 0.3 * g(eng) + 0.5;
        EXPECT_NEAR(wasserstein1_1d(a, b), cdf_area(a, b), 1e-12);
    }
}

TEST(Wasserstein, ShiftIsTheDistance) {
    std::vector<double> a{0.0, 1.0, 5.0, 2.0}, b;
    for (double x : a) b.push_back(x + 0.75);
    EXPECT_NEAR(wasserstein1_1d(a, b), 0.75, 1e-15);
    EXPECT_EQ(wasserstein1_1d(a, a), 0.0);
}

// Property: symmetric, and close to the CDF area when the sizes differ.
TEST(Wasserstein, UnequalSizesApproximateTheCdfArea) {
    Engine eng = RngStream{2, 0}.engine();
    std::exponential_distribution<double> e;
    std::vector<double> a(3000), b(1000);
    for (double& x : a) x = e(eng);
    for (double& x : b) x = e(eng) + 0.2;
    EXPECT_DOUBLE_EQ(wasserstein1_1d(a, b), wasserstein1_1d(b, a));
    EXPECT_NEAR(wasserstein1_1d(a, b), cdf_area(a, b), 0.02);
    EXPECT_THROW(wasserstein1_1d({}, b), std::invalid_argument);
}

TEST(Occupation, SampleCountCountsGridTimes) {
    EXPECT_EQ(occupation_sample_count(10.0, 20.0, 0.01), 1001u);
    EXPECT_EQ(occupation_sample_count(0.0, 1.0, 0.25), 5u);
    EXPECT_EQ(occupation_sample_count(0.1, 0.2, 0.25), 0u);
}

TEST(Occupation, MeasureTakesOnGridRecordsAfterBurnIn) {
    SimConfig cfg;
    cfg.rng = {3, 0};
    cfg.record_dt = 0.05;
    const auto noise = small_noise(16);
    const auto occ = occupation_measure(sine_mode(16, 1), kPl, NormSuite::for_operator(kPl), noise,
                                        Observable::h_norm(), 1.0, 3.0, cfg);
    EXPECT_EQ(occ.samples.size(), occupation_sample_count(1.0, 3.0, 0.05));
    for (double s : occ.samples) EXPECT_GE(s, 0.0);
}

TEST(Observable, NamesRoundTrip) {
    for (const std::string name : {"h_norm", "v_norm", "mode_3"}) EXPECT_EQ(Observable::parse(name).name(), name);
    EXPECT_THROW(Observable::parse("mode_0"), std::invalid_argument);
    EXPECT_THROW(Observable::parse("mode_x"), std::invalid_argument);
    EXPECT_THROW(Observable::parse("energy"), std::invalid_argument);
    const NormSuite ns = NormSuite::for_operator(kPl);
    EXPECT_NEAR(Observable::sine_mode(2).evaluate(ns, 3.0 * sine_mode(8, 2)), 3.0, 1e-12);
    EXPECT_NEAR(Observable::h_norm().evaluate(ns, 3.0 * sine_mode(8, 2)), 3.0, 1e-12);
}

TEST(Access, QueryValidation) {
    AccessibilityQuery q;
    q.x = sine_mode(8, 1);
    q.times = {};
    EXPECT_THROW(q.validate(), std::invalid_argument);
    q.times = {2.0, 1.0};
    EXPECT_THROW(q.validate(), std::invalid_argument);
    q.times = {1.0, 2.0};
    q.kappa = 0.0;
    EXPECT_THROW(q.validate(), std::invalid_argument);
}

// The singular drift extinguishes the state in finite time, so small noise
// leaves many paths inside the kappa ball.
TEST(Access, SmallBallIsReached) {
    AccessibilityQuery q;
    q.x = sine_mode(16, 1);
    q.times = {1.0, 2.0, 4.0};
    q.paths = 200;
    const auto rep = estimate_accessibility(q, kPl, NormSuite::for_operator(kPl), small_noise(16), {});
    EXPECT_TRUE(rep.pass);
    EXPECT_GE(rep.statistic("window_length"), 2.0);
    EXPECT_GT(rep.key_value(), 0.5);
}

TEST(Uniqueness, NearbyStartsForgetTheirOrigin) {
    UniquenessParams p;
    p.burn_in = 2.0;
    p.horizons = {4.0, 8.0};
    p.replicates = 4;
    p.tolerance = 0.05;
    const auto rep = verify_uniqueness(sine_mode(16, 1), 2.0 * sine_mode(16, 2), kPl, NormSuite::for_operator(kPl),
                                       small_noise(16), p, {});
    EXPECT_TRUE(rep.pass) << rep.key_value();
    EXPECT_TRUE(rep.has("final_w1_se@h_norm"));
}

TEST(Lyapunov, ThetaAtOrAboveTheStableIndexIsRejected) {
    const auto noise = small_noise(16);
    LyapunovConfig lc;
    lc.theta_hat = 1.0;
    EXPECT_NO_THROW(lc.validate(kPl, noise));
    lc.theta_hat = 1.5;
    EXPECT_THROW(lc.validate(kPl, noise), PreconditionError);
    lc.theta_hat = 0.4;  // below 2 - alpha
    EXPECT_THROW(lc.validate(kPl, noise), PreconditionError);
}

TEST(Lyapunov, FunctionAndExponent) {
    const NormSuite ns = NormSuite::for_operator(kPl);
    LyapunovConfig lc;
    lc.theta_hat = 1.0;
    EXPECT_NEAR(lc.f(ns, 2.0 * sine_mode(8, 1)), std::sqrt(5.0), 1e-12);
    EXPECT_DOUBLE_EQ(lc.integrand_exponent(kPl), 0.5);
}

TEST(Lyapunov, MomentGrowsAffinely) {
    const auto rep = lyapunov_moment_check(sine_mode(16, 1), kPl, NormSuite::for_operator(kPl), small_noise(16),
                                           LyapunovConfig{1.0}, {5.0, 10.0, 20.0}, 30, {});
    EXPECT_TRUE(rep.pass) << rep.key_value();
    EXPECT_LE(rep.statistic("max_min_ratio"), 2.0);
}

// Zero noise: the path dies, M(t) stops growing, M(t)/t falls.
TEST(Lyapunov, ZeroNoiseMomentSaturates) {
    const auto rep = lyapunov_moment_check(sine_mode(16, 1), kPl, NormSuite::for_operator(kPl),
                                           LevyNoiseModel::zero(16), LyapunovConfig{1.0}, {2.0, 4.0, 8.0}, 2, {});
    EXPECT_TRUE(rep.pass);
    EXPECT_NEAR(rep.statistic("M_over_t@2") * 2.0, rep.statistic("M_over_t@8") * 8.0, 1e-12);
}
