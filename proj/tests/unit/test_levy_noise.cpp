#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <gtest/gtest.h>

#include "levylab/errors.hpp"
#include "levylab/levy_noise.hpp"
#include "levylab/noise_tests.hpp"
#include "levylab/stats.hpp"

using namespace levylab;

namespace {

const std::vector<double> kBeta{0.1, 0.05, 0.1 / 3.0, 0.025};

// Upper incomplete gamma for a in (-2, 0) via Gamma(a, x) = (Gamma(a+1, x) - x^a e^{-x}) / a.
double upper_gamma(double a, double x) {
    if (a > 0.0) return boost::math::tgamma(a, x);
    return (upper_gamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

double two_sided_quadrature(const std::function<double(double)>& f, double lo, double hi) {
    if (std::isinf(hi)) {
        boost::math::quadrature::exp_sinh<double> es;
        return 2.0 * es.integrate(f, lo, hi);
    }
    boost::math::quadrature::tanh_sinh<double> ts;
    return 2.0 * ts.integrate(f, lo, hi);
}

double norm_of(const GridFunction& z, HSpace s) { return std::sqrt(h_inner(s, z, z)); }

}  // namespace

TEST(OneDMeasure, StableClosedFormsAgreeWithQuadrature) {
    for (double alpha : {0.5, 1.0, 1.5, 1.9}) {
        const auto mu = OneDMeasure::stable(alpha);
        auto rho = [alpha](double y) { return std::pow(y, -1.0 - alpha); };
        for (double x : {0.01, 0.3, 2.0}) {
            EXPECT_NEAR(mu.tail(x), two_sided_quadrature(rho, x, kInfinity), 1e-8 * mu.tail(x));
            // y^2 rho(y) folded into one power: no 0 * inf near the origin
            const double m2 = two_sided_quadrature([&](double y) { return std::pow(y, 1.0 - alpha); }, 0.0, x);
            EXPECT_NEAR(mu.second_moment_below(x), m2, 1e-8 * m2);
        }
    }
}

TEST(OneDMeasure, TruncatedStableIsCutAtRadius) {
    const auto mu = OneDMeasure::truncated_stable(1.5, 2.0);
    EXPECT_EQ(mu.tail(2.0), 0.0);
    EXPECT_EQ(mu.density(2.5), 0.0);
    auto rho = [](double y) { return std::pow(y, -2.5); };
    EXPECT_NEAR(mu.tail(0.5), two_sided_quadrature(rho, 0.5, 2.0), 1e-10);
    // every moment above is finite once the support is bounded
    const auto m = mu.moment_above(1.8, 1.0);
    EXPECT_TRUE(m.finite);
    EXPECT_NEAR(m.value, two_sided_quadrature([&](double y) { return std::pow(y, 1.8) * rho(y); }, 1.0, 2.0), 1e-10);
}

TEST(OneDMeasure, TemperedTailMatchesIncompleteGamma) {
    for (double alpha : {0.7, 1.5}) {
        for (double rate : {0.5, 2.0}) {
            const auto mu = OneDMeasure::tempered_stable(alpha, rate);
            for (double x : {0.05, 1.0, 3.0}) {
                // int_x^inf e^{-r y} y^{-1-a} dy = r^a Gamma(-a, r x)
                const double ref = 2.0 * std::pow(rate, alpha) * upper_gamma(-alpha, rate * x);
                EXPECT_NEAR(mu.tail(x), ref, 1e-8 * ref) << alpha << " " << rate << " " << x;
            }
            // all tail moments finite under exponential tempering
            EXPECT_TRUE(mu.moment_above(2.0, 1.0).finite);
        }
    }
}

// Property: inverse_tail inverts tail for every family.
TEST(OneDMeasure, InverseTailRoundTrip) {
    const std::vector<OneDMeasure> ms{OneDMeasure::stable(1.2), OneDMeasure::truncated_stable(1.5, 3.0),
                                      OneDMeasure::tempered_stable(1.5, 1.0),
                                      OneDMeasure::from_density([](double y) { return std::exp(-y) / y; }, 10.0)};
    for (const auto& mu : ms) {
        for (double x : {0.01, 0.2, 1.0, 2.5}) {
            const double v = mu.tail(x);
            if (!(v > 0.0)) continue;
            EXPECT_NEAR(mu.inverse_tail(v), x, 1e-7 * x);
        }
    }
}

TEST(OneDMeasure, RejectsBadParameters) {
    EXPECT_THROW(OneDMeasure::stable(0.0), std::invalid_argument);
    EXPECT_THROW(OneDMeasure::stable(2.0), std::invalid_argument);
    EXPECT_THROW(OneDMeasure::tempered_stable(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(OneDMeasure::stable(1.0).inverse_tail(0.0), std::invalid_argument);
}

TEST(NoiseModel, LargeJumpRateClosedForm) {
    const double alpha = 1.5;
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, alpha, 32);
    for (double eps : {0.01, 0.1, 1.0}) {
        double ref = 0.0;
        for (double b : kBeta) ref += 2.0 * std::pow(eps / b, -alpha) / alpha;
        EXPECT_NEAR(noise.large_jump_rate(eps), ref, 1e-12 * ref);
    }
}

// The small-jump variance scales as eps^{2 - alpha}: halving eps multiplies it by 2^{alpha - 2}.
TEST(NoiseModel, SmallJumpVarianceScaling) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 32);
    for (double eps : {0.5, 0.25}) {
        EXPECT_NEAR(noise.small_jump_variance(eps / 2.0) / noise.small_jump_variance(eps), std::pow(2.0, -0.5), 1e-12);
    }
    double ref = 0.0;
    for (double b : kBeta) ref += b * b * 2.0 * std::pow(0.3 / b, 0.5) / 0.5;
    EXPECT_NEAR(noise.small_jump_variance(0.3), ref, 1e-12 * ref);
    EXPECT_EQ(noise.small_jump_variance(0.0), 0.0);
}

TEST(NoiseModel, TailMomentFiniteExactlyBelowAlpha) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 32);
    EXPECT_TRUE(noise.tail_moment(1.0).finite);
    EXPECT_TRUE(noise.tail_moment(1.4999).finite);
    EXPECT_FALSE(noise.tail_moment(1.5).finite);
    EXPECT_FALSE(noise.tail_moment(2.0).finite);
    double ref = 0.0;
    for (double b : kBeta) ref += std::pow(b, 1.0) * 2.0 * std::pow(1.0 / b, 1.0 - 1.5) / 0.5;
    EXPECT_NEAR(noise.tail_moment(1.0).value, ref, 1e-12 * ref);
}

TEST(NoiseModel, CompensatorVanishesForSymmetricMeasures) {
    const auto stable = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 16);
    const auto tempered = LevyNoiseModel::cylindrical_generic(kBeta, OneDMeasure::tempered_stable(1.2, 1.0), 16);
    for (const auto* m : {&stable, &tempered}) {
        const GridFunction c = m->compensator_drift({1e-3, 1.0});
        EXPECT_LT(std::sqrt(l2_dot(c, c)), 1e-12);
    }
    EXPECT_TRUE(LevyNoiseModel::zero(8).compensator_drift({1e-3, 1.0}).is_zero());
}

TEST(NoiseModel, CutoffViolationBelowInnerCutoff) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 32, HSpace::L2, 1e-3);
    EXPECT_THROW(noise.large_jump_rate(1e-4), CutoffViolation);
    EXPECT_THROW(noise.sample_schedule({1e-4, 1.0}, 1.0, {1, 1}), CutoffViolation);
    EXPECT_THROW(noise.compensator_drift({1e-4, 1.0}), CutoffViolation);
}

TEST(NoiseModel, ZeroCoefficientsGiveEmptySchedules) {
    const auto noise = LevyNoiseModel::cylindrical_stable({0.0, 0.0, 0.0}, 1.5, 8);
    EXPECT_TRUE(noise.is_zero());
    EXPECT_TRUE(noise.sample_schedule({1e-3, kInfinity}, 10.0, {1, 1}).empty());
    const auto sub = LevyNoiseModel::subordinated_wiener({0.0, 0.0}, 1.5, 8);
    EXPECT_TRUE(sub.is_zero());
    EXPECT_TRUE(sub.sample_schedule({1e-3, kInfinity}, 10.0, {1, 1}).empty());
}

TEST(NoiseModel, SchedulesAreReproducible) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 16, HSpace::L2, 1e-3);
    const auto a = noise.sample_schedule({1e-3, kInfinity}, 5.0, {42, 7});
    const auto b = noise.sample_schedule({1e-3, kInfinity}, 5.0, {42, 7});
    const auto c = noise.sample_schedule({1e-3, kInfinity}, 5.0, {42, 8});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(a.events[i].time, b.events[i].time);
        EXPECT_EQ(a.events[i].jump, b.events[i].jump);
    }
    EXPECT_FALSE(a.size() == c.size() && a.events.front().time == c.events.front().time);
}

// Schedules stay inside their band and horizon, in time order.
TEST(NoiseModel, ScheduleInvariants) {
    for (HSpace space : {HSpace::L2, HSpace::HMinus1}) {
        const auto cyl = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 16, space, 1e-3);
        const auto sub = LevyNoiseModel::subordinated_wiener({0.01, 0.005, 0.002}, 1.5, 16, space, 1e-3);
        for (const auto* m : {&cyl, &sub}) {
            const NoiseBand band{0.01, 0.5};
            for (std::uint64_t s = 0; s < 20; ++s) {
                const auto sch = m->sample_schedule(band, 3.0, {s, 1});
                double prev = 0.0;
                for (const auto& ev : sch.events) {
                    EXPECT_GT(ev.time, prev);
                    EXPECT_LE(ev.time, 3.0);
                    const double r = norm_of(ev.jump, space);
                    EXPECT_GT(r, band.lo * (1 - 1e-12));
                    EXPECT_LE(r, band.hi * (1 + 1e-12));
                    prev = ev.time;
                }
            }
        }
    }
}

// Cylindrical jumps live on the coordinate axes of the basis.
TEST(NoiseModel, CylindricalJumpsAreOnAxes) {
    const auto noise = LevyNoiseModel::cylindrical_stable({0.1, 0.0, 0.05}, 1.5, 8, HSpace::L2, 1e-3);
    Engine eng = RngStream{3, 3}.engine();
    for (const auto& z : noise.sample_jumps({1e-3, kInfinity}, 200, eng)) {
        std::size_t nonzero_modes = 0;
        for (std::size_t j = 1; j <= 8; ++j)
            if (std::abs(l2_dot(z, sine_mode(8, j))) > 1e-12 * std::sqrt(l2_dot(z, z))) ++nonzero_modes;
        EXPECT_EQ(nonzero_modes, 1u);
        EXPECT_NEAR(std::abs(l2_dot(z, sine_mode(8, 2))), 0.0, 1e-12);  // beta_2 = 0: never forced
    }
}

TEST(NoiseModel, PoissonCountsMeanAndVariance) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 16, HSpace::L2, 1e-3);
    const NoiseBand band{0.02, kInfinity};
    const double T = 4.0, lt = T * noise.band_rate(band);
    const std::size_t R = 2000;
    std::vector<double> counts(R);
    for (std::size_t r = 0; r < R; ++r)
        counts[r] = static_cast<double>(noise.sample_schedule(band, T, RngStream{11, 0}.child(r)).size());
    const auto s = stats::summarize(counts);
    EXPECT_LE(std::abs(s.mean - lt), 3.0 * std::sqrt(lt / R));
    EXPECT_LE(std::abs(s.variance - lt), 5.0 * lt / std::sqrt(static_cast<double>(R)));
}

TEST(NoiseModel, FirstLargeJumpIsExponential) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 16, HSpace::L2, 1e-3);
    const NoiseBand band{0.05, kInfinity};
    const double rate = noise.band_rate(band);
    std::vector<double> first;
    for (std::size_t r = 0; first.size() < 10000; ++r) {
        const auto sch = noise.sample_schedule(band, 50.0 / rate, RngStream{12, 0}.child(r));
        if (!sch.empty()) first.push_back(sch.events.front().time);
    }
    const auto ks = stats::ks_one_sample(first, [rate](double t) { return 1.0 - std::exp(-rate * t); });
    EXPECT_GT(ks.p_value, 0.01);
}

// (a,b] and (b,c] merged look like (a,c]: counts and norm histograms.
TEST(NoiseModel, BandAdditivity) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 16, HSpace::L2, 1e-3);
    const NoiseBand lo{0.01, 0.05}, hi{0.05, 1.0}, whole{0.01, 1.0};
    EXPECT_NEAR(noise.band_rate(lo) + noise.band_rate(hi), noise.band_rate(whole), 1e-10 * noise.band_rate(whole));
    std::vector<double> merged_norms, whole_norms;
    double merged_count = 0.0, whole_count = 0.0;
    const std::size_t R = 400;
    for (std::size_t r = 0; r < R; ++r) {
        const RngStream s = RngStream{13, 0}.child(r);
        const auto m = merge_schedules(noise.sample_schedule(lo, 1.0, s.child(0)), noise.sample_schedule(hi, 1.0, s.child(1)));
        const auto w = noise.sample_schedule(whole, 1.0, s.child(2));
        for (std::size_t i = 1; i < m.size(); ++i) ASSERT_LE(m.events[i - 1].time, m.events[i].time);
        for (const auto& e : m.events) merged_norms.push_back(std::sqrt(l2_dot(e.jump, e.jump)));
        for (const auto& e : w.events) whole_norms.push_back(std::sqrt(l2_dot(e.jump, e.jump)));
        merged_count += static_cast<double>(m.size());
        whole_count += static_cast<double>(w.size());
    }
    const double lt = noise.band_rate(whole) * R;
    EXPECT_LE(std::abs(merged_count - whole_count), 4.0 * std::sqrt(2.0 * lt));
    const std::vector<double> edges{0.01, 0.015, 0.02, 0.03, 0.05, 0.1, 0.2};
    const auto ha = stats::histogram(merged_norms, edges), hb = stats::histogram(whole_norms, edges);
    EXPECT_GT(stats::chi_square_homogeneity(ha, hb).p_value, 0.01);
}

// E[W^{a}] for W = sum q_j g_j^2, checked against plain Monte Carlo.
TEST(NoiseModel, SubordinatedMixingMomentMonteCarlo) {
    const std::vector<double> q{0.3, 0.2, 0.1};
    const auto noise = LevyNoiseModel::subordinated_wiener(q, 1.5, 8);
    Engine eng = RngStream{14, 0}.engine();
    std::normal_distribution<double> g;
    const int N = 400000;
    double sum = 0.0;
    for (int i = 0; i < N; ++i) {
        double w = 0.0;
        for (double qj : q) {
            const double x = g(eng);
            w += qj * x * x;
        }
        sum += std::pow(w, 0.75);
    }
    EXPECT_NEAR(noise.gaussian_mixing_moment(), sum / N, 3e-3);
}

TEST(NoiseModel, SubordinatedRateMatchesSimulation) {
    const auto noise = LevyNoiseModel::subordinated_wiener({0.01, 0.004, 0.001}, 1.5, 8, HSpace::L2, 1e-3);
    const NoiseBand band{0.05, kInfinity};
    const double rate = noise.band_rate(band);
    const double T = 2000.0 / rate;
    const auto sch = noise.sample_schedule(band, T, {15, 0});
    const double expected = rate * T;
    EXPECT_LE(std::abs(static_cast<double>(sch.size()) - expected), 4.0 * std::sqrt(expected));
}

TEST(NoiseModel, TailExponentOfSampledNorms) {
    const std::vector<LevyNoiseModel> models{LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 16, HSpace::L2, 1e-3),
                                             LevyNoiseModel::subordinated_wiener({0.01, 0.004}, 1.5, 16, HSpace::L2, 1e-3)};
    for (const auto& m : models) {
        Engine eng = RngStream{16, 0}.engine();
        std::vector<double> norms;
        for (const auto& z : m.sample_jumps({0.05, kInfinity}, 100000, eng)) norms.push_back(std::sqrt(l2_dot(z, z)));
        EXPECT_NEAR(stats::fit_tail_exponent(norms, 0.1), 1.5, 0.15);
    }
}

TEST(NoiseModel, ProjectionsAreSymmetric) {
    const GridFunction phi = sine_mode(8, 1) + 0.5 * sine_mode(8, 2);
    const std::vector<LevyNoiseModel> models{LevyNoiseModel::cylindrical_stable({0.1, 0.05}, 1.5, 8, HSpace::L2, 1e-3),
                                             LevyNoiseModel::subordinated_wiener({0.01, 0.004}, 1.5, 8, HSpace::L2, 1e-3)};
    for (const auto& m : models) {
        Engine eng = RngStream{17, 0}.engine();
        std::vector<double> proj;
        // bounded band so that the mean has a finite variance
        for (const auto& z : m.sample_jumps({0.01, 1.0}, 20000, eng)) proj.push_back(l2_dot(z, phi));
        const auto s = stats::summarize(proj);
        EXPECT_LE(std::abs(s.mean), 3.0 * s.standard_error);
        EXPECT_GT(stats::sign_flip_ks(proj).p_value, 0.01);
    }
}

TEST(NoiseModel, RunNoiseTestsPassOnReferenceModel) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 32, HSpace::L2, 0.01);
    NoiseTestParams p;
    p.band_lo = 0.05;
    p.count_replicates = 2000;
    const auto reps = run_noise_tests(noise, p, {18, 2});
    ASSERT_EQ(reps.size(), 4u);
    for (const auto& r : reps) EXPECT_TRUE(r.pass) << r.claim << " " << r.key_value();
}

TEST(NoiseModel, BandTableColumns) {
    const auto noise = LevyNoiseModel::cylindrical_stable(kBeta, 1.5, 32, HSpace::L2, 0.01);
    const Table t = noise_band_table(noise, {{0.01, 0.1}, {1.0, kInfinity}}, {1.0, 1.5});
    EXPECT_EQ(t.columns, (std::vector<std::string>{"band_lo", "band_hi", "rate", "small_jump_variance",
                                                   "tail_moment_order", "tail_moment_value"}));
    ASSERT_EQ(t.rows.size(), 4u);
    EXPECT_EQ(t.rows[3][5], "inf");  // order 1.5 = alpha diverges
    EXPECT_EQ(t.rows[3][3], "");     // no small-jump variance above norm 1
}
