#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/integrator.hpp"
#include "levylab/levy_noise.hpp"
#include "levylab/operators.hpp"
#include "levylab/report.hpp"

namespace levylab {

struct AccessibilityQuery {
    GridFunction x;
    double kappa = 0.1;
    std::vector<double> times;
    std::size_t paths = 1000;
    // Shortest run of consecutive grid times that counts as a window (capped at
    // the grid length).
    std::size_t min_window = 2;

    void validate() const;
};

// Fraction of full paths with ||X(t_i)||_H <= kappa at each t_i, with
// Clopper-Pearson 95% bounds; all times come from one ensemble. Passes iff a
// run of consecutive times has positive lower bounds throughout. A failure
// means no evidence at this budget, not a refutation.
VerifierReport estimate_accessibility(const AccessibilityQuery& q, const DriftOperator& op, const NormSuite& ns,
                                      const LevyNoiseModel& noise, const SimConfig& base = {});

// Scalar functional of the state: ||u||_H, ||u||_V, or <u, e_j>_H.
struct Observable {
    enum class Kind { HNorm, VNorm, Mode };
    Kind kind = Kind::HNorm;
    std::size_t mode = 0;

    static Observable h_norm() { return {Kind::HNorm, 0}; }
    static Observable v_norm() { return {Kind::VNorm, 0}; }
    static Observable sine_mode(std::size_t j) { return {Kind::Mode, j}; }
    // "h_norm", "v_norm" or "mode_<j>".
    static Observable parse(const std::string& name);

    std::string name() const;
    bool needs_state() const noexcept { return kind == Kind::Mode; }
    double evaluate(const NormSuite& ns, const GridFunction& u) const;
    double evaluate(const NormSuite& ns, const PathRecord& rec) const;
};

struct OccupationMeasure {
    Observable observable;
    std::vector<double> samples;
    double burn_in = 0.0;
    double horizon = 0.0;
    double record_dt = 0.0;
};

// Number of record-grid times k * record_dt in [burn_in, horizon].
std::size_t occupation_sample_count(double burn_in, double horizon, double record_dt);

// Observable values at the on-grid records of `path` with burn_in <= t <= horizon.
OccupationMeasure occupation_from_path(const TrajectoryPath& path, const NormSuite& ns, const Observable& obs,
                                       double burn_in, double horizon, double record_dt);

// One long full path from x; samples on the record grid after burn-in.
OccupationMeasure occupation_measure(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                     const LevyNoiseModel& noise, const Observable& obs, double burn_in,
                                     double horizon, const SimConfig& base = {});

// W1 between empirical laws. Equal sizes: mean |a_(i) - b_(i)| over sorted
// samples. Otherwise both quantile functions are compared on the midpoint
// grid (i + 1/2)/m of the smaller size m, interpolating the larger sample.
double wasserstein1_1d(std::vector<double> a, std::vector<double> b);

struct UniquenessParams {
    std::vector<Observable> observables{Observable::h_norm()};
    double burn_in = 10.0;
    std::vector<double> horizons{20.0, 40.0, 80.0};
    // Independent seed replicates used for the standard errors.
    std::size_t replicates = 8;
    double tolerance = 0.05;
};

// Occupation measures from x1 and x2 (independent noise) over a horizon ladder,
// one long path per start and replicate. The replicates of each start are
// pooled, which estimates the noise-averaged occupation measure; W1 is taken
// between the pools, with a jackknife SE over replicates. Passes iff for every
// observable W1 is nonincreasing along the ladder within 2 combined SE and
// its final value is <= tolerance. The table also reports the mean W1 of
// single path pairs, which carries an O(1/sqrt(T)) small-sample bias.
VerifierReport verify_uniqueness(const GridFunction& x1, const GridFunction& x2, const DriftOperator& op,
                                 const NormSuite& ns, const LevyNoiseModel& noise, const UniquenessParams& params,
                                 const SimConfig& base = {});

// Lyapunov function f(u) = (||u||_H^2 + 1)^{theta_hat / 2}.
struct LyapunovConfig {
    double theta_hat = 1.0;

    double f(const NormSuite& ns, const GridFunction& u) const;
    // The integrand power alpha + theta_hat - 2 with alpha the coercivity exponent.
    double integrand_exponent(const DriftOperator& op) const;
    // Throws PreconditionError unless theta_hat in ((2 - alpha) v 0, 2] and the
    // noise has a finite tail moment of order theta_hat.
    void validate(const DriftOperator& op, const LevyNoiseModel& noise) const;
};

// M(t) = E int_0^t ||X(s)||_V^{alpha + theta_hat - 2} ds by left-endpoint
// quadrature on the record grid, for each t of the ladder (prefixes of one
// ensemble). Passes iff max_k (M(t_k)/t_k) / (M(t_0)/t_0) <= 2: M grows at
// most affinely. "max_min_ratio" reports max/min of M(t)/t over the ladder.
VerifierReport lyapunov_moment_check(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                     const LevyNoiseModel& noise, const LyapunovConfig& lc,
                                     std::vector<double> horizons, std::size_t paths, const SimConfig& base = {});

}  // namespace levylab
