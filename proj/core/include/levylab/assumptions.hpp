#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/integrator.hpp"
#include "levylab/levy_noise.hpp"
#include "levylab/operators.hpp"
#include "levylab/report.hpp"

namespace levylab {

// Draws `count` i.i.d. jumps. Lets the symmetry verifier run on samplers that
// are not LevyNoiseModels (test doubles).
using JumpSampler = std::function<std::vector<GridFunction>(std::size_t count, Engine& eng)>;

// Symmetry of nu: sign-flip KS test of <z, phi>_H over sampled jumps, for 5
// random probes phi. Passes iff every p-value exceeds 0.01.
VerifierReport verify_A0_symmetry(const LevyNoiseModel& noise, std::size_t sample_count, const RngStream& rng);
VerifierReport verify_A0_symmetry(const JumpSampler& sampler, HSpace space, std::size_t n, std::size_t sample_count,
                                  const RngStream& rng);

// Decay of the deterministic flow: ||Y(t)||_H^2 nonincreasing on every record
// (1e-12 relative) and ||Y(horizon)||_H <= decay_target ||x||_H.
VerifierReport verify_A1_1_decay(const GridFunction& x, const DriftOperator& op, const NormSuite& ns, double horizon,
                                 double decay_target, const SimConfig& base = {});

// Small-noise limit in mean square: for each eps of the ladder the estimate of
// E ||X^eps(t) - Y(t)||_H^2 over `paths` truncated paths. Passes iff the
// estimates fall strictly with eps (2 combined SE) and each successive ratio
// is within a factor 3 of the small_jump_variance ratio.
VerifierReport verify_A1_2_small_noise(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                       const LevyNoiseModel& noise, double t, std::vector<double> eps_ladder,
                                       std::size_t paths, const SimConfig& base = {});

struct A13Params {
    double eta = 1.0;
    // Probe radius, at most eta / 2.
    double zeta = 0.5;
    double t = 1.0;
    std::size_t points = 8;
    std::size_t paths_per_point = 500;
    // Extra thresholds evaluated on the same paths (reported, not tested).
    std::vector<double> eta_grid;

    void validate() const;
};

// Local boundedness: for m points on the zeta-sphere of H, the fraction of
// full paths whose running sup of ||X||_H stays <= eta up to t. Passes iff
// every point has a positive Clopper-Pearson 95% lower bound.
VerifierReport verify_A1_3_local_boundedness(const A13Params& params, const DriftOperator& op, const NormSuite& ns,
                                             const LevyNoiseModel& noise, const SimConfig& base = {});

// Runs verify_A1_3_local_boundedness over zeta_grid x t_grid (zeta-major, in
// the given order) and returns the first passing report, else the last one.
VerifierReport search_A1_3(A13Params params, const std::vector<double>& zeta_grid, const std::vector<double>& t_grid,
                           const DriftOperator& op, const NormSuite& ns, const LevyNoiseModel& noise,
                           const SimConfig& base = {});

// e-property: synchronously coupled paths from x and y. Passes iff every path
// contracts pathwise (||X^x - X^y||_H nonincreasing over all records) and, for
// every t in t_grid, the mean of ||X^x(t) - X^y(t)||_H^2 is <= ||x - y||_H^2 + 3 SE.
VerifierReport verify_e_property(const GridFunction& x, const GridFunction& y, const DriftOperator& op,
                                 const NormSuite& ns, const LevyNoiseModel& noise, const std::vector<double>& t_grid,
                                 std::size_t paths, const SimConfig& base = {});

// True when ||d_next|| does not exceed ||d_prev|| beyond rounding; the slack
// scales with the sizes of the coupled states.
bool contracts(double d_prev, double d_next, double state_scale);

}  // namespace levylab
