#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/rng.hpp"

namespace levylab {

enum class DriftKind { PLaplace, FastDiffusion };

// Exponents and constants of the coercivity/growth/decay conditions. Filled
// by calibration; unset entries are carried symbolically.
struct DriftConstants {
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> theta;
    std::optional<double> C;
    std::optional<double> F;
    std::optional<double> C_tilde;
    std::optional<double> varpi;
};

// Discrete drift A on the interior grid, scaled by a diffusion coefficient.
//
//   PLaplace:      A(u) = scale * D^-[ phi(D^+ u) D^+ u ],  phi(g) = (g^2 + delta^2)^{(p-2)/2}
//   FastDiffusion: A(u) = scale * Delta_h( sign(u) |u|^r )
//
// A scale of zero gives the zero drift used as a test double.
class DriftOperator {
public:
    static constexpr double kDefaultRegularization = 1e-8;

    static DriftOperator p_laplace(double p, double regularization = kDefaultRegularization, double scale = 1.0);
    static DriftOperator fast_diffusion(double r, double scale = 1.0);

    DriftKind kind() const noexcept { return kind_; }
    // p for PLaplace, r for FastDiffusion.
    double exponent() const noexcept { return exponent_; }
    double regularization() const noexcept { return regularization_; }
    double scale() const noexcept { return scale_; }
    // The V-norm power in the coercivity condition: p, resp. r + 1.
    double coercivity_exponent() const noexcept;
    // p == 2, resp. r == 1.
    bool is_linear() const noexcept { return exponent_ == (kind_ == DriftKind::PLaplace ? 2.0 : 1.0); }

    const DriftConstants& constants() const noexcept { return constants_; }
    DriftOperator with_constants(DriftConstants c) const;

    std::string describe() const;

private:
    DriftKind kind_ = DriftKind::PLaplace;
    double exponent_ = 2.0;
    double regularization_ = 0.0;
    double scale_ = 1.0;
    DriftConstants constants_;
};

enum class VNorm { W1p, Lr1 };

// The pair of norms of the Gelfand triple: (L2, W^{1,p}_0) for p-Laplace and
// (H^{-1}, L^{r+1}) for fast diffusion.
struct NormSuite {
    HSpace h = HSpace::L2;
    VNorm v = VNorm::W1p;
    double v_exponent = 2.0;

    static NormSuite for_operator(const DriftOperator& op);
};

// Throws std::invalid_argument unless ns is the triple that belongs to op.
void require_matching_norms(const DriftOperator& op, const NormSuite& ns);

GridFunction apply_drift(const DriftOperator& op, const GridFunction& u);

double h_norm(const NormSuite& ns, const GridFunction& u);
double v_norm(const NormSuite& ns, const GridFunction& u);

// <A(w), v> in the V*-V duality: summation by parts for p-Laplace, the H^{-1}
// pivot identity <Delta_h g, v>_{H^{-1}} = -<g, v>_{L2} for fast diffusion.
double duality(const DriftOperator& op, const NormSuite& ns, const GridFunction& w, const GridFunction& v);

// <A(u), u>
double pairing(const DriftOperator& op, const NormSuite& ns, const GridFunction& u);

// <A(u), u> evaluated as an H inner product of apply_drift(u) with u; agrees
// with pairing() up to rounding.
double pairing_inner_form(const DriftOperator& op, const NormSuite& ns, const GridFunction& u);

// <A(v1) - A(v2), v1 - v2>, each edge/node term nonpositive for monotone A.
double pairing_difference(const DriftOperator& op, const NormSuite& ns, const GridFunction& v1,
                          const GridFunction& v2);

// -2 <A(v1) - A(v2), v1 - v2> / ||v1 - v2||_V^exponent. Throws when v1 == v2.
double dissipativity_ratio(const DriftOperator& op, const NormSuite& ns, const GridFunction& v1,
                           const GridFunction& v2, double exponent);

// Random probes: sum_j g_j j^{-decay} scale * sine_mode(j), g_j ~ N(0,1).
struct ProbeDistribution {
    double decay_exponent = 1.0;
    std::vector<double> scales{0.01, 1.0, 100.0};
};

GridFunction random_probe(std::size_t n, double scale, double decay_exponent, Engine& eng);

// Time for E = ||Y||_H^2 to fall from e0 to e1 under dE/dt = -C~ E^{varpi/2}.
double predicted_decay_time(double c_tilde, double varpi, double e0, double e1);

struct ConditionReport {
    std::string condition;
    std::size_t samples = 0;
    std::size_t violations = 0;
    bool pass = false;
    // Named statistics and calibrated constants, in report order.
    std::vector<std::pair<std::string, double>> values;
    std::string note;

    double value(const std::string& key) const;
    bool has(const std::string& key) const;
};

// Weak dissipativity: max over random pairs of 2 <A(v1) - A(v2), v1 - v2>.
// Violations are values above tolerance.
ConditionReport check_H7_dissipativity(const DriftOperator& op, const NormSuite& ns, std::size_t n,
                                       std::size_t sample_count,
                                       const RngStream& rng, double tolerance = 1e-10,
                                       const ProbeDistribution& probes = {});

// Decay condition: for each varpi the largest C~ with
// 2 <A(v), v> + C~ ||v||_H^varpi <= 0 on every sample. Values "C_tilde@<varpi>"
// per grid point plus "best_varpi", "best_C_tilde" (shortest predicted time
// to shrink ||Y|| by 100x from unit norm).
ConditionReport check_H6_decay(const DriftOperator& op, const NormSuite& ns, std::size_t n,
                               const std::vector<double>& varpi_grid, std::size_t sample_count,
                               const RngStream& rng, const ProbeDistribution& probes = {});

// Hemicontinuity along random lines s -> <A(v1 + s v2), v> on s in [-1, 1]
// with unit-H-norm inputs. The drifts are Hoelder, not Lipschitz, so no fixed
// increment bound applies; instead the largest increment is measured at `step`
// and at step/16 and the observed order log(inc/inc_fine)/log 16 must be at
// least `min_order`. A jump would show order ~0. Advisory.
ConditionReport check_H1_hemicontinuity(const DriftOperator& op, const NormSuite& ns, std::size_t n,
                                        std::size_t line_count, const RngStream& rng, double step = 1e-3,
                                        double min_order = 0.1);

// Largest increment of s -> <A(v1 + s v2), v> over a uniform s-grid on [s0, s1].
double max_line_increment(const DriftOperator& op, const NormSuite& ns, const GridFunction& v1,
                          const GridFunction& v2, const GridFunction& v, double s0, double s1, double step,
                          double* argmax_s = nullptr);

// Evidence that strong dissipativity fails: the ratio of
// dissipativity_ratio() along the family u_k = k * e_1 (against 0),
// k = 1, 10, ..., 10^4, together with the infimum over random pairs.
// pass means the family ratio collapsed below 5% of its k = 1 value.
ConditionReport check_strong_dissipativity_absent(const DriftOperator& op, const NormSuite& ns, std::size_t n,
                                                  std::size_t sample_count, const RngStream& rng,
                                                  double exponent = 2.0, const ProbeDistribution& probes = {});

}  // namespace levylab
