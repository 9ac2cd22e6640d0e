#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/rng.hpp"

namespace levylab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Value of a possibly divergent integral.
struct TailMoment {
    bool finite = true;
    double value = 0.0;
};

// Symmetric one-dimensional Levy measure mu(dy) = rho(|y|) dy.
//
// Every quantity is two-sided: tail(x) = mu(|y| > x). The stable family
// rho(y) = y^{-1-alpha} and its truncation to |y| <= R have closed forms; the
// remaining families fall back to adaptive quadrature.
class OneDMeasure {
public:
    enum class Family { Stable, TruncatedStable, TemperedStable, Custom };

    static OneDMeasure stable(double alpha);
    static OneDMeasure truncated_stable(double alpha, double radius);
    // rho(y) = exp(-rate y) y^{-1-alpha}
    static OneDMeasure tempered_stable(double alpha, double rate);
    // rho must be integrable against min(y^2, 1) on (0, support_radius].
    static OneDMeasure from_density(std::function<double(double)> rho, double support_radius = kInfinity);

    Family family() const noexcept { return family_; }
    double alpha() const noexcept { return alpha_; }
    double support_radius() const noexcept { return radius_; }

    double density(double y) const;
    double tail(double x) const;
    // integral of y^2 over |y| <= x
    double second_moment_below(double x) const;
    // integral of |y|^theta over |y| > x
    TailMoment moment_above(double theta, double x) const;
    // The x > 0 with tail(x) = v, for 0 < v.
    double inverse_tail(double v) const;
    // integral of y over lo < |y| <= hi, positive and negative halves summed
    // on mirrored quadrature nodes.
    double signed_first_moment(double lo, double hi) const;

private:
    Family family_ = Family::Stable;
    double alpha_ = 1.0;
    double radius_ = kInfinity;
    double rate_ = 0.0;
    std::function<double(double)> rho_;

    double integrate(const std::function<double(double)>& f, double lo, double hi) const;
};

// Jump-norm band (lo, hi]; hi may be +inf.
struct NoiseBand {
    double lo = 0.0;
    double hi = kInfinity;
};

struct JumpEvent {
    double time = 0.0;
    GridFunction jump;
};

// Compound-Poisson realization of the jumps whose H-norm lies in `band`,
// over [0, horizon].
struct JumpSchedule {
    std::vector<JumpEvent> events;
    double horizon = 0.0;
    NoiseBand band;

    std::size_t size() const noexcept { return events.size(); }
    bool empty() const noexcept { return events.empty(); }
};

// Time-ordered union of two schedules over the same horizon.
JumpSchedule merge_schedules(const JumpSchedule& a, const JumpSchedule& b);

enum class NoiseKind { CylindricalStable, CylindricalGeneric, SubordinatedWiener };

// Symmetric pure-jump Levy noise on the discretized state space.
//
// Cylindrical kinds: L(t) = sum_j beta_j L^j(t) e_j with independent scalar
// processes L^j sharing the measure mu, so nu lives on the coordinate axes of
// the basis {e_j}. SubordinatedWiener: a Q-Wiener process (Q diagonal in the
// basis) time-changed by an alpha/2-stable subordinator with Levy measure
// c s^{-1-alpha/2} ds.
//
// Jumps of H-norm at most inner_cutoff are never simulated.
class LevyNoiseModel {
public:
    static constexpr double kDefaultInnerCutoff = 1e-4;

    static LevyNoiseModel cylindrical_stable(std::vector<double> coefficients, double alpha, std::size_t n,
                                             HSpace basis = HSpace::L2,
                                             double inner_cutoff = kDefaultInnerCutoff);
    static LevyNoiseModel cylindrical_generic(std::vector<double> coefficients, OneDMeasure measure,
                                              std::size_t n, HSpace basis = HSpace::L2,
                                              double inner_cutoff = kDefaultInnerCutoff);
    static LevyNoiseModel subordinated_wiener(std::vector<double> covariance_diag, double alpha, std::size_t n,
                                              HSpace basis = HSpace::L2,
                                              double inner_cutoff = kDefaultInnerCutoff,
                                              double subordinator_scale = 1.0);
    // No jumps at all.
    static LevyNoiseModel zero(std::size_t n, HSpace basis = HSpace::L2);

    NoiseKind kind() const noexcept { return kind_; }
    std::size_t grid_size() const noexcept { return n_; }
    HSpace basis_space() const noexcept { return basis_; }
    double inner_cutoff() const noexcept { return inner_cutoff_; }
    double stability_index() const noexcept { return alpha_; }
    const std::vector<double>& mode_coefficients() const noexcept { return coefficients_; }
    const std::vector<double>& covariance_diag() const noexcept { return covariance_; }
    const OneDMeasure& measure() const noexcept { return measure_; }
    double subordinator_scale() const noexcept { return subordinator_scale_; }

    // True when nu = 0 (all coefficients or the whole covariance vanish).
    bool is_zero() const noexcept;

    // nu(||z||_H > eps); throws CutoffViolation when eps < inner_cutoff.
    double large_jump_rate(double eps) const;
    // nu(band); throws CutoffViolation when band.lo < inner_cutoff.
    double band_rate(const NoiseBand& band) const;
    // integral of ||z||^2 over ||z|| <= eps, for 0 < eps <= 1.
    double small_jump_variance(double eps) const;
    // integral of ||z||^theta over ||z|| > 1, for 0 < theta <= 2.
    TailMoment tail_moment(double theta) const;
    // integral of z over the band; the zero function for every symmetric nu.
    GridFunction compensator_drift(const NoiseBand& band) const;

    // All jumps with norm in `band` over [0, horizon].
    JumpSchedule sample_schedule(const NoiseBand& band, double horizon, const RngStream& rng) const;
    // Subordinated-Wiener construction of sample_schedule.
    JumpSchedule subordinated_schedule(const NoiseBand& band, double horizon, const RngStream& rng) const;
    // count i.i.d. jumps from the band-restricted, normalized measure.
    std::vector<GridFunction> sample_jumps(const NoiseBand& band, std::size_t count, Engine& eng) const;

    // Smallest subordinator jump simulated for the band: max(eps0^2, lo^2/25)/tr(Q).
    double subordinator_cutoff(const NoiseBand& band) const;
    // E[W^{alpha/2}] for W = sum_j q_j g_j^2 with g_j standard normal.
    double gaussian_mixing_moment() const noexcept { return mixing_moment_; }

    std::string describe() const;

private:
    LevyNoiseModel() = default;

    NoiseKind kind_ = NoiseKind::CylindricalStable;
    std::size_t n_ = 0;
    HSpace basis_ = HSpace::L2;
    double inner_cutoff_ = kDefaultInnerCutoff;
    double alpha_ = 1.0;
    std::vector<double> coefficients_;
    std::vector<double> covariance_;
    OneDMeasure measure_;
    double subordinator_scale_ = 1.0;
    double mixing_moment_ = 0.0;
    std::vector<GridFunction> basis_vectors_;

    void check_band(const NoiseBand& band) const;
    double mode_band_rate(std::size_t j, const NoiseBand& band) const;
    double cylindrical_jump_norm(std::size_t j, const NoiseBand& band, Engine& eng) const;
    GridFunction draw_cylindrical(const std::vector<double>& cumulative, const NoiseBand& band, Engine& eng) const;
    GridFunction draw_subordinated(double s, Engine& eng) const;
};

}  // namespace levylab
