#include "levylab/levy_noise.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "levylab/errors.hpp"

namespace levylab {

namespace {

void require_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 2.0)) {
        throw std::invalid_argument("stability index must lie in (0, 2), got " + std::to_string(alpha));
    }
}

double exponential(Engine& eng, double rate) { return -std::log(uniform_open(eng)) / rate; }

double next_event_time(double t, double increment) {
    const double next = t + increment;
    return next > t ? next : std::nextafter(t, kInfinity);
}

}  // namespace

// --- OneDMeasure -----------------------------------------------------------

OneDMeasure OneDMeasure::stable(double alpha) {
    require_alpha(alpha);
    OneDMeasure m;
    m.family_ = Family::Stable;
    m.alpha_ = alpha;
    m.rho_ = [alpha](double y) { return std::pow(y, -1.0 - alpha); };
    return m;
}

OneDMeasure OneDMeasure::truncated_stable(double alpha, double radius) {
    require_alpha(alpha);
    if (!(radius > 0.0 && std::isfinite(radius))) throw std::invalid_argument("truncation radius must be positive");
    OneDMeasure m = stable(alpha);
    m.family_ = Family::TruncatedStable;
    m.radius_ = radius;
    return m;
}

OneDMeasure OneDMeasure::tempered_stable(double alpha, double rate) {
    require_alpha(alpha);
    if (!(rate > 0.0)) throw std::invalid_argument("tempering rate must be positive");
    OneDMeasure m;
    m.family_ = Family::TemperedStable;
    m.alpha_ = alpha;
    m.rate_ = rate;
    m.rho_ = [alpha, rate](double y) { return std::exp(-rate * y) * std::pow(y, -1.0 - alpha); };
    return m;
}

OneDMeasure OneDMeasure::from_density(std::function<double(double)> rho, double support_radius) {
    if (!rho) throw std::invalid_argument("density must be callable");
    if (!(support_radius > 0.0)) throw std::invalid_argument("support radius must be positive");
    OneDMeasure m;
    m.family_ = Family::Custom;
    m.radius_ = support_radius;
    m.rho_ = std::move(rho);
    return m;
}

double OneDMeasure::density(double y) const {
    const double a = std::abs(y);
    if (a == 0.0 || a > radius_) return 0.0;
    return rho_(a);
}

double OneDMeasure::integrate(const std::function<double(double)>& f, double lo, double hi) const {
    hi = std::min(hi, radius_);
    if (!(hi > lo)) return 0.0;
    if (lo == 0.0) {
        boost::math::quadrature::tanh_sinh<double> ts;
        return ts.integrate(f, 0.0, hi);
    }
    if (std::isinf(hi)) {
        boost::math::quadrature::exp_sinh<double> es;
        return es.integrate(f, lo, hi);
    }
    // Power-law densities are smooth in log y.
    auto g = [&f](double u) {
        const double y = std::exp(u);
        return f(y) * y;
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, std::log(lo), std::log(hi), 15, 1e-13);
}

double OneDMeasure::tail(double x) const {
    if (!(x > 0.0)) return kInfinity;
    switch (family_) {
        case Family::Stable:
            return 2.0 * std::pow(x, -alpha_) / alpha_;
        case Family::TruncatedStable:
            return x >= radius_ ? 0.0 : 2.0 * (std::pow(x, -alpha_) - std::pow(radius_, -alpha_)) / alpha_;
        default:
            return 2.0 * integrate(rho_, x, kInfinity);
    }
}

double OneDMeasure::second_moment_below(double x) const {
    if (!(x > 0.0)) return 0.0;
    switch (family_) {
        case Family::Stable:
        case Family::TruncatedStable:
            return 2.0 * std::pow(std::min(x, radius_), 2.0 - alpha_) / (2.0 - alpha_);
        default:
            return 2.0 * integrate([this](double y) { return y * y * rho_(y); }, 0.0, x);
    }
}

TailMoment OneDMeasure::moment_above(double theta, double x) const {
    if (x >= radius_) return {true, 0.0};
    switch (family_) {
        case Family::Stable:
            if (theta >= alpha_) return {false, kInfinity};
            return {true, 2.0 * std::pow(x, theta - alpha_) / (alpha_ - theta)};
        case Family::TruncatedStable:
            if (theta == alpha_) return {true, 2.0 * std::log(radius_ / x)};
            return {true, 2.0 * (std::pow(radius_, theta - alpha_) - std::pow(x, theta - alpha_)) / (theta - alpha_)};
        default: {
            double value = kInfinity;
            try {
                value = 2.0 * integrate([this, theta](double y) { return std::pow(y, theta) * rho_(y); }, x, kInfinity);
            } catch (const std::exception&) {
                return {false, kInfinity};
            }
            if (!std::isfinite(value)) return {false, kInfinity};
            return {true, value};
        }
    }
}

double OneDMeasure::inverse_tail(double v) const {
    if (!(v > 0.0)) throw std::invalid_argument("inverse_tail requires a positive level");
    switch (family_) {
        case Family::Stable:
            return std::pow(alpha_ * v / 2.0, -1.0 / alpha_);
        case Family::TruncatedStable:
            return std::pow(alpha_ * v / 2.0 + std::pow(radius_, -alpha_), -1.0 / alpha_);
        default:
            break;
    }
    // tail is decreasing; bracket in log x and refine.
    double lo = 1.0, hi = 1.0;
    while (tail(lo) < v) lo /= 2.0;
    while (tail(hi) > v && hi < radius_) hi *= 2.0;
    hi = std::min(hi, radius_);
    if (lo == hi) return lo;  // tail(1) == v exactly
    auto f = [this, v](double u) { return tail(std::exp(u)) - v; };
    boost::uintmax_t iterations = 200;
    const auto root = boost::math::tools::toms748_solve(f, std::log(lo), std::log(hi),
                                                        boost::math::tools::eps_tolerance<double>(45), iterations);
    return std::exp(0.5 * (root.first + root.second));
}

double OneDMeasure::signed_first_moment(double lo, double hi) const {
    auto positive = [this](double y) { return y * rho_(y); };
    auto negative = [this](double y) { return -y * rho_(y); };
    return integrate(positive, lo, hi) + integrate(negative, lo, hi);
}

// --- schedules -------------------------------------------------------------

JumpSchedule merge_schedules(const JumpSchedule& a, const JumpSchedule& b) {
    JumpSchedule out;
    out.horizon = std::max(a.horizon, b.horizon);
    out.band = {std::min(a.band.lo, b.band.lo), std::max(a.band.hi, b.band.hi)};
    out.events.reserve(a.size() + b.size());
    std::merge(a.events.begin(), a.events.end(), b.events.begin(), b.events.end(), std::back_inserter(out.events),
               [](const JumpEvent& x, const JumpEvent& y) { return x.time < y.time; });
    return out;
}

// --- LevyNoiseModel --------------------------------------------------------

namespace {

std::vector<GridFunction> make_basis(HSpace space, std::size_t n, std::size_t modes) {
    if (modes > n) {
        throw std::invalid_argument("noise uses " + std::to_string(modes) + " modes on a grid with only " +
                                    std::to_string(n) + " interior nodes");
    }
    std::vector<GridFunction> basis;
    basis.reserve(modes);
    for (std::size_t j = 1; j <= modes; ++j) basis.push_back(basis_vector(space, n, j));
    return basis;
}

void require_cutoff(double cutoff) {
    if (!(cutoff > 0.0 && std::isfinite(cutoff))) throw std::invalid_argument("inner cutoff must be positive");
}

void require_finite(const std::vector<double>& xs, const char* what) {
    for (double x : xs) {
        if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + " must be finite");
    }
}

// E[W^a] = a / Gamma(1-a) * int_0^inf (1 - E exp(-tW)) t^{-1-a} dt, with
// E exp(-tW) = prod_j (1 + 2 t q_j)^{-1/2}.
double mixing_moment(const std::vector<double>& q, double a) {
    if (std::all_of(q.begin(), q.end(), [](double v) { return v == 0.0; })) return 0.0;
    auto integrand = [&q, a](double t) {
        double log_laplace = 0.0;
        for (double qj : q) log_laplace -= 0.5 * std::log1p(2.0 * t * qj);
        return -std::expm1(log_laplace) * std::pow(t, -1.0 - a);
    };
    boost::math::quadrature::exp_sinh<double> es;
    return a / boost::math::tgamma(1.0 - a) * es.integrate(integrand, 0.0, kInfinity);
}

}  // namespace

LevyNoiseModel LevyNoiseModel::cylindrical_stable(std::vector<double> coefficients, double alpha, std::size_t n,
                                                  HSpace basis, double inner_cutoff) {
    LevyNoiseModel m = cylindrical_generic(std::move(coefficients), OneDMeasure::stable(alpha), n, basis, inner_cutoff);
    m.kind_ = NoiseKind::CylindricalStable;
    return m;
}

LevyNoiseModel LevyNoiseModel::cylindrical_generic(std::vector<double> coefficients, OneDMeasure measure,
                                                   std::size_t n, HSpace basis, double inner_cutoff) {
    require_cutoff(inner_cutoff);
    require_finite(coefficients, "mode coefficients");
    LevyNoiseModel m;
    m.kind_ = NoiseKind::CylindricalGeneric;
    m.n_ = n;
    m.basis_ = basis;
    m.inner_cutoff_ = inner_cutoff;
    m.alpha_ = measure.alpha();
    m.basis_vectors_ = make_basis(basis, n, coefficients.size());
    m.coefficients_ = std::move(coefficients);
    m.measure_ = std::move(measure);
    return m;
}

LevyNoiseModel LevyNoiseModel::subordinated_wiener(std::vector<double> covariance_diag, double alpha, std::size_t n,
                                                   HSpace basis, double inner_cutoff, double subordinator_scale) {
    require_alpha(alpha);
    require_cutoff(inner_cutoff);
    require_finite(covariance_diag, "covariance diagonal");
    if (std::any_of(covariance_diag.begin(), covariance_diag.end(), [](double q) { return q < 0.0; })) {
        throw std::invalid_argument("covariance diagonal must be nonnegative");
    }
    if (!(subordinator_scale > 0.0)) throw std::invalid_argument("subordinator scale must be positive");
    LevyNoiseModel m;
    m.kind_ = NoiseKind::SubordinatedWiener;
    m.n_ = n;
    m.basis_ = basis;
    m.inner_cutoff_ = inner_cutoff;
    m.alpha_ = alpha;
    m.basis_vectors_ = make_basis(basis, n, covariance_diag.size());
    m.covariance_ = std::move(covariance_diag);
    m.subordinator_scale_ = subordinator_scale;
    m.mixing_moment_ = mixing_moment(m.covariance_, alpha / 2.0);
    return m;
}

LevyNoiseModel LevyNoiseModel::zero(std::size_t n, HSpace basis) {
    return cylindrical_stable({}, 1.5, n, basis, kDefaultInnerCutoff);
}

bool LevyNoiseModel::is_zero() const noexcept {
    const auto& v = kind_ == NoiseKind::SubordinatedWiener ? covariance_ : coefficients_;
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

void LevyNoiseModel::check_band(const NoiseBand& band) const {
    if (band.lo < inner_cutoff_) {
        std::ostringstream os;
        os << "jump band lower edge " << band.lo << " is below the inner cutoff " << inner_cutoff_;
        throw CutoffViolation(os.str());
    }
    if (band.hi < band.lo) throw std::invalid_argument("jump band has hi < lo");
}

double LevyNoiseModel::mode_band_rate(std::size_t j, const NoiseBand& band) const {
    const double beta = std::abs(coefficients_[j]);
    if (beta == 0.0 || band.hi <= band.lo) return 0.0;
    const double upper = std::isinf(band.hi) ? 0.0 : measure_.tail(band.hi / beta);
    return std::max(0.0, measure_.tail(band.lo / beta) - upper);
}

double LevyNoiseModel::large_jump_rate(double eps) const { return band_rate({eps, kInfinity}); }

double LevyNoiseModel::band_rate(const NoiseBand& band) const {
    check_band(band);
    if (band.hi <= band.lo) return 0.0;
    if (kind_ == NoiseKind::SubordinatedWiener) {
        const double a = alpha_ / 2.0;
        const double upper = std::isinf(band.hi) ? 0.0 : std::pow(band.hi, -alpha_);
        return subordinator_scale_ / a * mixing_moment_ * (std::pow(band.lo, -alpha_) - upper);
    }
    double rate = 0.0;
    for (std::size_t j = 0; j < coefficients_.size(); ++j) rate += mode_band_rate(j, band);
    return rate;
}

double LevyNoiseModel::small_jump_variance(double eps) const {
    if (eps < 0.0) throw std::invalid_argument("small_jump_variance requires eps >= 0");
    if (eps == 0.0) return 0.0;
    if (kind_ == NoiseKind::SubordinatedWiener) {
        const double a = alpha_ / 2.0;
        return subordinator_scale_ * mixing_moment_ * std::pow(eps, 2.0 - alpha_) / (1.0 - a);
    }
    double total = 0.0;
    for (double beta : coefficients_) {
        const double b = std::abs(beta);
        if (b == 0.0) continue;
        total += b * b * measure_.second_moment_below(eps / b);
    }
    return total;
}

TailMoment LevyNoiseModel::tail_moment(double theta) const {
    if (!(theta > 0.0 && theta <= 2.0)) throw std::invalid_argument("tail moment order must lie in (0, 2]");
    if (is_zero()) return {true, 0.0};
    if (kind_ == NoiseKind::SubordinatedWiener) {
        if (theta >= alpha_) return {false, kInfinity};
        return {true, subordinator_scale_ * mixing_moment_ / (alpha_ / 2.0 - theta / 2.0)};
    }
    double total = 0.0;
    for (double beta : coefficients_) {
        const double b = std::abs(beta);
        if (b == 0.0) continue;
        const TailMoment m = measure_.moment_above(theta, 1.0 / b);
        if (!m.finite) return {false, kInfinity};
        total += std::pow(b, theta) * m.value;
    }
    return {true, total};
}

GridFunction LevyNoiseModel::compensator_drift(const NoiseBand& band) const {
    check_band(band);
    GridFunction drift(n_);
    if (kind_ == NoiseKind::SubordinatedWiener) {
        // Centered Gaussian mixing: every subordinator jump contributes E[z | s] = 0.
        return drift;
    }
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        const double beta = coefficients_[j];
        const double b = std::abs(beta);
        if (b == 0.0 || band.hi <= band.lo) continue;
        drift.axpy(beta * measure_.signed_first_moment(band.lo / b, band.hi / b), basis_vectors_[j]);
    }
    return drift;
}

double LevyNoiseModel::cylindrical_jump_norm(std::size_t j, const NoiseBand& band, Engine& eng) const {
    const double b = std::abs(coefficients_[j]);
    const double u = uniform_open(eng);
    if (measure_.family() == OneDMeasure::Family::Stable) {
        // Inverse CDF of the power law r^{-1-alpha} restricted to (lo, hi].
        const double lo_term = std::pow(band.lo, -alpha_);
        const double hi_term = std::isinf(band.hi) ? 0.0 : std::pow(band.hi, -alpha_);
        return std::pow(lo_term - u * (lo_term - hi_term), -1.0 / alpha_);
    }
    const double upper = std::isinf(band.hi) ? 0.0 : measure_.tail(band.hi / b);
    const double lower = measure_.tail(band.lo / b);
    return b * measure_.inverse_tail(upper + u * (lower - upper));
}

GridFunction LevyNoiseModel::draw_cylindrical(const std::vector<double>& cumulative, const NoiseBand& band,
                                              Engine& eng) const {
    const double pick = uniform_open(eng) * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), pick);
    std::size_t j = static_cast<std::size_t>(it - cumulative.begin());
    if (j >= cumulative.size()) j = cumulative.size() - 1;
    const double r = cylindrical_jump_norm(j, band, eng);
    const double sign = uniform_open(eng) < 0.5 ? -1.0 : 1.0;
    GridFunction z = basis_vectors_[j];
    z *= sign * r;
    return z;
}

GridFunction LevyNoiseModel::draw_subordinated(double s, Engine& eng) const {
    std::normal_distribution<double> gauss(0.0, 1.0);
    GridFunction z(n_);
    for (std::size_t j = 0; j < covariance_.size(); ++j) {
        if (covariance_[j] == 0.0) continue;
        z.axpy(std::sqrt(s * covariance_[j]) * gauss(eng), basis_vectors_[j]);
    }
    return z;
}

double LevyNoiseModel::subordinator_cutoff(const NoiseBand& band) const {
    const double trace = std::accumulate(covariance_.begin(), covariance_.end(), 0.0);
    if (trace == 0.0) return kInfinity;
    return std::max(inner_cutoff_ * inner_cutoff_, band.lo * band.lo / 25.0) / trace;
}

namespace {

double jump_norm_from_basis(const GridFunction& z, HSpace space) { return std::sqrt(h_inner(space, z, z)); }

}  // namespace

JumpSchedule LevyNoiseModel::sample_schedule(const NoiseBand& band, double horizon, const RngStream& rng) const {
    if (kind_ == NoiseKind::SubordinatedWiener) return subordinated_schedule(band, horizon, rng);
    if (!(horizon > 0.0)) throw std::invalid_argument("schedule horizon must be positive");
    check_band(band);
    JumpSchedule schedule;
    schedule.horizon = horizon;
    schedule.band = band;

    std::vector<double> cumulative(coefficients_.size());
    double total = 0.0;
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        total += mode_band_rate(j, band);
        cumulative[j] = total;
    }
    if (total == 0.0) return schedule;

    Engine eng = rng.engine();
    double t = 0.0;
    while (true) {
        t = next_event_time(t, exponential(eng, total));
        if (t > horizon) break;
        schedule.events.push_back({t, draw_cylindrical(cumulative, band, eng)});
    }
    return schedule;
}

JumpSchedule LevyNoiseModel::subordinated_schedule(const NoiseBand& band, double horizon, const RngStream& rng) const {
    if (kind_ != NoiseKind::SubordinatedWiener) {
        throw std::logic_error("subordinated_schedule called on a cylindrical noise model");
    }
    if (!(horizon > 0.0)) throw std::invalid_argument("schedule horizon must be positive");
    check_band(band);
    JumpSchedule schedule;
    schedule.horizon = horizon;
    schedule.band = band;
    const double s_min = subordinator_cutoff(band);
    if (std::isinf(s_min) || band.hi <= band.lo) return schedule;

    // Subordinator jumps above s_min arrive at rate (c/a) s_min^{-a} with
    // Pareto(a) sizes; Gaussian mixing, then thinning to the band.
    const double a = alpha_ / 2.0;
    const double rate = subordinator_scale_ / a * std::pow(s_min, -a);
    Engine eng = rng.engine();
    double t = 0.0;
    while (true) {
        t = next_event_time(t, exponential(eng, rate));
        if (t > horizon) break;
        const double s = s_min * std::pow(uniform_open(eng), -1.0 / a);
        GridFunction z = draw_subordinated(s, eng);
        const double norm = jump_norm_from_basis(z, basis_);
        if (norm > band.lo && norm <= band.hi) schedule.events.push_back({t, std::move(z)});
    }
    return schedule;
}

std::vector<GridFunction> LevyNoiseModel::sample_jumps(const NoiseBand& band, std::size_t count, Engine& eng) const {
    std::vector<GridFunction> jumps;
    if (band_rate(band) == 0.0) return jumps;
    jumps.reserve(count);
    if (kind_ == NoiseKind::SubordinatedWiener) {
        const double s_min = subordinator_cutoff(band);
        const double a = alpha_ / 2.0;
        while (jumps.size() < count) {
            const double s = s_min * std::pow(uniform_open(eng), -1.0 / a);
            GridFunction z = draw_subordinated(s, eng);
            const double norm = jump_norm_from_basis(z, basis_);
            if (norm > band.lo && norm <= band.hi) jumps.push_back(std::move(z));
        }
        return jumps;
    }
    std::vector<double> cumulative(coefficients_.size());
    double total = 0.0;
    for (std::size_t j = 0; j < coefficients_.size(); ++j) {
        total += mode_band_rate(j, band);
        cumulative[j] = total;
    }
    for (std::size_t k = 0; k < count; ++k) jumps.push_back(draw_cylindrical(cumulative, band, eng));
    return jumps;
}

std::string LevyNoiseModel::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case NoiseKind::CylindricalStable: os << "cylindrical_stable"; break;
        case NoiseKind::CylindricalGeneric: os << "cylindrical_generic"; break;
        case NoiseKind::SubordinatedWiener: os << "subordinated_wiener"; break;
    }
    os << "(alpha=" << alpha_ << ", modes="
       << (kind_ == NoiseKind::SubordinatedWiener ? covariance_.size() : coefficients_.size())
       << ", inner_cutoff=" << inner_cutoff_ << ")";
    return os.str();
}

}  // namespace levylab
