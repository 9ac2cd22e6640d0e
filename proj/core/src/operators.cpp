#include "levylab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace levylab {

namespace {

// phi(g) g with phi(g) = (g^2 + delta^2)^{(p-2)/2}; phi(0) * 0 is taken as 0.
double flux(double g, double p, double delta) {
    if (g == 0.0) return 0.0;
    return std::pow(g * g + delta * delta, 0.5 * (p - 2.0)) * g;
}

double signed_power(double u, double r) { return u == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(u), r), u); }

// Forward differences on the n+1 edges, boundary values included.
std::vector<double> forward_differences(const GridFunction& u) {
    const std::size_t n = u.size();
    const double inv_h = 1.0 / u.spacing();
    std::vector<double> g(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double right = k < n ? u[k] : 0.0;
        const double left = k > 0 ? u[k - 1] : 0.0;
        g[k] = (right - left) * inv_h;
    }
    return g;
}

GridFunction signed_power(const GridFunction& u, double r) {
    GridFunction out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = signed_power(u[i], r);
    return out;
}

}  // namespace

// --- DriftOperator ---------------------------------------------------------

DriftOperator DriftOperator::p_laplace(double p, double regularization, double scale) {
    if (!(p > 1.0 && p <= 2.0)) {
        throw std::invalid_argument("p-Laplace exponent must lie in (1, 2], got " + std::to_string(p));
    }
    if (!(regularization >= 0.0)) throw std::invalid_argument("gradient regularization must be >= 0");
    if (!(scale >= 0.0 && std::isfinite(scale))) throw std::invalid_argument("drift scale must be finite and >= 0");
    DriftOperator op;
    op.kind_ = DriftKind::PLaplace;
    op.exponent_ = p;
    op.regularization_ = regularization;
    op.scale_ = scale;
    return op;
}

DriftOperator DriftOperator::fast_diffusion(double r, double scale) {
    if (!(r > 0.0 && r <= 1.0)) {
        throw std::invalid_argument("fast diffusion exponent must lie in (0, 1], got " + std::to_string(r));
    }
    if (!(scale >= 0.0 && std::isfinite(scale))) throw std::invalid_argument("drift scale must be finite and >= 0");
    DriftOperator op;
    op.kind_ = DriftKind::FastDiffusion;
    op.exponent_ = r;
    op.scale_ = scale;
    return op;
}

double DriftOperator::coercivity_exponent() const noexcept {
    return kind_ == DriftKind::PLaplace ? exponent_ : exponent_ + 1.0;
}

DriftOperator DriftOperator::with_constants(DriftConstants c) const {
    DriftOperator op = *this;
    op.constants_ = c;
    return op;
}

std::string DriftOperator::describe() const {
    std::ostringstream os;
    if (kind_ == DriftKind::PLaplace) {
        os << "p_laplace(p=" << exponent_ << ", delta_reg=" << regularization_;
    } else {
        os << "fast_diffusion(r=" << exponent_;
    }
    os << ", scale=" << scale_ << ")";
    return os.str();
}

NormSuite NormSuite::for_operator(const DriftOperator& op) {
    if (op.kind() == DriftKind::PLaplace) return {HSpace::L2, VNorm::W1p, op.exponent()};
    return {HSpace::HMinus1, VNorm::Lr1, op.exponent() + 1.0};
}

void require_matching_norms(const DriftOperator& op, const NormSuite& ns) {
    const NormSuite expected = NormSuite::for_operator(op);
    if (ns.h != expected.h || ns.v != expected.v || ns.v_exponent != expected.v_exponent) {
        throw std::invalid_argument("norm suite does not match the Gelfand triple of " + op.describe());
    }
}

// --- evaluation ------------------------------------------------------------

GridFunction apply_drift(const DriftOperator& op, const GridFunction& u) {
    GridFunction out;
    if (op.is_linear()) {
        out = discrete_laplacian(u);
    } else if (op.kind() == DriftKind::FastDiffusion) {
        out = discrete_laplacian(signed_power(u, op.exponent()));
    } else {
        const std::vector<double> g = forward_differences(u);
        const double inv_h = 1.0 / u.spacing();
        out = GridFunction(u.size());
        double left = flux(g[0], op.exponent(), op.regularization());
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double right = flux(g[i + 1], op.exponent(), op.regularization());
            out[i] = (right - left) * inv_h;
            left = right;
        }
    }
    if (op.scale() != 1.0) out *= op.scale();
    return out;
}

double h_norm(const NormSuite& ns, const GridFunction& u) { return std::sqrt(std::max(0.0, h_inner(ns.h, u, u))); }

double v_norm(const NormSuite& ns, const GridFunction& u) {
    const double q = ns.v_exponent;
    double sum = 0.0;
    if (ns.v == VNorm::W1p) {
        for (double g : forward_differences(u)) sum += std::pow(std::abs(g), q);
    } else {
        for (double x : u.values()) sum += std::pow(std::abs(x), q);
    }
    return std::pow(u.spacing() * sum, 1.0 / q);
}

double duality(const DriftOperator& op, const NormSuite& ns, const GridFunction& w, const GridFunction& v) {
    require_matching_norms(op, ns);
    require_same_grid(w, v);
    double sum = 0.0;
    if (op.kind() == DriftKind::PLaplace) {
        const std::vector<double> gw = forward_differences(w);
        const std::vector<double> gv = forward_differences(v);
        for (std::size_t k = 0; k < gw.size(); ++k) sum += flux(gw[k], op.exponent(), op.regularization()) * gv[k];
    } else {
        for (std::size_t i = 0; i < w.size(); ++i) sum += signed_power(w[i], op.exponent()) * v[i];
    }
    return -op.scale() * w.spacing() * sum;
}

double pairing(const DriftOperator& op, const NormSuite& ns, const GridFunction& u) { return duality(op, ns, u, u); }

double pairing_inner_form(const DriftOperator& op, const NormSuite& ns, const GridFunction& u) {
    require_matching_norms(op, ns);
    return h_inner(ns.h, apply_drift(op, u), u);
}

double pairing_difference(const DriftOperator& op, const NormSuite& ns, const GridFunction& v1,
                          const GridFunction& v2) {
    require_matching_norms(op, ns);
    require_same_grid(v1, v2);
    double sum = 0.0;
    if (op.kind() == DriftKind::PLaplace) {
        const std::vector<double> g1 = forward_differences(v1);
        const std::vector<double> g2 = forward_differences(v2);
        for (std::size_t k = 0; k < g1.size(); ++k) {
            const double df = flux(g1[k], op.exponent(), op.regularization()) -
                              flux(g2[k], op.exponent(), op.regularization());
            sum += df * (g1[k] - g2[k]);
        }
    } else {
        for (std::size_t i = 0; i < v1.size(); ++i) {
            sum += (signed_power(v1[i], op.exponent()) - signed_power(v2[i], op.exponent())) * (v1[i] - v2[i]);
        }
    }
    return -op.scale() * v1.spacing() * sum;
}

double dissipativity_ratio(const DriftOperator& op, const NormSuite& ns, const GridFunction& v1,
                           const GridFunction& v2, double exponent) {
    const double denom = std::pow(v_norm(ns, v1 - v2), exponent);
    if (!(denom > 0.0)) throw std::invalid_argument("dissipativity ratio undefined for v1 == v2");
    return -2.0 * pairing_difference(op, ns, v1, v2) / denom;
}

GridFunction random_probe(std::size_t n, double scale, double decay_exponent, Engine& eng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    GridFunction out(n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double c = scale * gauss(eng) * std::pow(static_cast<double>(j), -decay_exponent);
        out.axpy(c, sine_mode(n, j));
    }
    return out;
}

double predicted_decay_time(double c_tilde, double varpi, double e0, double e1) {
    if (!(c_tilde > 0.0)) return std::numeric_limits<double>::infinity();
    const double q = varpi / 2.0;
    if (q == 1.0) return std::log(e0 / e1) / c_tilde;
    return (std::pow(e0, 1.0 - q) - std::pow(e1, 1.0 - q)) / ((1.0 - q) * c_tilde);
}

// --- condition checkers ----------------------------------------------------

double ConditionReport::value(const std::string& key) const {
    for (const auto& [k, v] : values) {
        if (k == key) return v;
    }
    throw std::out_of_range("condition report has no value '" + key + "'");
}

bool ConditionReport::has(const std::string& key) const {
    return std::any_of(values.begin(), values.end(), [&](const auto& kv) { return kv.first == key; });
}

namespace {

GridFunction unit_probe(const NormSuite& ns, std::size_t n, double decay, Engine& eng) {
    GridFunction v = random_probe(n, 1.0, decay, eng);
    v *= 1.0 / h_norm(ns, v);
    return v;
}

}  // namespace

ConditionReport check_H7_dissipativity(const DriftOperator& op, const NormSuite& ns, std::size_t n,
                                       std::size_t sample_count, const RngStream& rng, double tolerance,
                                       const ProbeDistribution& probes) {
    require_matching_norms(op, ns);
    ConditionReport report;
    report.condition = "H7_weak_dissipativity";
    report.samples = sample_count;
    Engine eng = rng.engine();
    double max_value = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sample_count; ++k) {
        const double scale = probes.scales[k % probes.scales.size()];
        const GridFunction v1 = random_probe(n, scale, probes.decay_exponent, eng);
        const GridFunction v2 = random_probe(n, scale, probes.decay_exponent, eng);
        const double value = 2.0 * pairing_difference(op, ns, v1, v2);
        max_value = std::max(max_value, value);
        if (value > tolerance) ++report.violations;
    }
    report.values = {{"max_pairing_difference", max_value}, {"tolerance", tolerance}};
    report.pass = report.violations == 0;
    return report;
}

ConditionReport check_H6_decay(const DriftOperator& op, const NormSuite& ns, std::size_t n,
                               const std::vector<double>& varpi_grid, std::size_t sample_count, const RngStream& rng,
                               const ProbeDistribution& probes) {
    require_matching_norms(op, ns);
    if (varpi_grid.empty()) throw std::invalid_argument("check_H6_decay needs at least one varpi");
    ConditionReport report;
    report.condition = "H6_decay";
    report.samples = sample_count;
    std::vector<double> c_tilde(varpi_grid.size(), std::numeric_limits<double>::infinity());
    Engine eng = rng.engine();
    for (std::size_t k = 0; k < sample_count; ++k) {
        const double scale = probes.scales[k % probes.scales.size()];
        const GridFunction v = random_probe(n, scale, probes.decay_exponent, eng);
        const double hn = h_norm(ns, v);
        if (hn == 0.0) continue;
        const double two_pairing = 2.0 * pairing(op, ns, v);
        for (std::size_t w = 0; w < varpi_grid.size(); ++w) {
            c_tilde[w] = std::min(c_tilde[w], -two_pairing / std::pow(hn, varpi_grid[w]));
        }
    }
    double best_time = std::numeric_limits<double>::infinity();
    double best_varpi = varpi_grid.front();
    double best_c = 0.0;
    for (std::size_t w = 0; w < varpi_grid.size(); ++w) {
        std::ostringstream key;
        key << "C_tilde@" << varpi_grid[w];
        report.values.emplace_back(key.str(), c_tilde[w]);
        if (c_tilde[w] <= 0.0) ++report.violations;
        const double t = predicted_decay_time(c_tilde[w], varpi_grid[w], 1.0, 1e-4);
        if (t < best_time) {
            best_time = t;
            best_varpi = varpi_grid[w];
            best_c = c_tilde[w];
        }
    }
    report.values.emplace_back("best_varpi", best_varpi);
    report.values.emplace_back("best_C_tilde", best_c);
    report.values.emplace_back("predicted_decay_time", best_time);
    report.pass = best_c > 0.0;
    report.note = "calibrated on the grid; not an estimate of the continuum constant";
    return report;
}

double max_line_increment(const DriftOperator& op, const NormSuite& ns, const GridFunction& v1,
                          const GridFunction& v2, const GridFunction& v, double s0, double s1, double step,
                          double* argmax_s) {
    const auto steps = static_cast<std::size_t>(std::llround((s1 - s0) / step));
    auto value_at = [&](std::size_t k) {
        GridFunction w = v1;
        w.axpy(s0 + static_cast<double>(k) * step, v2);
        return duality(op, ns, w, v);
    };
    double previous = value_at(0);
    double best = 0.0;
    for (std::size_t k = 1; k <= steps; ++k) {
        const double current = value_at(k);
        const double inc = std::abs(current - previous);
        if (inc > best) {
            best = inc;
            if (argmax_s) *argmax_s = s0 + static_cast<double>(k - 1) * step;
        }
        previous = current;
    }
    return best;
}

ConditionReport check_H1_hemicontinuity(const DriftOperator& op, const NormSuite& ns, std::size_t n,
                                        std::size_t line_count, const RngStream& rng, double step,
                                        double min_order) {
    require_matching_norms(op, ns);
    ConditionReport report;
    report.condition = "H1_hemicontinuity";
    report.samples = line_count;
    Engine eng = rng.engine();
    double worst = 0.0;
    double lowest_order = std::numeric_limits<double>::infinity();
    constexpr double kRefine = 16.0;
    for (std::size_t k = 0; k < line_count; ++k) {
        const GridFunction v1 = unit_probe(ns, n, 1.0, eng);
        const GridFunction v2 = unit_probe(ns, n, 1.0, eng);
        const GridFunction v = unit_probe(ns, n, 1.0, eng);
        const double coarse = max_line_increment(op, ns, v1, v2, v, -1.0, 1.0, step);
        worst = std::max(worst, coarse);
        if (coarse == 0.0) continue;  // constant along the line
        const double fine = max_line_increment(op, ns, v1, v2, v, -1.0, 1.0, step / kRefine);
        const double order = fine == 0.0 ? 1.0 : std::log(coarse / fine) / std::log(kRefine);
        lowest_order = std::min(lowest_order, order);
        if (order < min_order) ++report.violations;
    }
    report.values = {{"max_increment", worst},
                     {"min_observed_order", lowest_order},
                     {"step", step},
                     {"min_order", min_order}};
    report.pass = report.violations == 0;
    report.note = "advisory";
    return report;
}

ConditionReport check_strong_dissipativity_absent(const DriftOperator& op, const NormSuite& ns, std::size_t n,
                                                  std::size_t sample_count, const RngStream& rng, double exponent,
                                                  const ProbeDistribution& probes) {
    require_matching_norms(op, ns);
    ConditionReport report;
    report.condition = "strong_dissipativity_absent";
    report.samples = sample_count;
    Engine eng = rng.engine();
    double random_inf = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < sample_count; ++k) {
        const double scale = probes.scales[k % probes.scales.size()];
        const GridFunction v1 = random_probe(n, scale, probes.decay_exponent, eng);
        const GridFunction v2 = random_probe(n, scale, probes.decay_exponent, eng);
        if (v1 == v2) continue;
        random_inf = std::min(random_inf, dissipativity_ratio(op, ns, v1, v2, exponent));
    }
    const GridFunction e1 = basis_vector(ns.h, n, 1);
    const GridFunction zero(n);
    double first = 0.0;
    double last = 0.0;
    for (int e = 0; e <= 4; ++e) {
        const double k = std::pow(10.0, e);
        const double ratio = dissipativity_ratio(op, ns, k * e1, zero, exponent);
        std::ostringstream key;
        key << "family_ratio@k=" << k;
        report.values.emplace_back(key.str(), ratio);
        if (e == 0) first = ratio;
        last = ratio;
    }
    report.values.emplace_back("random_pair_inf", random_inf);
    report.values.emplace_back("exponent", exponent);
    report.pass = last < 0.05 * first;
    report.note = report.pass ? "ratio collapses along u_k = k e_1: no uniform strong dissipativity"
                              : "ratio bounded below along u_k = k e_1";
    return report;
}

}  // namespace levylab
