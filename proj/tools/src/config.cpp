#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "levylab/errors.hpp"
#include "levylab/report.hpp"

namespace levylab::cli {

namespace {

std::string join_lines(const std::vector<std::string>& v) {
    std::string s = "invalid config:";
    for (const auto& e : v) s += "\n  - " + e;
    return s;
}

// Reads one TOML table, remembering which keys were consumed so that the rest
// can be reported as unknown. Type errors go to errs; range checks happen later.
class Section {
public:
    Section(const toml::table* tbl, std::string name, std::vector<std::string>& errs)
        : tbl_(tbl), name_(std::move(name)), errs_(errs) {}

    bool present() const { return tbl_ != nullptr; }
    bool has(const std::string& key) const { return tbl_ && tbl_->contains(key); }

    void real(const std::string& key, double& out) {
        const toml::node* n = take(key);
        if (!n) return;
        if (auto v = n->value<double>(); v && (n->is_floating_point() || n->is_integer())) out = *v;
        else bad(key, "a number");
    }
    void count(const std::string& key, std::size_t& out) {
        const toml::node* n = take(key);
        if (!n) return;
        auto v = n->value_exact<std::int64_t>();
        if (!v || *v < 0) return bad(key, "a nonnegative integer");
        out = static_cast<std::size_t>(*v);
    }
    void text(const std::string& key, std::string& out) {
        const toml::node* n = take(key);
        if (!n) return;
        if (auto v = n->value_exact<std::string>()) out = *v;
        else bad(key, "a string");
    }
    void flag(const std::string& key, bool& out) {
        const toml::node* n = take(key);
        if (!n) return;
        if (auto v = n->value_exact<bool>()) out = *v;
        else bad(key, "a boolean");
    }
    void reals(const std::string& key, std::vector<double>& out) {
        const toml::node* n = take(key);
        if (!n) return;
        const toml::array* arr = n->as_array();
        if (!arr) return bad(key, "an array of numbers");
        std::vector<double> v;
        for (const auto& el : *arr) {
            auto x = el.value<double>();
            if (!x || !(el.is_floating_point() || el.is_integer())) return bad(key, "an array of numbers");
            v.push_back(*x);
        }
        out = std::move(v);
    }
    void counts(const std::string& key, std::vector<std::size_t>& out) {
        const toml::node* n = take(key);
        if (!n) return;
        const toml::array* arr = n->as_array();
        if (!arr) return bad(key, "an array of nonnegative integers");
        std::vector<std::size_t> v;
        for (const auto& el : *arr) {
            auto x = el.value_exact<std::int64_t>();
            if (!x || *x < 0) return bad(key, "an array of nonnegative integers");
            v.push_back(static_cast<std::size_t>(*x));
        }
        out = std::move(v);
    }
    void texts(const std::string& key, std::vector<std::string>& out) {
        const toml::node* n = take(key);
        if (!n) return;
        const toml::array* arr = n->as_array();
        if (!arr) return bad(key, "an array of strings");
        std::vector<std::string> v;
        for (const auto& el : *arr) {
            auto x = el.value_exact<std::string>();
            if (!x) return bad(key, "an array of strings");
            v.push_back(*x);
        }
        out = std::move(v);
    }
    const toml::node* take(const std::string& key) {
        seen_.insert(key);
        return tbl_ ? tbl_->get(key) : nullptr;
    }
    void bad(const std::string& key, const char* what) { errs_.push_back(name_ + "." + key + " must be " + what); }

    // Reports every key that no reader asked for.
    void finish() {
        if (!tbl_) return;
        for (const auto& [k, v] : *tbl_) {
            std::string key(k.str());
            if (!seen_.count(key)) errs_.push_back("unknown key " + name_ + "." + key);
        }
    }

    const toml::table* subtable(const std::string& key) {
        const toml::node* n = take(key);
        if (!n) return nullptr;
        if (!n->is_table()) {
            errs_.push_back(name_ + "." + key + " must be a table");
            return nullptr;
        }
        return n->as_table();
    }

private:
    const toml::table* tbl_;
    std::string name_;
    std::vector<std::string>& errs_;
    std::set<std::string> seen_;
};

const toml::table* top_table(const toml::table& root, const std::string& key, std::vector<std::string>& errs) {
    const toml::node* n = root.get(key);
    if (!n) return nullptr;
    if (!n->is_table()) {
        errs.push_back(key + " must be a table");
        return nullptr;
    }
    return n->as_table();
}

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

const char* kind_name(DriftKind k) { return k == DriftKind::PLaplace ? "p_laplace" : "fast_diffusion"; }
const char* scheme_name(StepScheme s) { return s == StepScheme::ImplicitEuler ? "implicit_euler" : "explicit_euler"; }

void read_config(const toml::table& root, ExperimentConfig& c, std::vector<std::string>& errs) {
    static const std::set<std::string> top{"operator", "noise", "sim", "seed", "initial", "task"};
    for (const auto& [k, v] : root)
        if (!top.count(std::string(k.str()))) errs.push_back("unknown key " + std::string(k.str()));

    {
        Section s(top_table(root, "operator", errs), "operator", errs);
        if (!s.present()) errs.push_back("missing table [operator]");
        std::string kind = kind_name(c.op.kind);
        if (s.present() && !s.has("kind")) errs.push_back("operator.kind is required");
        s.text("kind", kind);
        if (kind == "p_laplace") {
            c.op.kind = DriftKind::PLaplace;
            s.real("p", c.op.exponent);
            if (s.has("r")) errs.push_back("operator.r applies to fast_diffusion only");
        } else if (kind == "fast_diffusion") {
            c.op.kind = DriftKind::FastDiffusion;
            if (!s.has("r")) c.op.exponent = 0.5;
            s.real("r", c.op.exponent);
            if (s.has("p")) errs.push_back("operator.p applies to p_laplace only");
        } else {
            errs.push_back("operator.kind must be p_laplace or fast_diffusion, got \"" + kind + "\"");
        }
        s.take("p");
        s.take("r");
        s.real("delta_reg", c.op.delta_reg);
        s.real("scale", c.op.scale);
        s.count("n", c.op.n);
        s.finish();
    }
    {
        Section s(top_table(root, "noise", errs), "noise", errs);
        s.text("kind", c.noise.kind);
        s.real("alpha", c.noise.alpha);
        s.reals("coefficients", c.noise.coefficients);
        s.reals("covariance_diag", c.noise.covariance_diag);
        s.real("inner_cutoff", c.noise.inner_cutoff);
        s.real("subordinator_scale", c.noise.subordinator_scale);
        s.text("measure", c.noise.measure);
        s.real("measure_parameter", c.noise.measure_parameter);
        // The default coefficients belong to the cylindrical kinds.
        if (c.noise.kind != "cylindrical_stable" && c.noise.kind != "cylindrical_generic" && !s.has("coefficients"))
            c.noise.coefficients.clear();
        s.finish();
    }
    {
        Section s(top_table(root, "sim", errs), "sim", errs);
        s.real("horizon", c.sim.horizon);
        s.real("max_dt", c.sim.max_dt);
        s.real("step_tolerance", c.sim.step_tolerance);
        if (const toml::node* n = s.take("truncation")) {
            if (auto str = n->value_exact<std::string>()) {
                if (*str == "full") c.sim.truncation.reset();
                else errs.push_back("sim.truncation must be a number or \"full\"");
            } else if (auto x = n->value<double>(); x && (n->is_floating_point() || n->is_integer())) {
                c.sim.truncation = *x;
            } else {
                errs.push_back("sim.truncation must be a number or \"full\"");
            }
        }
        s.real("record_dt", c.sim.record_dt);
        std::string scheme = scheme_name(c.sim.scheme);
        s.text("scheme", scheme);
        if (scheme == "implicit_euler") c.sim.scheme = StepScheme::ImplicitEuler;
        else if (scheme == "explicit_euler") c.sim.scheme = StepScheme::ExplicitEuler;
        else errs.push_back("sim.scheme must be implicit_euler or explicit_euler, got \"" + scheme + "\"");
        s.finish();
    }
    {
        Section s(top_table(root, "seed", errs), "seed", errs);
        if (const toml::node* n = s.take("master")) {
            // TOML integers are signed 64-bit; larger seeds are written as strings.
            if (auto v = n->value_exact<std::int64_t>(); v && *v >= 0) {
                c.seed.master = static_cast<std::uint64_t>(*v);
            } else if (auto str = n->value_exact<std::string>()) {
                try {
                    std::size_t pos = 0;
                    c.seed.master = std::stoull(*str, &pos);
                    if (pos != str->size() || str->empty() || (*str)[0] == '-') throw std::invalid_argument("");
                } catch (const std::exception&) {
                    errs.push_back("seed.master must be an unsigned 64-bit integer");
                }
            } else {
                errs.push_back("seed.master must be an unsigned 64-bit integer");
            }
        }
        s.text("policy", c.seed.policy);
        s.finish();
    }
    {
        Section s(top_table(root, "initial", errs), "initial", errs);
        s.text("kind", c.initial.kind);
        s.real("norm", c.initial.norm);
        s.count("mode", c.initial.mode);
        s.reals("values", c.initial.values);
        s.finish();
    }

    Section task(top_table(root, "task", errs), "task", errs);
    {
        Section s(task.subtable("simulate"), "task.simulate", errs);
        s.flag("full_state", c.simulate.full_state);
        s.finish();
    }
    {
        Section s(task.subtable("noise_test"), "task.noise_test", errs);
        auto& p = c.noise_test;
        s.real("band_lo", p.band_lo);
        s.count("interarrival_events", p.interarrival_events);
        s.count("symmetry_samples", p.symmetry_samples);
        s.count("tail_samples", p.tail_samples);
        s.real("tail_fraction", p.tail_fraction);
        s.real("tail_tolerance", p.tail_tolerance);
        s.count("count_replicates", p.count_replicates);
        s.real("count_horizon", p.count_horizon);
        s.finish();
    }
    {
        Section s(task.subtable("conditions"), "task.conditions", errs);
        s.count("samples", c.conditions.samples);
        s.counts("grid_sizes", c.conditions.grid_sizes);
        s.reals("varpi_grid", c.conditions.varpi_grid);
        s.count("lines", c.conditions.lines);
        s.finish();
    }
    {
        Section s(task.subtable("a0"), "task.a0", errs);
        s.count("samples", c.a0_samples);
        s.finish();
    }
    {
        Section s(task.subtable("a1_1"), "task.a1_1", errs);
        s.real("horizon", c.a1_1.horizon);
        s.real("target", c.a1_1.target);
        s.finish();
    }
    {
        Section s(task.subtable("a1_2"), "task.a1_2", errs);
        s.real("t", c.a1_2.t);
        s.reals("ladder", c.a1_2.ladder);
        s.count("paths", c.a1_2.paths);
        s.finish();
    }
    {
        Section s(task.subtable("a1_3"), "task.a1_3", errs);
        auto& p = c.a1_3.params;
        s.real("eta", p.eta);
        s.real("zeta", p.zeta);
        s.real("t", p.t);
        s.count("points", p.points);
        s.count("paths_per_point", p.paths_per_point);
        s.reals("eta_grid", p.eta_grid);
        s.reals("zeta_grid", c.a1_3.zeta_grid);
        s.reals("t_grid", c.a1_3.t_grid);
        s.finish();
    }
    {
        Section s(task.subtable("e_property"), "task.e_property", errs);
        s.reals("t_grid", c.e_property.t_grid);
        s.count("paths", c.e_property.paths);
        s.real("distance", c.e_property.distance);
        s.finish();
    }
    {
        Section s(task.subtable("access"), "task.access", errs);
        s.real("kappa", c.access.kappa);
        s.reals("times", c.access.times);
        s.count("paths", c.access.paths);
        s.count("min_window", c.access.min_window);
        s.finish();
    }
    {
        Section s(task.subtable("ergodic"), "task.ergodic", errs);
        auto& p = c.ergodic.params;
        std::vector<std::string> names;
        for (const auto& o : p.observables) names.push_back(o.name());
        s.texts("observables", names);
        p.observables.clear();
        for (const auto& nm : names) {
            try {
                p.observables.push_back(Observable::parse(nm));
            } catch (const std::exception&) {
                errs.push_back("task.ergodic.observables: unknown observable \"" + nm +
                               "\" (h_norm, v_norm or mode_<j>)");
            }
        }
        s.real("burn_in", p.burn_in);
        s.reals("horizons", p.horizons);
        s.count("replicates", p.replicates);
        s.real("tolerance", p.tolerance);
        s.real("distance", c.ergodic.distance);
        s.finish();
    }
    {
        Section s(task.subtable("lyapunov"), "task.lyapunov", errs);
        s.real("theta_hat", c.lyapunov.theta_hat);
        s.reals("horizons", c.lyapunov.horizons);
        s.count("paths", c.lyapunov.paths);
        s.finish();
    }
    task.finish();
}

void check_ladder(const std::vector<double>& v, const std::string& name, bool strictly_increasing,
                  std::vector<std::string>& errs) {
    if (v.empty()) errs.push_back(name + " must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!finite_pos(v[i])) {
            errs.push_back(name + " entries must be positive and finite");
            return;
        }
        if (strictly_increasing && i > 0 && !(v[i] > v[i - 1])) {
            errs.push_back(name + " must be strictly increasing");
            return;
        }
    }
}

// Appends the message of whatever `f` throws.
template <class F>
void capture(const std::string& prefix, std::vector<std::string>& errs, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        errs.push_back(prefix + e.what());
    }
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join_lines(violations)), violations_(std::move(violations)) {}

std::vector<std::string> ExperimentConfig::violations() const {
    std::vector<std::string> e;

    // operator
    const double x = op.exponent;
    if (op.kind == DriftKind::PLaplace) {
        if (!(x > 1.0 && x <= 2.0))
            e.push_back("operator.p = " + format_number(x) +
                        " is out of range: p-Laplace needs p in (1,2) for d = 1 (p = 2 is admitted as the linear "
                        "heat-equation check)");
    } else if (!(x > 0.0 && x <= 1.0)) {
        e.push_back("operator.r = " + format_number(x) +
                    " is out of range: fast diffusion needs r in (0,1) for d = 1 (r = 1 is admitted as the linear "
                    "check)");
    }
    if (!(std::isfinite(op.delta_reg) && op.delta_reg >= 0.0)) e.push_back("operator.delta_reg must be >= 0");
    if (!(std::isfinite(op.scale) && op.scale >= 0.0)) e.push_back("operator.scale must be >= 0");
    if (op.n < 2 || op.n > 4096) e.push_back("operator.n must lie in [2, 4096]");

    // noise
    static const std::set<std::string> noise_kinds{"cylindrical_stable", "cylindrical_generic",
                                                   "subordinated_wiener", "zero"};
    if (!noise_kinds.count(noise.kind))
        e.push_back("noise.kind must be one of cylindrical_stable, cylindrical_generic, subordinated_wiener, zero");
    if (!(noise.alpha > 0.0 && noise.alpha < 2.0)) e.push_back("noise.alpha must lie in (0,2)");
    if (!(noise.inner_cutoff > 0.0 && noise.inner_cutoff < 1.0)) e.push_back("noise.inner_cutoff must lie in (0,1)");
    const bool cylindrical = noise.kind == "cylindrical_stable" || noise.kind == "cylindrical_generic";
    if (cylindrical) {
        if (noise.coefficients.empty()) e.push_back("noise.coefficients required for " + noise.kind);
        if (noise.coefficients.size() > op.n) e.push_back("noise.coefficients has more entries than operator.n");
        for (double b : noise.coefficients)
            if (!std::isfinite(b)) {
                e.push_back("noise.coefficients must be finite");
                break;
            }
        if (!noise.covariance_diag.empty()) e.push_back("noise.covariance_diag applies to subordinated_wiener only");
    }
    if (noise.kind == "subordinated_wiener") {
        if (noise.covariance_diag.empty()) e.push_back("noise.covariance_diag required for subordinated_wiener");
        if (noise.covariance_diag.size() > op.n) e.push_back("noise.covariance_diag has more entries than operator.n");
        for (double q : noise.covariance_diag)
            if (!(std::isfinite(q) && q >= 0.0)) {
                e.push_back("noise.covariance_diag entries must be >= 0");
                break;
            }
        if (!noise.coefficients.empty()) e.push_back("noise.coefficients applies to cylindrical kinds only");
        if (!finite_pos(noise.subordinator_scale)) e.push_back("noise.subordinator_scale must be positive");
    }
    if (noise.kind == "cylindrical_generic") {
        if (noise.measure != "stable" && noise.measure != "truncated_stable" && noise.measure != "tempered_stable")
            e.push_back("noise.measure must be stable, truncated_stable or tempered_stable");
        if (!finite_pos(noise.measure_parameter)) e.push_back("noise.measure_parameter must be positive");
    }

    // sim
    if (!finite_pos(sim.horizon)) e.push_back("sim.horizon must be positive");
    if (!finite_pos(sim.max_dt)) e.push_back("sim.max_dt must be positive");
    if (!finite_pos(sim.step_tolerance)) e.push_back("sim.step_tolerance must be positive");
    if (!finite_pos(sim.record_dt)) e.push_back("sim.record_dt must be positive");
    if (sim.truncation) {
        if (*sim.truncation < noise.inner_cutoff)
            e.push_back("sim.truncation = " + format_number(*sim.truncation) + " is below noise.inner_cutoff = " +
                        format_number(noise.inner_cutoff) + " (need eps >= eps0)");
        if (!(*sim.truncation <= 1.0)) e.push_back("sim.truncation must be <= 1 (or \"full\")");
    }

    if (seed.policy != "counter") e.push_back("seed.policy must be \"counter\"");

    // initial
    if (initial.kind == "random" || initial.kind == "sine_mode") {
        if (!(std::isfinite(initial.norm) && initial.norm >= 0.0)) e.push_back("initial.norm must be >= 0");
    }
    if (initial.kind == "sine_mode" && (initial.mode < 1 || initial.mode > op.n))
        e.push_back("initial.mode must lie in [1, operator.n]");
    if (initial.kind == "values") {
        if (initial.values.size() != op.n) e.push_back("initial.values must have operator.n entries");
        for (double v : initial.values)
            if (!std::isfinite(v)) {
                e.push_back("initial.values must be finite");
                break;
            }
    } else if (!initial.values.empty()) {
        e.push_back("initial.values applies to kind = \"values\" only");
    }
    if (initial.kind != "random" && initial.kind != "sine_mode" && initial.kind != "zero" && initial.kind != "values")
        e.push_back("initial.kind must be random, sine_mode, zero or values");

    // tasks
    const auto& nt = noise_test;
    if (!finite_pos(nt.band_lo) || nt.band_lo < noise.inner_cutoff)
        e.push_back("task.noise_test.band_lo must be >= noise.inner_cutoff");
    if (nt.interarrival_events < 2 || nt.symmetry_samples < 2 || nt.tail_samples < 10 || nt.count_replicates < 2)
        e.push_back("task.noise_test sample sizes are too small");
    if (!(nt.tail_fraction > 0.0 && nt.tail_fraction < 1.0)) e.push_back("task.noise_test.tail_fraction in (0,1)");
    if (!finite_pos(nt.tail_tolerance)) e.push_back("task.noise_test.tail_tolerance must be positive");
    if (!finite_pos(nt.count_horizon)) e.push_back("task.noise_test.count_horizon must be positive");

    if (conditions.samples == 0 || conditions.lines == 0) e.push_back("task.conditions counts must be positive");
    if (conditions.grid_sizes.empty()) e.push_back("task.conditions.grid_sizes must not be empty");
    for (auto g : conditions.grid_sizes)
        if (g < 2) e.push_back("task.conditions.grid_sizes entries must be >= 2");
    check_ladder(conditions.varpi_grid, "task.conditions.varpi_grid", false, e);

    if (a0_samples < 2) e.push_back("task.a0.samples must be >= 2");

    if (!finite_pos(a1_1.horizon)) e.push_back("task.a1_1.horizon must be positive");
    if (!(a1_1.target > 0.0 && a1_1.target < 1.0)) e.push_back("task.a1_1.target must lie in (0,1)");

    if (!finite_pos(a1_2.t)) e.push_back("task.a1_2.t must be positive");
    if (a1_2.ladder.size() < 2) e.push_back("task.a1_2.ladder needs at least two levels");
    for (std::size_t i = 0; i < a1_2.ladder.size(); ++i) {
        double eps = a1_2.ladder[i];
        if (!(eps >= noise.inner_cutoff && eps <= 1.0))
            e.push_back("task.a1_2.ladder entry " + format_number(eps) + " must lie in [noise.inner_cutoff, 1]");
        if (i > 0 && !(eps < a1_2.ladder[i - 1])) e.push_back("task.a1_2.ladder must be strictly decreasing");
    }
    if (a1_2.paths < 2) e.push_back("task.a1_2.paths must be >= 2");

    capture("task.a1_3: ", e, [&] { a1_3.params.validate(); });
    for (double z : a1_3.zeta_grid)
        if (!(z > 0.0 && z <= a1_3.params.eta / 2.0)) e.push_back("task.a1_3.zeta_grid entries must lie in (0, eta/2]");
    for (double t : a1_3.t_grid)
        if (!finite_pos(t)) e.push_back("task.a1_3.t_grid entries must be positive");

    check_ladder(e_property.t_grid, "task.e_property.t_grid", true, e);
    if (e_property.paths == 0) e.push_back("task.e_property.paths must be positive");
    if (!finite_pos(e_property.distance)) e.push_back("task.e_property.distance must be positive");

    if (!finite_pos(access.kappa)) e.push_back("task.access.kappa must be positive");
    check_ladder(access.times, "task.access.times", true, e);
    if (access.paths == 0) e.push_back("task.access.paths must be positive");
    if (access.min_window == 0) e.push_back("task.access.min_window must be positive");

    const auto& up = ergodic.params;
    if (up.observables.empty()) e.push_back("task.ergodic.observables must not be empty");
    for (const auto& o : up.observables)
        if (o.kind == Observable::Kind::Mode && (o.mode < 1 || o.mode > op.n))
            e.push_back("task.ergodic.observables: mode index out of range");
    if (!(std::isfinite(up.burn_in) && up.burn_in >= 0.0)) e.push_back("task.ergodic.burn_in must be >= 0");
    check_ladder(up.horizons, "task.ergodic.horizons", true, e);
    if (!up.horizons.empty() && !(up.horizons.front() > up.burn_in))
        e.push_back("task.ergodic.horizons must exceed burn_in");
    if (up.replicates < 2) e.push_back("task.ergodic.replicates must be >= 2");
    if (!finite_pos(up.tolerance)) e.push_back("task.ergodic.tolerance must be positive");
    if (!finite_pos(ergodic.distance)) e.push_back("task.ergodic.distance must be positive");

    check_ladder(lyapunov.horizons, "task.lyapunov.horizons", true, e);
    if (lyapunov.paths < 2) e.push_back("task.lyapunov.paths must be >= 2");

    // Checks that need the constructed model objects; skipped when the blocks
    // above are already broken.
    if (e.empty()) {
        capture("operator: ", e, [&] { (void)make_operator(); });
        capture("noise: ", e, [&] { (void)make_noise(); });
    }
    if (e.empty()) {
        capture("task.lyapunov.theta_hat: ", e,
                [&] { LyapunovConfig{lyapunov.theta_hat}.validate(make_operator(), make_noise()); });
    }
    return e;
}

DriftOperator ExperimentConfig::make_operator() const {
    return op.kind == DriftKind::PLaplace ? DriftOperator::p_laplace(op.exponent, op.delta_reg, op.scale)
                                          : DriftOperator::fast_diffusion(op.exponent, op.scale);
}

NormSuite ExperimentConfig::make_norms() const { return NormSuite::for_operator(make_operator()); }

LevyNoiseModel ExperimentConfig::make_noise() const {
    const HSpace basis = make_norms().h;
    if (noise.kind == "zero") return LevyNoiseModel::zero(op.n, basis);
    if (noise.kind == "subordinated_wiener")
        return LevyNoiseModel::subordinated_wiener(noise.covariance_diag, noise.alpha, op.n, basis,
                                                   noise.inner_cutoff, noise.subordinator_scale);
    if (noise.kind == "cylindrical_generic") {
        OneDMeasure mu = noise.measure == "stable"             ? OneDMeasure::stable(noise.alpha)
                         : noise.measure == "truncated_stable" ? OneDMeasure::truncated_stable(noise.alpha,
                                                                                                noise.measure_parameter)
                                                               : OneDMeasure::tempered_stable(noise.alpha,
                                                                                              noise.measure_parameter);
        return LevyNoiseModel::cylindrical_generic(noise.coefficients, std::move(mu), op.n, basis,
                                                   noise.inner_cutoff);
    }
    return LevyNoiseModel::cylindrical_stable(noise.coefficients, noise.alpha, op.n, basis, noise.inner_cutoff);
}

SimConfig ExperimentConfig::make_sim(std::uint64_t stream_tag) const {
    SimConfig s;
    s.horizon = sim.horizon;
    s.max_dt = sim.max_dt;
    s.step_tolerance = sim.step_tolerance;
    s.truncation = sim.truncation;
    s.record_dt = sim.record_dt;
    s.scheme = sim.scheme;
    s.rng = RngStream{seed.master, stream_tag};
    return s;
}

namespace {

// Gaussian coefficients with 1/j decay on the sine basis of H, rescaled to
// the requested H-norm.
GridFunction random_direction(const NormSuite& ns, std::size_t n, Engine& eng) {
    std::normal_distribution<double> g;
    GridFunction u(n);
    for (std::size_t j = 1; j <= n; ++j) u.axpy(g(eng) / static_cast<double>(j), basis_vector(ns.h, n, j));
    double norm = h_norm(ns, u);
    if (norm > 0.0) u *= 1.0 / norm;
    return u;
}

}  // namespace

GridFunction ExperimentConfig::make_initial() const {
    const std::size_t n = op.n;
    const NormSuite ns = make_norms();
    if (initial.kind == "zero") return GridFunction(n);
    if (initial.kind == "values") return GridFunction(initial.values);
    if (initial.kind == "sine_mode") return initial.norm * basis_vector(ns.h, n, initial.mode);
    Engine eng = RngStream{seed.master, kInitialStateTag}.engine();
    return initial.norm * random_direction(ns, n, eng);
}

GridFunction ExperimentConfig::make_partner(const GridFunction& x, double distance, std::uint64_t salt) const {
    const NormSuite ns = make_norms();
    Engine eng = RngStream{seed.master, kPartnerStateTag}.child(salt).engine();
    return x + distance * random_direction(ns, x.size(), eng);
}

void ExperimentConfig::override_paths(std::size_t paths) {
    a1_2.paths = paths;
    a1_3.params.paths_per_point = paths;
    e_property.paths = paths;
    access.paths = paths;
    lyapunov.paths = paths;
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& err) {
        const auto& src = err.source();
        std::ostringstream os;
        os << origin << ":" << src.begin.line << ":" << src.begin.column << ": syntax error: " << err.description();
        throw ConfigError({os.str()});
    }
    ExperimentConfig cfg;
    std::vector<std::string> errs;
    read_config(root, cfg, errs);
    // Range checks only make sense once the types were readable.
    if (errs.empty()) errs = cfg.violations();
    if (!errs.empty()) throw ConfigError(std::move(errs));
    return cfg;
}

ExperimentConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"cannot open config file " + path.string()});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path.string());
}

namespace {

// TOML floats need a '.', an exponent, or inf/nan.
std::string toml_real(double x) {
    std::string s = format_number(x);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

std::string toml_reals(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + toml_real(v[i]);
    return s + "]";
}

std::string toml_counts(const std::vector<std::size_t>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + std::to_string(v[i]);
    return s + "]";
}

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

std::string to_toml(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "[operator]\n";
    o << "kind = " << quoted(kind_name(c.op.kind)) << "\n";
    o << (c.op.kind == DriftKind::PLaplace ? "p" : "r") << " = " << toml_real(c.op.exponent) << "\n";
    o << "delta_reg = " << toml_real(c.op.delta_reg) << "\n";
    o << "scale = " << toml_real(c.op.scale) << "\n";
    o << "n = " << c.op.n << "\n\n";

    o << "[noise]\n";
    o << "kind = " << quoted(c.noise.kind) << "\n";
    o << "alpha = " << toml_real(c.noise.alpha) << "\n";
    o << "coefficients = " << toml_reals(c.noise.coefficients) << "\n";
    o << "covariance_diag = " << toml_reals(c.noise.covariance_diag) << "\n";
    o << "inner_cutoff = " << toml_real(c.noise.inner_cutoff) << "\n";
    o << "subordinator_scale = " << toml_real(c.noise.subordinator_scale) << "\n";
    o << "measure = " << quoted(c.noise.measure) << "\n";
    o << "measure_parameter = " << toml_real(c.noise.measure_parameter) << "\n\n";

    o << "[sim]\n";
    o << "horizon = " << toml_real(c.sim.horizon) << "\n";
    o << "max_dt = " << toml_real(c.sim.max_dt) << "\n";
    o << "step_tolerance = " << toml_real(c.sim.step_tolerance) << "\n";
    o << "truncation = " << (c.sim.truncation ? toml_real(*c.sim.truncation) : std::string("\"full\"")) << "\n";
    o << "record_dt = " << toml_real(c.sim.record_dt) << "\n";
    o << "scheme = " << quoted(scheme_name(c.sim.scheme)) << "\n\n";

    o << "[seed]\n";
    if (c.seed.master <= static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        o << "master = " << c.seed.master << "\n";
    else
        o << "master = " << quoted(std::to_string(c.seed.master)) << "\n";
    o << "policy = " << quoted(c.seed.policy) << "\n\n";

    o << "[initial]\n";
    o << "kind = " << quoted(c.initial.kind) << "\n";
    o << "norm = " << toml_real(c.initial.norm) << "\n";
    o << "mode = " << c.initial.mode << "\n";
    o << "values = " << toml_reals(c.initial.values) << "\n\n";

    o << "[task.simulate]\n";
    o << "full_state = " << (c.simulate.full_state ? "true" : "false") << "\n\n";

    const auto& nt = c.noise_test;
    o << "[task.noise_test]\n";
    o << "band_lo = " << toml_real(nt.band_lo) << "\n";
    o << "interarrival_events = " << nt.interarrival_events << "\n";
    o << "symmetry_samples = " << nt.symmetry_samples << "\n";
    o << "tail_samples = " << nt.tail_samples << "\n";
    o << "tail_fraction = " << toml_real(nt.tail_fraction) << "\n";
    o << "tail_tolerance = " << toml_real(nt.tail_tolerance) << "\n";
    o << "count_replicates = " << nt.count_replicates << "\n";
    o << "count_horizon = " << toml_real(nt.count_horizon) << "\n\n";

    o << "[task.conditions]\n";
    o << "samples = " << c.conditions.samples << "\n";
    o << "grid_sizes = " << toml_counts(c.conditions.grid_sizes) << "\n";
    o << "varpi_grid = " << toml_reals(c.conditions.varpi_grid) << "\n";
    o << "lines = " << c.conditions.lines << "\n\n";

    o << "[task.a0]\n";
    o << "samples = " << c.a0_samples << "\n\n";

    o << "[task.a1_1]\n";
    o << "horizon = " << toml_real(c.a1_1.horizon) << "\n";
    o << "target = " << toml_real(c.a1_1.target) << "\n\n";

    o << "[task.a1_2]\n";
    o << "t = " << toml_real(c.a1_2.t) << "\n";
    o << "ladder = " << toml_reals(c.a1_2.ladder) << "\n";
    o << "paths = " << c.a1_2.paths << "\n\n";

    const auto& a3 = c.a1_3.params;
    o << "[task.a1_3]\n";
    o << "eta = " << toml_real(a3.eta) << "\n";
    o << "zeta = " << toml_real(a3.zeta) << "\n";
    o << "t = " << toml_real(a3.t) << "\n";
    o << "points = " << a3.points << "\n";
    o << "paths_per_point = " << a3.paths_per_point << "\n";
    o << "eta_grid = " << toml_reals(a3.eta_grid) << "\n";
    o << "zeta_grid = " << toml_reals(c.a1_3.zeta_grid) << "\n";
    o << "t_grid = " << toml_reals(c.a1_3.t_grid) << "\n\n";

    o << "[task.e_property]\n";
    o << "t_grid = " << toml_reals(c.e_property.t_grid) << "\n";
    o << "paths = " << c.e_property.paths << "\n";
    o << "distance = " << toml_real(c.e_property.distance) << "\n\n";

    o << "[task.access]\n";
    o << "kappa = " << toml_real(c.access.kappa) << "\n";
    o << "times = " << toml_reals(c.access.times) << "\n";
    o << "paths = " << c.access.paths << "\n";
    o << "min_window = " << c.access.min_window << "\n\n";

    const auto& up = c.ergodic.params;
    o << "[task.ergodic]\n";
    o << "observables = [";
    for (std::size_t i = 0; i < up.observables.size(); ++i) o << (i ? ", " : "") << quoted(up.observables[i].name());
    o << "]\n";
    o << "burn_in = " << toml_real(up.burn_in) << "\n";
    o << "horizons = " << toml_reals(up.horizons) << "\n";
    o << "replicates = " << up.replicates << "\n";
    o << "tolerance = " << toml_real(up.tolerance) << "\n";
    o << "distance = " << toml_real(c.ergodic.distance) << "\n\n";

    o << "[task.lyapunov]\n";
    o << "theta_hat = " << toml_real(c.lyapunov.theta_hat) << "\n";
    o << "horizons = " << toml_reals(c.lyapunov.horizons) << "\n";
    o << "paths = " << c.lyapunov.paths << "\n";
    return o.str();
}

}  // namespace levylab::cli
