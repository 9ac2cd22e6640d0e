#include "levylab/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <stdexcept>

#include "levylab/errors.hpp"

namespace levylab {

namespace {

constexpr double kMinDt = 1e-12;
constexpr double kEnergyRise = 1e-12;
// Energies below this are rounding noise; a rise there is not a rejection.
constexpr double kEnergyFloor = 1e-280;
constexpr std::size_t kNewtonMaxIterations = 80;

double inf_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double signed_pow(double x, double e) { return x == 0.0 ? 0.0 : std::copysign(std::pow(std::abs(x), e), x); }

// Damped Newton for a gradient system: residual = grad(objective), Jacobian tridiagonal SPD.
// The step is accepted by Armijo on the objective or, failing that, by a residual decrease.
struct NewtonProblem {
    std::function<void(const std::vector<double>&, std::vector<double>&)> residual;
    std::function<double(const std::vector<double>&)> objective;
    std::function<void(const std::vector<double>&, std::vector<double>&, std::vector<double>&, std::vector<double>&)>
        jacobian;
    double tolerance = 0.0;
};

bool newton_solve(const NewtonProblem& prob, std::vector<double>& x, std::size_t& iterations) {
    const std::size_t n = x.size();
    std::vector<double> r(n), rn(n), sub(n), diag(n), sup(n), neg(n), trial(n);
    prob.residual(x, r);
    double rnorm = inf_norm(r);
    for (iterations = 0; iterations < kNewtonMaxIterations; ++iterations) {
        if (!std::isfinite(rnorm)) return false;
        if (rnorm <= prob.tolerance) return true;
        prob.jacobian(x, sub, diag, sup);
        for (std::size_t i = 0; i < n; ++i) neg[i] = -r[i];
        const std::vector<double> d = solve_tridiagonal(sub, diag, sup, neg);

        double slope = 0.0;
        for (std::size_t i = 0; i < n; ++i) slope += r[i] * d[i];
        const double f0 = prob.objective(x);
        double step = 1.0;
        bool moved = false;
        while (step > 1e-12) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = x[i] + step * d[i];
            const double f1 = prob.objective(trial);
            prob.residual(trial, rn);
            const double rn_norm = inf_norm(rn);
            if (std::isfinite(f1) && std::isfinite(rn_norm) &&
                (f1 <= f0 + 1e-4 * step * slope || rn_norm < (1.0 - 1e-4 * step) * rnorm)) {
                x.swap(trial);
                r.swap(rn);
                rnorm = rn_norm;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            // Stagnation at rounding level still counts as converged.
            return rnorm <= 1e3 * prob.tolerance;
        }
        const double dx = step * inf_norm(d);
        if (dx <= 1e-15 * std::max(inf_norm(x), std::numeric_limits<double>::min())) {
            prob.residual(x, r);
            return inf_norm(r) <= 1e3 * prob.tolerance;
        }
    }
    return rnorm <= prob.tolerance;
}

// Inverse of the regularized flux g -> (g^2 + delta^2)^{(p-2)/2} g. Newton in
// log|g|, where the log-flux has slope in [p - 1, 1].
double inverse_flux(double sigma, double p, double delta) {
    if (sigma == 0.0) return 0.0;
    if (p == 2.0) return sigma;
    const double a = std::abs(sigma);
    const double d2 = delta * delta;
    const double log_a = std::log(a);
    // Power-law and linear asymptotes; the smaller one is the better start.
    double g = std::pow(a, 1.0 / (p - 1.0));
    if (delta > 0.0) g = std::min(g, a * std::pow(delta, 2.0 - p));
    double ell = std::log(g);
    for (int it = 0; it < 60; ++it) {
        const double g2 = g * g;
        const double phi = 0.5 * (p - 2.0) * std::log(g2 + d2) + ell - log_a;
        const double slope = ((p - 1.0) * g2 + d2) / (g2 + d2);
        const double step = phi / slope;
        ell -= step;
        g = std::exp(ell);
        if (std::abs(step) < 1e-15) break;
    }
    return std::copysign(g, sigma);
}

// Backward Euler for p-Laplace in the edge fluxes sigma = F(D+ u): with
// u = b + c D- sigma the step becomes F^{-1}(sigma) + c M sigma = D+ b,
// M = D+ (D+)^T, the gradient of sum Psi*(sigma_k) + c/2 sigma.M sigma - sigma.D+ b
// with Psi* the conjugate of the edge energy. Unlike the primal problem the
// objective is C^2 where the flux is singular.
bool implicit_p_laplace(const DriftOperator& op, const std::vector<double>& b, double dt, std::vector<double>& u,
                        std::size_t& iterations) {
    const std::size_t n = b.size();
    const std::size_t m = n + 1;
    const double h = 1.0 / static_cast<double>(n + 1);
    const double p = op.exponent();
    const double delta = op.regularization();
    const double d2 = delta * delta;
    const double dp = std::pow(delta, p);
    const double c = dt * op.scale();
    const double k2 = c / (h * h);

    auto grad_of = [&](const std::vector<double>& v, std::size_t k) {
        const double right = k < n ? v[k] : 0.0;
        const double left = k > 0 ? v[k - 1] : 0.0;
        return (right - left) / h;
    };
    std::vector<double> db(m);
    for (std::size_t k = 0; k < m; ++k) db[k] = grad_of(b, k);
    // (M sigma)_k h^2 = (1 or 2) sigma_k - sigma_{k-1} - sigma_{k+1}; the end edges touch one node.
    auto m_times = [&](const std::vector<double>& sg, std::size_t k) {
        const double self = (k == 0 || k == n) ? 1.0 : 2.0;
        double v = self * sg[k];
        if (k > 0) v -= sg[k - 1];
        if (k + 1 < m) v -= sg[k + 1];
        return v;
    };

    // g = F^{-1}(sigma) for the last sigma seen.
    std::vector<double> cached_sigma, cached_g(m);
    auto inverse = [&](const std::vector<double>& sg) -> const std::vector<double>& {
        if (sg != cached_sigma) {
            cached_sigma = sg;
            for (std::size_t k = 0; k < m; ++k) cached_g[k] = inverse_flux(sg[k], p, delta);
        }
        return cached_g;
    };

    NewtonProblem prob;
    prob.residual = [&](const std::vector<double>& sg, std::vector<double>& r) {
        const auto& g = inverse(sg);
        for (std::size_t k = 0; k < m; ++k) r[k] = g[k] + k2 * m_times(sg, k) - db[k];
    };
    prob.objective = [&](const std::vector<double>& sg) {
        const auto& g = inverse(sg);
        double f = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double psi = 0.5 * g[k] * g[k];
            if (p != 2.0) {
                // ((g^2 + delta^2)^{p/2} - delta^p) / p without cancellation for |g| << delta
                psi = d2 > 0.0 ? dp * std::expm1(0.5 * p * std::log1p(g[k] * g[k] / d2)) / p
                               : std::pow(std::abs(g[k]), p) / p;
            }
            f += sg[k] * g[k] - psi + 0.5 * k2 * sg[k] * m_times(sg, k) - sg[k] * db[k];
        }
        return f;
    };
    prob.jacobian = [&](const std::vector<double>& sg, std::vector<double>& sub, std::vector<double>& diag,
                        std::vector<double>& sup) {
        const auto& g = inverse(sg);
        for (std::size_t k = 0; k < m; ++k) {
            const double g2 = g[k] * g[k];
            const double s2 = g2 + d2;
            // dg/dsigma = 1 / F'(g)
            double dg = 1.0;
            if (p != 2.0) dg = s2 == 0.0 ? 0.0 : std::pow(s2, 0.5 * (4.0 - p)) / ((p - 1.0) * g2 + d2);
            diag[k] = dg + k2 * ((k == 0 || k == n) ? 1.0 : 2.0);
            sub[k] = -k2;
            sup[k] = -k2;
        }
    };
    prob.tolerance = 1e-12 * std::max(inf_norm(db), std::numeric_limits<double>::min());

    std::vector<double> sigma(m);
    for (std::size_t k = 0; k < m; ++k)
        sigma[k] = db[k] == 0.0 ? 0.0 : std::pow(db[k] * db[k] + d2, 0.5 * (p - 2.0)) * db[k];
    const bool ok = newton_solve(prob, sigma, iterations);
    u.resize(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = b[i] + c * (sigma[i + 1] - sigma[i]) / h;
    return ok;
}

// Backward Euler for fast diffusion in the variable w = sign(u)|u|^r:
// minimize sum G(w_i) - b.w + dt s/2 w.(-Delta_h w), G(w) = |w|^{1/r+1}/(1/r+1),
// whose gradient u(w) - b - dt s Delta_h w is the step residual.
bool implicit_fast_diffusion(const DriftOperator& op, const std::vector<double>& b, double dt,
                             std::vector<double>& u, std::size_t& iterations) {
    const std::size_t n = b.size();
    const double h = 1.0 / static_cast<double>(n + 1);
    const double r = op.exponent();
    const double inv_r = 1.0 / r;
    const double c = dt * op.scale();
    const double k2 = c / (h * h);

    NewtonProblem prob;
    prob.residual = [&](const std::vector<double>& w, std::vector<double>& res) {
        for (std::size_t i = 0; i < n; ++i) {
            const double wl = i > 0 ? w[i - 1] : 0.0;
            const double wr = i + 1 < n ? w[i + 1] : 0.0;
            res[i] = signed_pow(w[i], inv_r) - b[i] - k2 * (wl - 2.0 * w[i] + wr);
        }
    };
    prob.objective = [&](const std::vector<double>& w) {
        double f = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            f += std::pow(std::abs(w[i]), inv_r + 1.0) / (inv_r + 1.0) - b[i] * w[i];
            const double wl = i > 0 ? w[i - 1] : 0.0;
            f += 0.5 * k2 * w[i] * (2.0 * w[i] - wl - (i + 1 < n ? w[i + 1] : 0.0));
        }
        return f;
    };
    prob.jacobian = [&](const std::vector<double>& w, std::vector<double>& sub, std::vector<double>& diag,
                        std::vector<double>& sup) {
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::abs(w[i]);
            const double dpsi = r == 1.0 ? 1.0 : (a == 0.0 ? 0.0 : inv_r * std::pow(a, inv_r - 1.0));
            diag[i] = dpsi + 2.0 * k2;
            sub[i] = -k2;
            sup[i] = -k2;
        }
    };
    prob.tolerance = 1e-12 * std::max(inf_norm(b), std::numeric_limits<double>::min());

    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = signed_pow(b[i], r);
    const bool ok = newton_solve(prob, w, iterations);
    u.resize(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = signed_pow(w[i], inv_r);
    return ok;
}

struct RecordTime {
    double time;
    bool on_grid;
};

std::vector<RecordTime> record_times(const SimConfig& cfg) {
    std::vector<RecordTime> times;
    const double T = cfg.horizon;
    const auto k_max = static_cast<std::size_t>(std::floor(T / cfg.record_dt * (1.0 + 1e-12)));
    for (std::size_t k = 0; k <= k_max; ++k)
        times.push_back({std::min(T, static_cast<double>(k) * cfg.record_dt), true});
    if (times.back().time < T * (1.0 - 1e-12)) times.push_back({T, false});
    for (double t : cfg.extra_record_times)
        if (t > 0.0 && t <= T) times.push_back({t, false});
    std::stable_sort(times.begin(), times.end(),
                     [](const RecordTime& a, const RecordTime& b) { return a.time < b.time; });
    std::vector<RecordTime> merged;
    for (const auto& rt : times) {
        if (!merged.empty() && merged.back().time == rt.time) {
            merged.back().on_grid = merged.back().on_grid || rt.on_grid;
            continue;
        }
        merged.push_back(rt);
    }
    return merged;
}

// Steps one or more states on a common mesh through one jump schedule.
class Evolver {
public:
    Evolver(const DriftOperator& op, const NormSuite& ns, const SimConfig& cfg, const GridFunction* compensator,
            std::vector<GridFunction> states)
        : op_(op), ns_(ns), cfg_(cfg), offset_(compensator), states_(std::move(states)), paths_(states_.size()) {
        if (offset_ != nullptr && offset_->is_zero()) offset_ = nullptr;
        for (auto& path : paths_) path.stats.min_dt = kInfinity;
        dt_cap_ = cfg_.max_dt;
    }

    std::vector<TrajectoryPath> run(const JumpSchedule& schedule) {
        const std::vector<RecordTime> times = record_times(cfg_);
        for (std::size_t s = 0; s < states_.size(); ++s) note_sup(s);
        record(0.0, false, true, nullptr);

        std::size_t next_record = 1;
        std::size_t next_jump = 0;
        const auto& events = schedule.events;
        while (next_jump < events.size() && events[next_jump].time <= 0.0) ++next_jump;

        double t = 0.0;
        while (next_record < times.size()) {
            const double t_rec = times[next_record].time;
            const bool jump_pending = next_jump < events.size() && events[next_jump].time <= t_rec;
            const double t_stop = jump_pending ? events[next_jump].time : t_rec;
            advance(t, t_stop);
            t = t_stop;
            if (jump_pending) {
                std::vector<GridFunction> left = states_;
                for (std::size_t s = 0; s < states_.size(); ++s) {
                    const double before = h_norm(ns_, states_[s]);
                    paths_[s].sup_h_norm = std::max(paths_[s].sup_h_norm, before);
                    states_[s] += events[next_jump].jump;
                    note_sup(s);
                    ++paths_[s].stats.jumps;
                }
                const bool at_record = t == t_rec;
                record(t, true, at_record && times[next_record].on_grid, &left);
                ++next_jump;
                if (at_record) ++next_record;
            } else {
                record(t, false, times[next_record].on_grid, nullptr);
                ++next_record;
            }
        }
        for (std::size_t s = 0; s < states_.size(); ++s) {
            paths_[s].terminal = states_[s];
            if (paths_[s].stats.accepted == 0) paths_[s].stats.min_dt = 0.0;
        }
        return std::move(paths_);
    }

private:
    const DriftOperator& op_;
    const NormSuite& ns_;
    const SimConfig& cfg_;
    const GridFunction* offset_;
    std::vector<GridFunction> states_;
    std::vector<TrajectoryPath> paths_;
    double dt_cap_ = 0.0;

    void note_sup(std::size_t s) { paths_[s].sup_h_norm = std::max(paths_[s].sup_h_norm, h_norm(ns_, states_[s])); }

    void record(double t, bool is_jump, bool on_grid, const std::vector<GridFunction>* left) {
        for (std::size_t s = 0; s < states_.size(); ++s) {
            PathRecord rec;
            rec.time = t;
            rec.h_norm = h_norm(ns_, states_[s]);
            rec.v_norm = v_norm(ns_, states_[s]);
            rec.is_jump = is_jump;
            rec.on_grid = on_grid;
            if (cfg_.store_states) {
                rec.state = states_[s];
                if (left != nullptr) rec.left_limit = (*left)[s];
            }
            paths_[s].records.push_back(std::move(rec));
        }
    }

    GridFunction drift(const GridFunction& u) const {
        GridFunction a = apply_drift(op_, u);
        if (offset_ != nullptr) a += *offset_;
        return a;
    }

    double proposal(double remaining) const {
        double dt = std::min({cfg_.max_dt, dt_cap_, remaining});
        for (const auto& u : states_) {
            const double a = h_norm(ns_, drift(u));
            if (a > 0.0) dt = std::min(dt, cfg_.step_tolerance * (h_norm(ns_, u) + 1.0) / (a + 1e-30));
        }
        return dt;
    }

    std::string stiff_message(double dt, double t) const {
        std::ostringstream os;
        os << "time step " << dt << " fell below " << kMinDt << " at t = " << t << " (" << op_.describe()
           << ", state h_norms:";
        for (const auto& u : states_) os << " " << h_norm(ns_, u);
        os << ")";
        return os.str();
    }

    static bool energy_rose(double before, double after) {
        return after > before * (1.0 + kEnergyRise) && after > kEnergyFloor;
    }

    bool attempt(double dt, std::vector<GridFunction>& out, std::vector<std::size_t>& newton) {
        out.resize(states_.size());
        newton.assign(states_.size(), 0);
        for (std::size_t s = 0; s < states_.size(); ++s) {
            const GridFunction& u = states_[s];
            if (cfg_.scheme == StepScheme::ExplicitEuler) {
                out[s] = u;
                out[s].axpy(dt, drift(u));
            } else if (!implicit_step(op_, u, dt, offset_, out[s], &newton[s])) {
                return false;
            }
            if (!out[s].is_finite()) return false;
            const double e0 = h_inner(ns_.h, u, u);
            const double e1 = h_inner(ns_.h, out[s], out[s]);
            // Without a drift offset the deterministic step must not raise the energy.
            if (offset_ == nullptr && energy_rose(e0, e1)) return false;
        }
        if (cfg_.scheme == StepScheme::ExplicitEuler && states_.size() == 2) {
            const GridFunction d0 = states_[0] - states_[1];
            const GridFunction d1 = out[0] - out[1];
            if (energy_rose(h_inner(ns_.h, d0, d0), h_inner(ns_.h, d1, d1))) return false;
        }
        return true;
    }

    void advance(double t0, double t1) {
        double t = t0;
        std::vector<GridFunction> next;
        std::vector<std::size_t> newton;
        while (t1 - t > 1e-14 * std::max(1.0, std::abs(t1))) {
            double dt = proposal(t1 - t);
            if (dt < kMinDt && dt < t1 - t) throw StiffnessError(stiff_message(dt, t));
            while (!attempt(dt, next, newton)) {
                for (auto& path : paths_) ++path.stats.rejected;
                dt *= 0.5;
                dt_cap_ = dt;
                if (dt < kMinDt) throw StiffnessError(stiff_message(dt, t));
            }
            for (std::size_t s = 0; s < states_.size(); ++s) {
                auto& path = paths_[s];
                if (cfg_.energy_diagnostics) {
                    const GridFunction& ref = cfg_.scheme == StepScheme::ExplicitEuler ? states_[s] : next[s];
                    const double e0 = h_inner(ns_.h, states_[s], states_[s]);
                    const double e1 = h_inner(ns_.h, next[s], next[s]);
                    const double predicted = 2.0 * dt * pairing(op_, ns_, ref);
                    if (e0 > kEnergyFloor)
                        path.stats.max_energy_defect =
                            std::max(path.stats.max_energy_defect, std::abs(e1 - e0 - predicted) / e0);
                }
                states_[s] = std::move(next[s]);
                // Below the energy floor squared norms underflow; zero is the fixed point the flow reaches.
                if (offset_ == nullptr && h_inner(ns_.h, states_[s], states_[s]) < kEnergyFloor)
                    states_[s] = GridFunction(states_[s].size());
                ++path.stats.accepted;
                path.stats.newton_iterations += newton[s];
                path.stats.min_dt = std::min(path.stats.min_dt, dt);
                path.stats.max_dt = std::max(path.stats.max_dt, dt);
                path.step_dt.push_back(dt);
                note_sup(s);
            }
            // A step cut short by the stop time says nothing about the next stretch.
            if (dt < t1 - t) dt_cap_ = std::min(cfg_.max_dt, 2.0 * dt);
            t = (t1 - t - dt <= 1e-14 * std::max(1.0, std::abs(t1))) ? t1 : t + dt;
        }
    }
};

void check_grid(const GridFunction& x, const DriftOperator& op, const NormSuite& ns) {
    require_matching_norms(op, ns);
    if (x.size() == 0) throw std::invalid_argument("initial state is empty");
    if (!x.is_finite()) throw std::invalid_argument("initial state is not finite");
}

void check_noise(const GridFunction& x, const NormSuite& ns, const LevyNoiseModel& noise) {
    if (noise.grid_size() != x.size()) throw std::invalid_argument("noise and state live on different grids");
    if (noise.basis_space() != ns.h) throw std::invalid_argument("noise basis does not match the state space");
}

void check_schedule(const GridFunction& x, const JumpSchedule& schedule, const SimConfig& cfg) {
    if (!schedule.events.empty() && schedule.horizon < cfg.horizon * (1.0 - 1e-12))
        throw std::invalid_argument("jump schedule is shorter than the horizon");
    double last = -kInfinity;
    for (const auto& ev : schedule.events) {
        if (ev.time < last) throw std::invalid_argument("jump schedule is not time ordered");
        if (ev.jump.size() != x.size()) throw std::invalid_argument("jump lives on a different grid");
        last = ev.time;
    }
}

}  // namespace

void SimConfig::validate() const {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("sim horizon must be positive");
    if (!(max_dt > 0.0)) throw std::invalid_argument("sim max_dt must be positive");
    if (!(step_tolerance > 0.0)) throw std::invalid_argument("sim step_tolerance must be positive");
    if (!(record_dt > 0.0)) throw std::invalid_argument("sim record_dt must be positive");
    for (double t : extra_record_times)
        if (!(t > 0.0 && t <= horizon)) throw std::invalid_argument("extra record time outside (0, horizon]");
    if (truncation && !(*truncation > 0.0 && *truncation <= 1.0))
        throw std::invalid_argument("truncation level must lie in (0, 1]");
}

std::size_t TrajectoryPath::record_at_or_before(double t) const {
    if (records.empty()) throw std::out_of_range("empty trajectory");
    auto it = std::upper_bound(records.begin(), records.end(), t,
                               [](double v, const PathRecord& r) { return v < r.time; });
    if (it == records.begin()) throw std::out_of_range("time precedes the trajectory");
    return static_cast<std::size_t>(std::distance(records.begin(), it)) - 1;
}

bool implicit_step(const DriftOperator& op, const GridFunction& u, double dt, const GridFunction* offset,
                   GridFunction& out, std::size_t* iterations) {
    std::vector<double> b = u.raw();
    if (offset != nullptr)
        for (std::size_t i = 0; i < b.size(); ++i) b[i] += dt * (*offset)[i];
    std::size_t it = 0;
    bool ok = true;
    std::vector<double> result;
    if (op.scale() == 0.0 || dt == 0.0) {
        result = b;
    } else if (op.kind() == DriftKind::PLaplace) {
        ok = implicit_p_laplace(op, b, dt, result, it);
    } else {
        ok = implicit_fast_diffusion(op, b, dt, result, it);
    }
    if (iterations != nullptr) *iterations = it;
    out = GridFunction(std::move(result));
    return ok;
}

TrajectoryPath evolve_with_schedule(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                    const JumpSchedule& schedule, const SimConfig& cfg,
                                    const GridFunction* compensator) {
    cfg.validate();
    check_grid(x, op, ns);
    check_schedule(x, schedule, cfg);
    Evolver ev(op, ns, cfg, compensator, {x});
    return std::move(ev.run(schedule).front());
}

TrajectoryPath evolve_deterministic(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                    const SimConfig& cfg) {
    JumpSchedule none;
    none.horizon = cfg.horizon;
    return evolve_with_schedule(x, op, ns, none, cfg);
}

NoiseBand simulated_band(const LevyNoiseModel& noise, const SimConfig& cfg) {
    NoiseBand band{noise.inner_cutoff(), kInfinity};
    if (cfg.truncation) {
        if (*cfg.truncation < noise.inner_cutoff()) {
            std::ostringstream os;
            os << "truncation level " << *cfg.truncation << " is below the inner cutoff " << noise.inner_cutoff();
            throw CutoffViolation(os.str());
        }
        band.hi = *cfg.truncation;
    }
    return band;
}

namespace {

TrajectoryPath evolve_noisy(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                            const LevyNoiseModel& noise, const SimConfig& cfg) {
    cfg.validate();
    check_grid(x, op, ns);
    check_noise(x, ns, noise);
    const NoiseBand band = simulated_band(noise, cfg);
    JumpSchedule schedule;
    schedule.horizon = cfg.horizon;
    schedule.band = band;
    if (!noise.is_zero() && band.hi > band.lo) schedule = noise.sample_schedule(band, cfg.horizon, cfg.rng);
    const GridFunction comp = noise.is_zero() ? GridFunction(x.size()) : noise.compensator_drift(band);
    return evolve_with_schedule(x, op, ns, schedule, cfg, &comp);
}

}  // namespace

TrajectoryPath evolve_truncated(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                const LevyNoiseModel& noise, const SimConfig& cfg) {
    if (!cfg.truncation) throw std::invalid_argument("truncated evolution needs a truncation level");
    return evolve_noisy(x, op, ns, noise, cfg);
}

TrajectoryPath evolve_full(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                           const LevyNoiseModel& noise, const SimConfig& cfg) {
    SimConfig full = cfg;
    full.truncation.reset();
    return evolve_noisy(x, op, ns, noise, full);
}

std::pair<TrajectoryPath, TrajectoryPath> evolve_coupled_with_schedule(const GridFunction& x, const GridFunction& y,
                                                                       const DriftOperator& op, const NormSuite& ns,
                                                                       const JumpSchedule& schedule,
                                                                       const SimConfig& cfg) {
    cfg.validate();
    check_grid(x, op, ns);
    check_grid(y, op, ns);
    require_same_grid(x, y);
    check_schedule(x, schedule, cfg);
    Evolver ev(op, ns, cfg, nullptr, {x, y});
    auto paths = ev.run(schedule);
    return {std::move(paths[0]), std::move(paths[1])};
}

std::pair<TrajectoryPath, TrajectoryPath> evolve_coupled(const GridFunction& x, const GridFunction& y,
                                                         const DriftOperator& op, const NormSuite& ns,
                                                         const LevyNoiseModel& noise, const SimConfig& cfg) {
    cfg.validate();
    check_grid(x, op, ns);
    check_noise(x, ns, noise);
    const NoiseBand band = simulated_band(noise, cfg);
    JumpSchedule schedule;
    schedule.horizon = cfg.horizon;
    schedule.band = band;
    if (!noise.is_zero() && band.hi > band.lo) schedule = noise.sample_schedule(band, cfg.horizon, cfg.rng);
    return evolve_coupled_with_schedule(x, y, op, ns, schedule, cfg);
}

}  // namespace levylab
