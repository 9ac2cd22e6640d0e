#include "levylab/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "levylab/errors.hpp"
#include "levylab/parallel.hpp"
#include "levylab/stats.hpp"

namespace levylab {

namespace {

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + format_number(xs[i]);
    return s;
}

std::vector<double> sorted_positive(std::vector<double> ts, const char* what) {
    if (ts.empty()) throw std::invalid_argument(std::string(what) + " is empty");
    std::sort(ts.begin(), ts.end());
    if (!(ts.front() > 0.0)) throw std::invalid_argument(std::string(what) + " must be positive");
    if (std::adjacent_find(ts.begin(), ts.end()) != ts.end())
        throw std::invalid_argument(std::string(what) + " has duplicates");
    return ts;
}

// Linear interpolation of the empirical quantile at position pos of sorted xs.
double quantile_at(const std::vector<double>& xs, double pos) {
    pos = std::clamp(pos, 0.0, static_cast<double>(xs.size() - 1));
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double w = pos - static_cast<double>(lo);
    return xs[lo] + w * (xs[hi] - xs[lo]);
}

}  // namespace

// --- accessibility -----------------------------------------------------------

void AccessibilityQuery::validate() const {
    if (!(kappa > 0.0)) throw PreconditionError("accessibility radius kappa must be positive");
    if (times.empty()) throw PreconditionError("accessibility needs a time grid");
    for (double t : times)
        if (!(t > 0.0)) throw PreconditionError("accessibility times must be positive");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw PreconditionError("accessibility times must be strictly increasing");
    if (paths == 0) throw PreconditionError("accessibility needs paths");
    if (min_window == 0) throw PreconditionError("accessibility window must hold at least one time");
}

VerifierReport estimate_accessibility(const AccessibilityQuery& q, const DriftOperator& op, const NormSuite& ns,
                                      const LevyNoiseModel& noise, const SimConfig& base) {
    q.validate();
    const std::vector<double> times = sorted_positive(q.times, "accessibility time grid");

    VerifierReport rep;
    rep.claim = "access";
    rep.key_statistic = "best_cp_lower";
    rep.rng = base.rng;
    rep.param("operator", op.describe());
    rep.param("noise", noise.describe());
    rep.param("kappa", q.kappa);
    rep.param("times", join(times));
    rep.param("paths", static_cast<double>(q.paths));
    rep.table.columns = {"t", "paths", "successes", "p_hat", "cp_lower"};

    SimConfig cfg = base;
    cfg.horizon = times.back();
    cfg.extra_record_times = times;
    cfg.record_dt = std::max(cfg.record_dt, times.back());
    cfg.store_states = false;

    std::vector<std::vector<double>> norms(q.paths);
    parallel_for(q.paths, [&](std::size_t i) {
        SimConfig pc = cfg;
        pc.rng = base.rng.child(i);
        const TrajectoryPath path = evolve_full(q.x, op, ns, noise, pc);
        norms[i].reserve(times.size());
        for (double t : times) norms[i].push_back(path.records[path.record_at_or_before(t)].h_norm);
    });

    std::vector<double> lower(times.size());
    double best = 0.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        std::size_t ok = 0;
        for (const auto& row : norms)
            if (row[j] <= q.kappa) ++ok;
        const auto ci = stats::clopper_pearson(ok, q.paths);
        lower[j] = ci.lower;
        best = std::max(best, ci.lower);
        rep.table.add({times[j], q.paths, ok, static_cast<double>(ok) / static_cast<double>(q.paths), ci.lower});
    }

    const std::size_t need = std::min(q.min_window, times.size());
    std::size_t run = 0, best_run = 0, best_end = 0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        run = lower[j] > 0.0 ? run + 1 : 0;
        if (run > best_run) {
            best_run = run;
            best_end = j;
        }
    }
    rep.stat("best_cp_lower", best);
    rep.stat("window_length", static_cast<double>(best_run));
    if (best_run > 0) {
        rep.stat("window_start", times[best_end + 1 - best_run]);
        rep.stat("window_end", times[best_end]);
    }
    rep.pass = best_run >= need;
    if (!rep.pass) rep.note = "no evidence at this budget (not a refutation)";
    return rep;
}

// --- observables and occupation measures -------------------------------------

Observable Observable::parse(const std::string& name) {
    if (name == "h_norm") return h_norm();
    if (name == "v_norm") return v_norm();
    if (name.rfind("mode_", 0) == 0) {
        const std::string digits = name.substr(5);
        if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
            const auto j = static_cast<std::size_t>(std::stoull(digits));
            if (j > 0) return sine_mode(j);
        }
    }
    throw std::invalid_argument("unknown observable '" + name + "' (expected h_norm, v_norm or mode_<j>)");
}

std::string Observable::name() const {
    switch (kind) {
        case Kind::HNorm: return "h_norm";
        case Kind::VNorm: return "v_norm";
        case Kind::Mode: return "mode_" + std::to_string(mode);
    }
    return "?";
}

double Observable::evaluate(const NormSuite& ns, const GridFunction& u) const {
    switch (kind) {
        case Kind::HNorm: return levylab::h_norm(ns, u);
        case Kind::VNorm: return levylab::v_norm(ns, u);
        case Kind::Mode:
            if (mode == 0 || mode > u.size()) throw std::invalid_argument("observable mode outside the grid");
            return h_inner(ns.h, u, basis_vector(ns.h, u.size(), mode));
    }
    return 0.0;
}

double Observable::evaluate(const NormSuite& ns, const PathRecord& rec) const {
    if (kind == Kind::HNorm) return rec.h_norm;
    if (kind == Kind::VNorm) return rec.v_norm;
    if (rec.state.size() == 0) throw std::invalid_argument("observable needs stored states");
    return evaluate(ns, rec.state);
}

std::size_t occupation_sample_count(double burn_in, double horizon, double record_dt) {
    if (!(record_dt > 0.0) || horizon < burn_in) return 0;
    const auto k_max = static_cast<std::size_t>(std::floor(horizon / record_dt * (1.0 + 1e-12)));
    const auto k_min = static_cast<std::size_t>(std::ceil(std::max(0.0, burn_in) / record_dt * (1.0 - 1e-12)));
    return k_max >= k_min ? k_max - k_min + 1 : 0;
}

OccupationMeasure occupation_from_path(const TrajectoryPath& path, const NormSuite& ns, const Observable& obs,
                                       double burn_in, double horizon, double record_dt) {
    OccupationMeasure occ;
    occ.observable = obs;
    occ.burn_in = burn_in;
    occ.horizon = horizon;
    occ.record_dt = record_dt;
    const double lo = burn_in * (1.0 - 1e-12);
    const double hi = horizon * (1.0 + 1e-12);
    for (const auto& rec : path.records) {
        if (!rec.on_grid || rec.time < lo) continue;
        if (rec.time > hi) break;
        occ.samples.push_back(obs.evaluate(ns, rec));
    }
    return occ;
}

OccupationMeasure occupation_measure(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                     const LevyNoiseModel& noise, const Observable& obs, double burn_in,
                                     double horizon, const SimConfig& base) {
    if (!(horizon > burn_in) || burn_in < 0.0) throw std::invalid_argument("need 0 <= burn_in < horizon");
    SimConfig cfg = base;
    cfg.horizon = horizon;
    cfg.store_states = obs.needs_state();
    const TrajectoryPath path = evolve_full(x, op, ns, noise, cfg);
    return occupation_from_path(path, ns, obs, burn_in, horizon, cfg.record_dt);
}

double wasserstein1_1d(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("W1 of an empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    if (a.size() == b.size()) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
        return s / static_cast<double>(a.size());
    }
    const std::vector<double>& coarse = a.size() < b.size() ? a : b;
    const std::vector<double>& fine = a.size() < b.size() ? b : a;
    const auto m = static_cast<double>(coarse.size());
    const auto big = static_cast<double>(fine.size());
    double s = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        const double q = (static_cast<double>(i) + 0.5) / m;
        s += std::abs(coarse[i] - quantile_at(fine, q * big - 0.5));
    }
    return s / m;
}

// --- uniqueness ----------------------------------------------------------------

VerifierReport verify_uniqueness(const GridFunction& x1, const GridFunction& x2, const DriftOperator& op,
                                 const NormSuite& ns, const LevyNoiseModel& noise, const UniquenessParams& params,
                                 const SimConfig& base) {
    if (params.observables.empty()) throw std::invalid_argument("uniqueness needs observables");
    if (params.replicates < 2) throw std::invalid_argument("uniqueness needs at least two replicates");
    const std::vector<double> horizons = sorted_positive(params.horizons, "uniqueness horizon ladder");
    if (!(horizons.front() > params.burn_in)) throw std::invalid_argument("horizons must exceed the burn-in");

    VerifierReport rep;
    rep.claim = "uniqueness";
    rep.key_statistic = "final_w1";
    rep.rng = base.rng;
    rep.param("operator", op.describe());
    rep.param("noise", noise.describe());
    rep.param("burn_in", params.burn_in);
    rep.param("horizons", join(horizons));
    rep.param("replicates", static_cast<double>(params.replicates));
    rep.param("tolerance", params.tolerance);
    rep.table.columns = {"horizon", "observable", "w1", "w1_se", "w1_single_path_mean", "tolerance", "pass"};

    bool need_state = false;
    for (const auto& o : params.observables) need_state = need_state || o.needs_state();
    SimConfig cfg = base;
    cfg.horizon = horizons.back();
    cfg.extra_record_times = horizons;
    cfg.store_states = need_state;

    const std::size_t H = horizons.size();
    const std::size_t O = params.observables.size();
    // samples[path][h * O + o]
    std::vector<std::vector<std::vector<double>>> samples(2 * params.replicates);
    parallel_for(2 * params.replicates, [&](std::size_t idx) {
        SimConfig pc = cfg;
        pc.rng = base.rng.child(idx);
        const TrajectoryPath path = evolve_full(idx % 2 == 0 ? x1 : x2, op, ns, noise, pc);
        samples[idx].resize(H * O);
        for (std::size_t h = 0; h < H; ++h)
            for (std::size_t o = 0; o < O; ++o)
                samples[idx][h * O + o] =
                    occupation_from_path(path, ns, params.observables[o], params.burn_in, horizons[h], cfg.record_dt)
                        .samples;
    });

    // Pooling the replicates estimates the noise-averaged occupation measure
    // (1/T) int P_t(x, .) dt itself; the jackknife over replicates gives its SE.
    const std::size_t R = params.replicates;
    auto pooled_w1 = [&](std::size_t slot, std::size_t skip) {
        std::vector<double> a, b;
        for (std::size_t r = 0; r < R; ++r) {
            if (r == skip) continue;
            a.insert(a.end(), samples[2 * r][slot].begin(), samples[2 * r][slot].end());
            b.insert(b.end(), samples[2 * r + 1][slot].begin(), samples[2 * r + 1][slot].end());
        }
        return wasserstein1_1d(std::move(a), std::move(b));
    };

    bool pass = true;
    double final_worst = 0.0;
    for (std::size_t o = 0; o < O; ++o) {
        std::vector<double> w(H), se(H), single(H);
        for (std::size_t h = 0; h < H; ++h) {
            const std::size_t slot = h * O + o;
            w[h] = pooled_w1(slot, R);
            std::vector<double> loo(R), per_rep(R);
            for (std::size_t r = 0; r < R; ++r) {
                loo[r] = pooled_w1(slot, r);
                per_rep[r] = wasserstein1_1d(samples[2 * r][slot], samples[2 * r + 1][slot]);
            }
            const stats::Summary js = stats::summarize(loo);
            se[h] = std::sqrt(js.variance * static_cast<double>((R - 1) * (R - 1)) / static_cast<double>(R));
            single[h] = stats::summarize(per_rep).mean;
        }
        bool obs_ok = w.back() <= params.tolerance;
        for (std::size_t h = 1; h < H; ++h)
            if (w[h] > w[h - 1] + 2.0 * std::hypot(se[h], se[h - 1])) obs_ok = false;
        for (std::size_t h = 0; h < H; ++h)
            rep.table.add({horizons[h], params.observables[o].name(), w[h], se[h], single[h], params.tolerance,
                           h + 1 == H ? obs_ok : w[h] <= params.tolerance});
        rep.stat("final_w1@" + params.observables[o].name(), w.back());
        rep.stat("final_w1_se@" + params.observables[o].name(), se.back());
        final_worst = std::max(final_worst, w.back());
        pass = pass && obs_ok;
    }
    rep.stat("final_w1", final_worst);
    rep.pass = pass;
    if (!pass) rep.note = "W1 not nonincreasing along the ladder or above tolerance";
    return rep;
}

// --- Lyapunov moment -------------------------------------------------------------

double LyapunovConfig::f(const NormSuite& ns, const GridFunction& u) const {
    const double h = h_norm(ns, u);
    return std::pow(h * h + 1.0, theta_hat / 2.0);
}

double LyapunovConfig::integrand_exponent(const DriftOperator& op) const {
    return op.coercivity_exponent() + theta_hat - 2.0;
}

void LyapunovConfig::validate(const DriftOperator& op, const LevyNoiseModel& noise) const {
    const double alpha = op.coercivity_exponent();
    const double lo = std::max(2.0 - alpha, 0.0);
    if (!(theta_hat > lo && theta_hat <= 2.0)) {
        std::ostringstream os;
        os << "theta_hat = " << theta_hat << " must lie in (" << lo << ", 2] for coercivity exponent " << alpha;
        throw PreconditionError(os.str());
    }
    const TailMoment tm = noise.tail_moment(theta_hat);
    if (!tm.finite) {
        std::ostringstream os;
        os << "tail moment of order theta_hat = " << theta_hat
           << " is infinite: the Lyapunov bound needs the integral of ||z||^theta_hat over ||z|| > 1 to converge";
        throw PreconditionError(os.str());
    }
}

VerifierReport lyapunov_moment_check(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                     const LevyNoiseModel& noise, const LyapunovConfig& lc,
                                     std::vector<double> horizons, std::size_t paths, const SimConfig& base) {
    lc.validate(op, noise);
    if (paths < 2) throw std::invalid_argument("moment check needs at least two paths");
    horizons = sorted_positive(std::move(horizons), "moment horizon ladder");
    const double power = lc.integrand_exponent(op);

    VerifierReport rep;
    rep.claim = "lyapunov";
    rep.key_statistic = "growth_ratio";
    rep.rng = base.rng;
    rep.param("operator", op.describe());
    rep.param("noise", noise.describe());
    rep.param("theta_hat", lc.theta_hat);
    rep.param("integrand_exponent", power);
    rep.param("horizons", join(horizons));
    rep.param("paths", static_cast<double>(paths));
    rep.table.columns = {"t", "M_of_t", "M_over_t", "M_se"};

    SimConfig cfg = base;
    cfg.horizon = horizons.back();
    cfg.extra_record_times = horizons;
    cfg.store_states = false;

    std::vector<std::vector<double>> integrals(paths);
    parallel_for(paths, [&](std::size_t i) {
        SimConfig pc = cfg;
        pc.rng = base.rng.child(i);
        const TrajectoryPath path = evolve_full(x, op, ns, noise, pc);
        auto& out = integrals[i];
        double acc = 0.0;
        std::size_t h = 0;
        for (std::size_t k = 0; k + 1 < path.records.size() && h < horizons.size(); ++k) {
            const auto& rec = path.records[k];
            const double v = rec.v_norm > 0.0 ? std::pow(rec.v_norm, power) : 0.0;
            acc += v * (path.records[k + 1].time - rec.time);
            while (h < horizons.size() && path.records[k + 1].time >= horizons[h]) {
                out.push_back(acc);
                ++h;
            }
        }
        while (out.size() < horizons.size()) out.push_back(acc);
    });

    std::vector<double> ratio(horizons.size());
    for (std::size_t h = 0; h < horizons.size(); ++h) {
        std::vector<double> col(paths);
        for (std::size_t i = 0; i < paths; ++i) col[i] = integrals[i][h];
        const auto s = stats::summarize(col);
        ratio[h] = s.mean / horizons[h];
        rep.table.add({horizons[h], s.mean, ratio[h], s.standard_error});
        rep.stat("M_over_t@" + format_number(horizons[h]), ratio[h]);
    }
    const double first = ratio.front();
    const double mx = *std::max_element(ratio.begin(), ratio.end());
    const double mn = *std::min_element(ratio.begin(), ratio.end());
    double growth = 1.0;
    if (ratio.size() > 1) {
        const double later = *std::max_element(ratio.begin() + 1, ratio.end());
        if (first > 0.0) {
            growth = later / first;
        } else if (later > 0.0) {
            growth = kInfinity;
        }
    }
    rep.stat("growth_ratio", growth);
    rep.stat("max_min_ratio", mn > 0.0 ? mx / mn : (mx > 0.0 ? kInfinity : 1.0));
    rep.pass = growth <= 2.0;
    if (!rep.pass) rep.note = "M(t)/t grows faster than affine";
    return rep;
}

}  // namespace levylab
