#include "levylab/assumptions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "levylab/errors.hpp"
#include "levylab/parallel.hpp"
#include "levylab/stats.hpp"

namespace levylab {

namespace {

constexpr std::size_t kSymmetryProbes = 5;
constexpr double kSymmetryLevel = 0.01;
constexpr double kRelativeRise = 1e-12;

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? " " : "") + format_number(xs[i]);
    return s;
}

GridFunction sphere_point(const NormSuite& ns, std::size_t n, double radius, Engine& eng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    GridFunction v(n);
    for (std::size_t j = 1; j <= n; ++j) v.axpy(gauss(eng), basis_vector(ns.h, n, j));
    v *= radius / h_norm(ns, v);
    return v;
}

}  // namespace

bool contracts(double d_prev, double d_next, double state_scale) {
    // The absolute term covers the flush of underflowed states to zero.
    return d_next <= d_prev * (1.0 + 1e-10) + 1e-12 * state_scale + 1e-130;
}

// --- A0 --------------------------------------------------------------------

VerifierReport verify_A0_symmetry(const JumpSampler& sampler, HSpace space, std::size_t n, std::size_t sample_count,
                                  const RngStream& rng) {
    VerifierReport rep;
    rep.claim = "A0";
    rep.key_statistic = "min_p_value";
    rep.rng = rng;
    rep.param("sample_count", static_cast<double>(sample_count));
    rep.param("probes", static_cast<double>(kSymmetryProbes));
    rep.param("level", kSymmetryLevel);
    rep.table.columns = {"probe", "samples", "ks_statistic", "p_value"};

    Engine eng = rng.engine();
    const std::vector<GridFunction> jumps = sampler(sample_count, eng);
    if (jumps.empty()) {
        rep.pass = true;
        rep.note = "no jumps: nu = 0 is trivially symmetric";
        rep.stat("min_p_value", 1.0);
        return rep;
    }
    double min_p = 1.0;
    for (std::size_t k = 0; k < kSymmetryProbes; ++k) {
        const GridFunction phi = random_probe(n, 1.0, 1.0, eng);
        std::vector<double> proj;
        proj.reserve(jumps.size());
        for (const auto& z : jumps) proj.push_back(h_inner(space, z, phi));
        const auto ks = stats::sign_flip_ks(proj);
        rep.table.add({k, jumps.size(), ks.statistic, ks.p_value});
        min_p = std::min(min_p, ks.p_value);
    }
    rep.stat("min_p_value", min_p);
    rep.stat("samples", static_cast<double>(jumps.size()));
    rep.pass = min_p > kSymmetryLevel;
    return rep;
}

VerifierReport verify_A0_symmetry(const LevyNoiseModel& noise, std::size_t sample_count, const RngStream& rng) {
    const NoiseBand band{noise.inner_cutoff(), kInfinity};
    JumpSampler sampler = [&](std::size_t count, Engine& eng) {
        if (noise.is_zero()) return std::vector<GridFunction>{};
        return noise.sample_jumps(band, count, eng);
    };
    VerifierReport rep = verify_A0_symmetry(sampler, noise.basis_space(), noise.grid_size(), sample_count, rng);
    rep.param("noise", noise.describe());
    return rep;
}

// --- A1-1 ------------------------------------------------------------------

VerifierReport verify_A1_1_decay(const GridFunction& x, const DriftOperator& op, const NormSuite& ns, double horizon,
                                 double decay_target, const SimConfig& base) {
    VerifierReport rep;
    rep.claim = "A1-1";
    rep.key_statistic = "decay_ratio";
    rep.rng = base.rng;
    rep.param("operator", op.describe());
    rep.param("horizon", horizon);
    rep.param("decay_target", decay_target);
    rep.table.columns = {"time", "h_norm", "v_norm"};

    SimConfig cfg = base;
    cfg.horizon = horizon;
    cfg.store_states = false;
    const TrajectoryPath path = evolve_deterministic(x, op, ns, cfg);

    double max_rise = 0.0;
    bool monotone = true;
    double prev = path.records.front().h_norm;
    for (const auto& rec : path.records) {
        rep.table.add({rec.time, rec.h_norm, rec.v_norm});
        const double e0 = prev * prev;
        const double e1 = rec.h_norm * rec.h_norm;
        if (e0 > 0.0) max_rise = std::max(max_rise, (e1 - e0) / e0);
        if (e1 > e0 * (1.0 + kRelativeRise) && e1 > 0.0) monotone = false;
        prev = rec.h_norm;
    }
    const double x0 = h_norm(ns, x);
    // The running sup covers every accepted step, not only the records.
    if (path.sup_h_norm > x0 * (1.0 + kRelativeRise)) monotone = false;

    const double final_norm = path.records.back().h_norm;
    const double ratio = x0 > 0.0 ? final_norm / x0 : 0.0;
    rep.stat("initial_h_norm", x0);
    rep.stat("final_h_norm", final_norm);
    rep.stat("decay_ratio", ratio);
    rep.stat("max_relative_energy_rise", max_rise);
    rep.stat("steps", static_cast<double>(path.stats.accepted));
    rep.stat("rejected_steps", static_cast<double>(path.stats.rejected));
    rep.pass = monotone && final_norm <= decay_target * x0;
    if (!monotone) rep.note = "energy rose between records";
    return rep;
}

// --- A1-2 ------------------------------------------------------------------

VerifierReport verify_A1_2_small_noise(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                       const LevyNoiseModel& noise, double t, std::vector<double> eps_ladder,
                                       std::size_t paths, const SimConfig& base) {
    if (eps_ladder.empty()) throw std::invalid_argument("empty truncation ladder");
    if (paths < 2) throw std::invalid_argument("A1-2 needs at least two paths per level");
    std::sort(eps_ladder.begin(), eps_ladder.end(), std::greater<>());

    VerifierReport rep;
    rep.claim = "A1-2";
    rep.key_statistic = "worst_ratio_mismatch";
    rep.rng = base.rng;
    rep.param("operator", op.describe());
    rep.param("noise", noise.describe());
    rep.param("t", t);
    rep.param("eps_ladder", join(eps_ladder));
    rep.param("paths", static_cast<double>(paths));
    rep.table.columns = {"eps",       "paths", "gap_mean",       "gap_se",        "small_jump_variance",
                         "band_variance", "observed_ratio", "expected_ratio"};

    SimConfig cfg = base;
    cfg.horizon = t;
    cfg.store_states = false;
    cfg.record_dt = t;
    const GridFunction y = evolve_deterministic(x, op, ns, cfg).terminal;
    const double floor_var = noise.small_jump_variance(noise.inner_cutoff());

    std::vector<stats::Summary> gaps;
    for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
        const double eps = eps_ladder[k];
        std::vector<double> sq(paths);
        parallel_for(paths, [&](std::size_t i) {
            SimConfig pc = cfg;
            pc.truncation = eps;
            pc.rng = base.rng.child(k).child(i);
            const GridFunction diff = evolve_truncated(x, op, ns, noise, pc).terminal - y;
            sq[i] = h_inner(ns.h, diff, diff);
        });
        gaps.push_back(stats::summarize(sq));
    }

    bool decreasing = true;
    double worst_mismatch = 1.0;
    for (std::size_t k = 0; k < eps_ladder.size(); ++k) {
        const double eps = eps_ladder[k];
        const double svar = noise.small_jump_variance(eps);
        double observed = std::nan("");
        double expected = std::nan("");
        if (k > 0) {
            const auto& a = gaps[k - 1];
            const auto& b = gaps[k];
            const double margin = 2.0 * std::hypot(a.standard_error, b.standard_error);
            if (!(a.mean - b.mean > margin)) decreasing = false;
            observed = b.mean / a.mean;
            expected = svar / noise.small_jump_variance(eps_ladder[k - 1]);
            const double mismatch = observed > expected ? observed / expected : expected / observed;
            worst_mismatch = std::isfinite(mismatch) ? std::max(worst_mismatch, mismatch) : kInfinity;
        }
        rep.table.add({eps, paths, gaps[k].mean, gaps[k].standard_error, svar, svar - floor_var, observed, expected});
        rep.stat("gap@" + format_number(eps), gaps[k].mean);
        rep.stat("gap_se@" + format_number(eps), gaps[k].standard_error);
    }
    rep.stat("worst_ratio_mismatch", worst_mismatch);
    rep.stat("discarded_small_jump_variance", floor_var);
    rep.pass = decreasing && worst_mismatch <= 3.0;
    if (!decreasing) rep.note = "gap estimates not strictly decreasing by 2 SE";
    return rep;
}

// --- A1-3 ------------------------------------------------------------------

void A13Params::validate() const {
    if (!(eta > 0.0)) throw PreconditionError("A1-3 needs eta > 0");
    if (!(zeta > 0.0 && zeta <= eta / 2.0)) throw PreconditionError("A1-3 needs 0 < zeta <= eta / 2");
    if (!(t > 0.0)) throw PreconditionError("A1-3 needs t > 0");
    if (points == 0 || paths_per_point == 0) throw PreconditionError("A1-3 needs points and paths");
    for (double e : eta_grid)
        if (!(e > 0.0)) throw PreconditionError("A1-3 eta grid entries must be positive");
}

VerifierReport verify_A1_3_local_boundedness(const A13Params& params, const DriftOperator& op, const NormSuite& ns,
                                             const LevyNoiseModel& noise, const SimConfig& base) {
    params.validate();
    const std::size_t n = noise.grid_size();

    VerifierReport rep;
    rep.claim = "A1-3";
    rep.key_statistic = "min_cp_lower";
    rep.rng = base.rng;
    rep.param("operator", op.describe());
    rep.param("noise", noise.describe());
    rep.param("eta", params.eta);
    rep.param("zeta", params.zeta);
    rep.param("t", params.t);
    rep.param("points", static_cast<double>(params.points));
    rep.param("paths_per_point", static_cast<double>(params.paths_per_point));
    rep.table.columns = {"point", "eta", "paths", "successes", "p_hat", "cp_lower", "cp_upper"};

    std::vector<double> etas{params.eta};
    for (double e : params.eta_grid)
        if (e != params.eta) etas.push_back(e);

    Engine point_eng = base.rng.child(0).engine();
    std::vector<GridFunction> points;
    for (std::size_t m = 0; m < params.points; ++m) points.push_back(sphere_point(ns, n, params.zeta, point_eng));

    SimConfig cfg = base;
    cfg.horizon = params.t;
    cfg.record_dt = params.t;
    cfg.store_states = false;
    cfg.truncation.reset();

    const std::size_t total = params.points * params.paths_per_point;
    std::vector<double> sups(total);
    parallel_for(total, [&](std::size_t idx) {
        const std::size_t m = idx / params.paths_per_point;
        const std::size_t i = idx % params.paths_per_point;
        SimConfig pc = cfg;
        pc.rng = base.rng.child(1 + m).child(i);
        sups[idx] = evolve_full(points[m], op, ns, noise, pc).sup_h_norm;
    });

    double min_lower = 1.0;
    double min_phat = 1.0;
    std::size_t worst = 0;
    for (std::size_t m = 0; m < params.points; ++m) {
        for (std::size_t e = 0; e < etas.size(); ++e) {
            std::size_t ok = 0;
            for (std::size_t i = 0; i < params.paths_per_point; ++i)
                if (sups[m * params.paths_per_point + i] <= etas[e]) ++ok;
            const auto ci = stats::clopper_pearson(ok, params.paths_per_point);
            const double phat = static_cast<double>(ok) / static_cast<double>(params.paths_per_point);
            rep.table.add({m, etas[e], params.paths_per_point, ok, phat, ci.lower, ci.upper});
            if (e == 0 && ci.lower < min_lower) {
                min_lower = ci.lower;
                min_phat = phat;
                worst = m;
            }
        }
    }
    rep.stat("min_cp_lower", min_lower);
    rep.stat("min_p_hat", min_phat);
    rep.stat("worst_point", static_cast<double>(worst));
    rep.interval = std::make_pair(min_lower, 1.0);
    rep.pass = min_lower > 0.0;
    if (!rep.pass) {
        std::ostringstream os;
        os << "no path from probe point " << worst << " stayed within eta; state:";
        for (double v : points[worst].raw()) os << ' ' << format_number(v);
        rep.note = os.str();
    }
    return rep;
}

VerifierReport search_A1_3(A13Params params, const std::vector<double>& zeta_grid, const std::vector<double>& t_grid,
                           const DriftOperator& op, const NormSuite& ns, const LevyNoiseModel& noise,
                           const SimConfig& base) {
    if (zeta_grid.empty() || t_grid.empty()) throw std::invalid_argument("empty A1-3 search grid");
    VerifierReport last;
    std::size_t tried = 0;
    for (double zeta : zeta_grid) {
        for (double t : t_grid) {
            params.zeta = zeta;
            params.t = t;
            SimConfig cfg = base;
            cfg.rng = base.rng.child(tried);
            last = verify_A1_3_local_boundedness(params, op, ns, noise, cfg);
            ++tried;
            last.stat("pairs_tried", static_cast<double>(tried));
            if (last.pass) return last;
        }
    }
    last.note = "no (zeta, t) pair on the grid passed; " + last.note;
    return last;
}

// --- e-property --------------------------------------------------------------

VerifierReport verify_e_property(const GridFunction& x, const GridFunction& y, const DriftOperator& op,
                                 const NormSuite& ns, const LevyNoiseModel& noise, const std::vector<double>& t_grid,
                                 std::size_t paths, const SimConfig& base) {
    if (t_grid.empty()) throw std::invalid_argument("e-property needs a time grid");
    if (paths < 2) throw std::invalid_argument("e-property needs at least two paths");
    std::vector<double> times = t_grid;
    std::sort(times.begin(), times.end());

    VerifierReport rep;
    rep.claim = "e-property";
    rep.key_statistic = "worst_ms_excess";
    rep.rng = base.rng;
    rep.param("operator", op.describe());
    rep.param("noise", noise.describe());
    rep.param("t_grid", join(times));
    rep.param("paths", static_cast<double>(paths));
    rep.table.columns = {"t", "paths", "ms_mean", "ms_se", "initial_sq", "contracting_paths"};

    SimConfig cfg = base;
    cfg.horizon = times.back();
    cfg.extra_record_times = times;
    cfg.store_states = true;

    const double d0 = h_norm(ns, x - y);
    std::vector<std::vector<double>> sq(times.size(), std::vector<double>(paths));
    std::vector<char> contracted(paths, 1);
    parallel_for(paths, [&](std::size_t i) {
        SimConfig pc = cfg;
        pc.rng = base.rng.child(i);
        const auto [px, py] = evolve_coupled(x, y, op, ns, noise, pc);
        double prev = d0;
        for (std::size_t k = 0; k < px.records.size(); ++k) {
            const GridFunction diff = px.records[k].state - py.records[k].state;
            const double d = h_norm(ns, diff);
            if (!contracts(prev, d, px.records[k].h_norm + py.records[k].h_norm)) contracted[i] = 0;
            prev = d;
        }
        for (std::size_t j = 0; j < times.size(); ++j) {
            const std::size_t k = px.record_at_or_before(times[j]);
            const GridFunction diff = px.records[k].state - py.records[k].state;
            sq[j][i] = h_inner(ns.h, diff, diff);
        }
    });

    const auto contracting = static_cast<std::size_t>(std::count(contracted.begin(), contracted.end(), 1));
    bool ms_ok = true;
    double worst_excess = -kInfinity;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const auto s = stats::summarize(sq[j]);
        rep.table.add({times[j], paths, s.mean, s.standard_error, d0 * d0, contracting});
        const double excess = s.mean - d0 * d0;
        worst_excess = std::max(worst_excess, excess);
        if (excess > 1e-10 * d0 * d0 + 3.0 * s.standard_error) ms_ok = false;
        rep.stat("ms@" + format_number(times[j]), s.mean);
    }
    rep.stat("initial_sq", d0 * d0);
    rep.stat("worst_ms_excess", worst_excess);
    rep.stat("contracting_fraction", static_cast<double>(contracting) / static_cast<double>(paths));
    rep.pass = ms_ok && contracting == paths;
    if (contracting != paths) rep.note = "some coupled paths expanded";
    return rep;
}

}  // namespace levylab
