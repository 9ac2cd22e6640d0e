#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "levylab/assumptions.hpp"
#include "levylab/ergodicity.hpp"
#include "levylab/noise_tests.hpp"
#include "levylab/operators.hpp"
#include "levylab/parallel.hpp"

#ifndef LEVYLAB_VERSION
#define LEVYLAB_VERSION "unknown"
#endif

namespace levylab::cli {

const std::vector<std::string>& experiment_commands() {
    static const std::vector<std::string> v{"simulate", "noise-test", "verify-conditions", "verify",
                                            "access",   "ergodic",    "lyapunov",          "all"};
    return v;
}

const std::vector<std::string>& verify_claims() {
    static const std::vector<std::string> v{"A0", "A1-1", "A1-2", "A1-3", "e-property", "all"};
    return v;
}

std::string claim_file_stem(const std::string& claim) {
    std::string s;
    for (char c : claim) s += std::isalnum(static_cast<unsigned char>(c)) ? static_cast<char>(std::tolower(c)) : '_';
    return s;
}

namespace {

struct Run {
    const ExperimentConfig& cfg;
    OutputDir& out;
    RunManifest& manifest;
    std::vector<VerifierReport> reports;
    std::ostream& log;

    DriftOperator op = cfg.make_operator();
    NormSuite ns = cfg.make_norms();
    LevyNoiseModel noise = cfg.make_noise();

    // Full-noise base configuration on the experiment's own stream.
    SimConfig base(std::uint64_t tag) const {
        SimConfig s = cfg.make_sim(tag);
        s.truncation.reset();
        return s;
    }

    void add(VerifierReport rep) {
        log << "  " << std::left << std::setw(28) << rep.claim << (rep.pass ? "PASS" : "FAIL") << "  "
            << rep.key_statistic << "=" << (rep.has(rep.key_statistic) ? format_number(rep.key_value()) : "-")
            << "\n";
        if (!rep.table.columns.empty()) out.write_csv(claim_file_stem(rep.claim) + ".csv", rep.table);
        reports.push_back(std::move(rep));
    }
};

std::string event_name(const PathRecord& r) {
    if (r.is_jump) return "jump";
    return r.on_grid ? "grid" : "record";
}

void simulate(Run& run) {
    const auto& cfg = run.cfg;
    SimConfig sc = cfg.make_sim(stream_tag::kSimulate);
    sc.store_states = true;
    sc.energy_diagnostics = true;
    const GridFunction x = cfg.make_initial();
    const TrajectoryPath path = sc.truncation ? evolve_truncated(x, run.op, run.ns, run.noise, sc)
                                              : evolve_full(x, run.op, run.ns, run.noise, sc);

    Table traj;
    traj.columns = {"time", "h_norm", "v_norm", "event"};
    const bool full = cfg.simulate.full_state;
    if (full)
        for (std::size_t i = 0; i < cfg.op.n; ++i) traj.columns.push_back("state_" + std::to_string(i));
    auto row = [&](double t, const GridFunction& u, double hn, double vn, const std::string& ev) {
        std::vector<Table::Cell> cells{t, hn, vn, ev};
        if (full)
            for (double v : u.values()) cells.emplace_back(v);
        traj.add(std::move(cells));
    };
    for (const auto& r : path.records) {
        if (r.left_limit) {
            const GridFunction& l = *r.left_limit;
            row(r.time, l, h_norm(run.ns, l), v_norm(run.ns, l), "jump_left");
        }
        row(r.time, r.state, r.h_norm, r.v_norm, event_name(r));
    }
    run.out.write_csv("trajectory.csv", traj);

    Table steps;
    steps.columns = {"step", "dt"};
    for (std::size_t k = 0; k < path.step_dt.size(); ++k) steps.add({k, path.step_dt[k]});
    run.out.write_csv("steps.csv", steps);

    const auto& st = path.stats;
    auto& d = run.manifest.diagnostics;
    d.emplace_back("accepted_steps", static_cast<double>(st.accepted));
    d.emplace_back("rejected_steps", static_cast<double>(st.rejected));
    d.emplace_back("newton_iterations", static_cast<double>(st.newton_iterations));
    d.emplace_back("jumps", static_cast<double>(st.jumps));
    d.emplace_back("min_dt", st.min_dt);
    d.emplace_back("max_dt", st.max_dt);
    d.emplace_back("max_energy_defect", st.max_energy_defect);
    d.emplace_back("sup_h_norm", path.sup_h_norm);
    d.emplace_back("terminal_h_norm", h_norm(run.ns, path.terminal));
    run.log << "  simulated " << path.records.size() << " records, " << st.accepted << " steps, " << st.jumps
            << " jumps\n";
}

void noise_test(Run& run) {
    const auto& cfg = run.cfg;
    const RngStream rng{cfg.seed.master, stream_tag::kNoiseTests};
    if (run.noise.is_zero()) {
        run.log << "  noise model has no jumps; only the band table is written\n";
    } else {
        for (auto& rep : run_noise_tests(run.noise, cfg.noise_test, rng)) run.add(std::move(rep));
    }
    const double e0 = run.noise.inner_cutoff();
    std::vector<NoiseBand> bands;
    for (double edge : {0.01, 0.1, 1.0})
        if (edge > e0) bands.push_back({bands.empty() ? e0 : bands.back().hi, edge});
    bands.push_back({1.0, kInfinity});
    run.out.write_csv("noise_bands.csv", noise_band_table(run.noise, bands, {0.5, 1.0, 1.5, 2.0}));
}

void verify_conditions(Run& run) {
    const auto& cfg = run.cfg;
    const auto& cc = cfg.conditions;
    const RngStream root{cfg.seed.master, stream_tag::kConditions};

    Table table;
    table.columns = {"condition", "n", "samples", "violations", "pass", "key", "value"};
    const char* names[] = {"H7_weak_dissipativity", "H6_decay", "H1_hemicontinuity", "strong_dissipativity_absent"};
    std::vector<VerifierReport> reps(4);
    for (std::size_t c = 0; c < 4; ++c) {
        reps[c].claim = names[c];
        reps[c].pass = true;
        reps[c].rng = root;
        reps[c].param("samples", static_cast<double>(c == 2 ? cc.lines : cc.samples));
    }
    double worst_h7 = -kInfinity, min_c = kInfinity, worst_h1 = 0.0, min_h1_order = kInfinity, worst_collapse = 0.0;
    std::size_t h7_viol = 0, h1_viol = 0;
    for (std::size_t g = 0; g < cc.grid_sizes.size(); ++g) {
        const std::size_t n = cc.grid_sizes[g];
        const RngStream rs = root.child(g);
        const ConditionReport crs[] = {
            check_H7_dissipativity(run.op, run.ns, n, cc.samples, rs.child(0)),
            check_H6_decay(run.op, run.ns, n, cc.varpi_grid, cc.samples, rs.child(1)),
            check_H1_hemicontinuity(run.op, run.ns, n, cc.lines, rs.child(2)),
            check_strong_dissipativity_absent(run.op, run.ns, n, cc.samples, rs.child(3)),
        };
        for (std::size_t c = 0; c < 4; ++c) {
            const ConditionReport& cr = crs[c];
            reps[c].pass = reps[c].pass && cr.pass;
            if (!cr.note.empty() && reps[c].note.empty()) reps[c].note = cr.note;
            for (const auto& [k, v] : cr.values) table.add({cr.condition, n, cr.samples, cr.violations, cr.pass, k, v});
            if (cr.values.empty()) table.add({cr.condition, n, cr.samples, cr.violations, cr.pass, "", ""});
        }
        worst_h7 = std::max(worst_h7, crs[0].value("max_pairing_difference"));
        h7_viol += crs[0].violations;
        min_c = std::min(min_c, crs[1].value("best_C_tilde"));
        worst_h1 = std::max(worst_h1, crs[2].value("max_increment"));
        min_h1_order = std::min(min_h1_order, crs[2].value("min_observed_order"));
        h1_viol += crs[2].violations;
        const auto& sv = crs[3].values;
        worst_collapse = std::max(worst_collapse, sv[4].second / sv[0].second);
    }
    reps[0].key_statistic = "violations";
    reps[0].stat("violations", static_cast<double>(h7_viol));
    reps[0].stat("max_pairing_difference", worst_h7);
    reps[1].key_statistic = "min_best_C_tilde";
    reps[1].stat("min_best_C_tilde", min_c);
    reps[2].key_statistic = "violations";
    reps[2].stat("violations", static_cast<double>(h1_viol));
    reps[2].stat("max_increment", worst_h1);
    reps[2].stat("min_observed_order", min_h1_order);
    reps[3].key_statistic = "max_collapse_ratio";
    reps[3].stat("max_collapse_ratio", worst_collapse);

    run.out.write_csv("conditions.csv", table);
    for (auto& r : reps) run.add(std::move(r));
}

void verify(Run& run, const std::string& claim) {
    const auto& cfg = run.cfg;
    const bool all = claim == "all";
    const GridFunction x = cfg.make_initial();
    if (all || claim == "A0") {
        run.add(verify_A0_symmetry(run.noise, cfg.a0_samples, RngStream{cfg.seed.master, stream_tag::kVerifyA0}));
    }
    if (all || claim == "A1-1") {
        run.add(verify_A1_1_decay(x, run.op, run.ns, cfg.a1_1.horizon, cfg.a1_1.target, run.base(0)));
    }
    if (all || claim == "A1-2") {
        run.add(verify_A1_2_small_noise(x, run.op, run.ns, run.noise, cfg.a1_2.t, cfg.a1_2.ladder, cfg.a1_2.paths,
                                        run.base(stream_tag::kVerifyA12)));
    }
    if (all || claim == "A1-3") {
        const auto& a = cfg.a1_3;
        const SimConfig b = run.base(stream_tag::kVerifyA13);
        if (a.zeta_grid.empty() && a.t_grid.empty())
            run.add(verify_A1_3_local_boundedness(a.params, run.op, run.ns, run.noise, b));
        else
            run.add(search_A1_3(a.params, a.zeta_grid.empty() ? std::vector<double>{a.params.zeta} : a.zeta_grid,
                                a.t_grid.empty() ? std::vector<double>{a.params.t} : a.t_grid, run.op, run.ns,
                                run.noise, b));
    }
    if (all || claim == "e-property") {
        const GridFunction y = cfg.make_partner(x, cfg.e_property.distance, 0);
        run.add(verify_e_property(x, y, run.op, run.ns, run.noise, cfg.e_property.t_grid, cfg.e_property.paths,
                                  run.base(stream_tag::kVerifyEProperty)));
    }
}

void access(Run& run) {
    const auto& a = run.cfg.access;
    AccessibilityQuery q{run.cfg.make_initial(), a.kappa, a.times, a.paths, a.min_window};
    run.add(estimate_accessibility(q, run.op, run.ns, run.noise, run.base(stream_tag::kAccess)));
}

void ergodic(Run& run) {
    const GridFunction x1 = run.cfg.make_initial();
    const GridFunction x2 = run.cfg.make_partner(x1, run.cfg.ergodic.distance, 1);
    run.add(verify_uniqueness(x1, x2, run.op, run.ns, run.noise, run.cfg.ergodic.params,
                              run.base(stream_tag::kErgodic)));
}

void lyapunov(Run& run) {
    const auto& l = run.cfg.lyapunov;
    run.add(lyapunov_moment_check(run.cfg.make_initial(), run.op, run.ns, run.noise, LyapunovConfig{l.theta_hat},
                                  l.horizons, l.paths, run.base(stream_tag::kLyapunov)));
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

Table summary_table(const std::vector<VerifierReport>& reports) {
    Table t;
    t.columns = {"claim", "pass", "key_statistic", "key_value", "ci_lo", "ci_hi"};
    for (const auto& r : reports) {
        const ClaimSummary c = ClaimSummary::from(r);
        t.add({c.claim, c.pass, c.key_statistic, c.key_value, c.has_interval ? format_number(c.ci_lo) : "",
               c.has_interval ? format_number(c.ci_hi) : ""});
    }
    return t;
}

Table statistics_table(const std::vector<VerifierReport>& reports) {
    Table t;
    t.columns = {"claim", "kind", "key", "value"};
    for (const auto& r : reports) {
        for (const auto& [k, v] : r.parameters) t.add({r.claim, "parameter", k, v});
        for (const auto& [k, v] : r.statistics) t.add({r.claim, "statistic", k, v});
    }
    return t;
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg, const RunRequest& req, std::ostream& log) {
    const auto t0 = std::chrono::steady_clock::now();
    RunManifest m;
    m.config_toml = to_toml(cfg);
    m.config_digest = sha256_hex(m.config_toml);
    m.command = req.command;
    if (req.command == "verify") m.args = {"--claim", req.claim};
    m.version = LEVYLAB_VERSION;
    m.started_at = utc_now();
    m.workers = worker_count();

    OutputDir out(req.out_dir, m.config_digest);
    Run run{cfg, out, m, {}, log};
    m.inner_cutoff = run.noise.inner_cutoff();
    try {
        m.discarded_small_jump_variance = run.noise.is_zero() ? 0.0 : run.noise.small_jump_variance(m.inner_cutoff);
    } catch (const std::exception&) {
        m.discarded_small_jump_variance = std::nan("");
    }

    const std::string& c = req.command;
    try {
        if (c == "simulate") simulate(run);
        if (c == "noise-test" || c == "all") noise_test(run);
        if (c == "verify-conditions" || c == "all") verify_conditions(run);
        if (c == "verify") verify(run, req.claim);
        if (c == "all") verify(run, "all");
        if (c == "access" || c == "all") access(run);
        if (c == "ergodic" || c == "all") ergodic(run);
        if (c == "lyapunov" || c == "all") lyapunov(run);
    } catch (const std::exception& e) {
        m.error = e.what();
        log << "error: " << e.what() << "\n";
    }

    if (!run.reports.empty()) {
        out.write_csv("summary.csv", summary_table(run.reports));
        out.write_csv("statistics.csv", statistics_table(run.reports));
    }
    for (const auto& r : run.reports) m.claims.push_back(ClaimSummary::from(r));
    m.outputs = out.digests();
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file(out.path() / "manifest.toml", m.to_text());
    return m;
}

bool replay_manifest(const std::filesystem::path& manifest, const std::filesystem::path& out_dir, std::ostream& log) {
    const ParsedManifest pm = parse_manifest(read_file(manifest), manifest.string());
    if (sha256_hex(pm.config_toml) != pm.config_digest)
        throw std::runtime_error("config echo does not match its digest; the manifest was edited");
    const ExperimentConfig cfg = parse_config_text(pm.config_toml, manifest.string());
    if (to_toml(cfg) != pm.config_toml) throw std::runtime_error("config echo is not in canonical form");

    RunRequest req;
    req.command = pm.command;
    req.out_dir = out_dir;
    for (std::size_t i = 0; i + 1 < pm.args.size(); ++i)
        if (pm.args[i] == "--claim") req.claim = pm.args[i + 1];
    if (std::find(experiment_commands().begin(), experiment_commands().end(), req.command) ==
        experiment_commands().end())
        throw std::runtime_error("manifest names unknown command '" + req.command + "'");

    log << "replaying " << req.command << " into " << out_dir.string() << "\n";
    const RunManifest m = run_experiment(cfg, req, log);

    bool same = m.outputs.size() == pm.outputs.size();
    if (!same) log << "output sets differ: " << pm.outputs.size() << " recorded, " << m.outputs.size() << " now\n";
    for (const auto& [name, digest] : pm.outputs) {
        auto it = m.outputs.find(name);
        const bool ok = it != m.outputs.end() && it->second == digest;
        log << "  " << (ok ? "identical " : "DIFFERENT ") << name << "\n";
        same = same && ok;
    }
    return same;
}

}  // namespace levylab::cli
