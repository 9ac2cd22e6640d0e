#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "levylab/grid.hpp"
#include "levylab/levy_noise.hpp"
#include "levylab/operators.hpp"
#include "levylab/rng.hpp"

namespace levylab {

enum class StepScheme {
    // u+ = u + dt A(u), adaptive dt, step rejected and halved when ||u||_H^2 rises.
    ExplicitEuler,
    // u+ = u + dt A(u+), solved by damped Newton on the convex step functional.
    ImplicitEuler,
};

struct SimConfig {
    double horizon = 1.0;
    double max_dt = 1e-2;
    // Caps dt * ||A(u)||_H relative to ||u||_H + 1.
    double step_tolerance = 0.05;
    // Small-jump truncation level eps in (0, 1]; unset means the full noise.
    std::optional<double> truncation;
    double record_dt = 1e-2;
    // Additional record times in (0, horizon], e.g. query times off the record grid.
    std::vector<double> extra_record_times;
    RngStream rng;
    StepScheme scheme = StepScheme::ImplicitEuler;
    // Keep the full state at every record (terminal state is always kept).
    bool store_states = true;
    // Track |dE - 2 dt <A u, u>| per accepted step (advisory, costs one pairing per step).
    bool energy_diagnostics = false;

    void validate() const;
};

struct PathRecord {
    double time = 0.0;
    double h_norm = 0.0;
    double v_norm = 0.0;
    // Post-jump value at jump times (cadlag convention). Empty when states are not stored.
    GridFunction state;
    // Left limit, present exactly at jump times when states are stored.
    std::optional<GridFunction> left_limit;
    bool is_jump = false;
    // True exactly at multiples of record_dt.
    bool on_grid = false;
};

struct StepStatistics {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t newton_iterations = 0;
    std::size_t jumps = 0;
    double min_dt = 0.0;
    double max_dt = 0.0;
    double max_energy_defect = 0.0;
};

struct TrajectoryPath {
    std::vector<PathRecord> records;
    std::vector<double> step_dt;
    StepStatistics stats;
    GridFunction terminal;
    // Supremum of ||X(s)||_H over accepted steps and jump times.
    double sup_h_norm = 0.0;

    // Index of the last record with time <= t.
    std::size_t record_at_or_before(double t) const;
};

// Advances x along the drift and applies the scheduled jumps atomically.
// Records land on multiples of record_dt, on every jump time, and on the horizon.
TrajectoryPath evolve_with_schedule(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                    const JumpSchedule& schedule, const SimConfig& cfg,
                                    const GridFunction* compensator = nullptr);

// dY = A(Y) dt
TrajectoryPath evolve_deterministic(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                    const SimConfig& cfg);

// dX = A(X) dt + jumps with norm in (eps0, eps]; cfg.truncation must hold eps.
TrajectoryPath evolve_truncated(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                                const LevyNoiseModel& noise, const SimConfig& cfg);

// dX = A(X) dt + dL with every jump above the inner cutoff.
TrajectoryPath evolve_full(const GridFunction& x, const DriftOperator& op, const NormSuite& ns,
                           const LevyNoiseModel& noise, const SimConfig& cfg);

// The noise band a configuration simulates: (eps0, eps] or (eps0, inf).
NoiseBand simulated_band(const LevyNoiseModel& noise, const SimConfig& cfg);

// Synchronous coupling: both paths consume one schedule on a common mesh.
std::pair<TrajectoryPath, TrajectoryPath> evolve_coupled(const GridFunction& x, const GridFunction& y,
                                                         const DriftOperator& op, const NormSuite& ns,
                                                         const LevyNoiseModel& noise, const SimConfig& cfg);

std::pair<TrajectoryPath, TrajectoryPath> evolve_coupled_with_schedule(const GridFunction& x, const GridFunction& y,
                                                                       const DriftOperator& op, const NormSuite& ns,
                                                                       const JumpSchedule& schedule,
                                                                       const SimConfig& cfg);

// One backward Euler step u+ - dt (A(u+) + offset) = u. Returns false when
// Newton fails to converge; `iterations` receives the Newton count.
bool implicit_step(const DriftOperator& op, const GridFunction& u, double dt, const GridFunction* offset,
                   GridFunction& out, std::size_t* iterations = nullptr);

}  // namespace levylab
