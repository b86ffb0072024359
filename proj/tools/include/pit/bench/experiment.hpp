#pragma once

#include "pit/bench/config.hpp"
#include "pit/bench/period.hpp"

#include <pit/convergence.hpp>
#include <pit/worker_pool.hpp>

#include <optional>
#include <string>
#include <vector>

namespace pit::bench {

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  /// Solve units spent up to each sample (d x d solves).
  std::vector<std::uint64_t> cumulative_units;
  SolveCounts total;
};

/// Physical-time implicit Euler from u0 over [0, horizon] with step dt
/// (horizon / dt rounded to whole steps).
Trajectory simulate(const OdeSystem& system, const Vector& u0, double dt, double horizon,
                    const PropagatorConfig& cfg);

struct SequentialResult {
  Trajectory trajectory;
  PeriodEstimate estimate;
  /// First time the one-period defect drops to the tolerance.
  SteadyState steady;
  double dt = 0.0;
  double horizon = 0.0;
};

/// Sequential reference on an explicit step and horizon. With
/// `step_doubling` a second run at 2 dt adds |P(dt) - P(2 dt)| to the
/// confidence window.
SequentialResult sequential_reference(const OdeSystem& system, const Vector& u0, double dt,
                                      double horizon, double fraction, bool step_doubling,
                                      std::size_t samples, double tol,
                                      const PropagatorConfig& cfg);

/// Sequential run of `config` (step and horizon from [sequential] or the
/// problem defaults). Writes trajectory.csv when out_dir is non-empty.
/// Throws SolverError(NoOscillationDetected) below 3 crossings.
SequentialResult run_sequential(const RunConfig& config);

struct ExperimentSummary {
  std::string run_id;
  std::string problem;
  Mode mode = Mode::PppcUp;
  /// converged | max-iter | solver-error
  std::string status;
  int exit_code = 0;
  std::string error;

  std::optional<double> period_seconds;
  double jump_norm_rel = 0.0;
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  std::uint64_t total_units = 0;
  std::uint64_t effective_units = 0;
  std::uint64_t fine_units = 0;
  std::uint64_t coarse_units = 0;
  std::uint64_t block_units = 0;
  /// Every linear system counted once regardless of its size.
  std::uint64_t linear_solves = 0;
  std::uint64_t effective_solves = 0;

  std::optional<PeriodEstimate> estimate;
  std::optional<SteadyState> baseline;
  /// Set when the sequential baseline itself failed.
  std::string baseline_error;
  std::optional<double> speedup;
  std::optional<double> speedup_solves;

  double wall_seconds = 0.0;
  std::size_t csv_rows = 0;
  std::optional<SolveResult> result;
};

/// sequential_units / effective_units.
double speedup(std::uint64_t sequential_units, std::uint64_t effective_units);

/// Effective solve count: fine and coarse units plus one per block solve.
std::uint64_t effective_solve_count(const ConvergenceRecord& record);

/// Header plus one row per iteration record, deterministic formatting.
std::string convergence_csv(const std::string& run_id, Mode mode, const ConvergenceRecord& record);

std::string format_summary(const ExperimentSummary& summary);

/// Validates the config, runs the selected mode and the sequential baseline,
/// writes convergence.csv, summary.txt and trajectory.csv into out_dir (when
/// non-empty). Solver errors are reported in the summary with exit code 3.
/// Throws ConfigError.
ExperimentSummary run_experiment(const RunConfig& config);

}  // namespace pit::bench
