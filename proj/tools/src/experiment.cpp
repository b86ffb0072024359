#include "pit/bench/experiment.hpp"

#include <pit/errors.hpp>
#include <pit/parareal.hpp>
#include <pit/shooting.hpp>
#include <pit/time_grid.hpp>

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <fstream>

namespace pit::bench {

namespace {

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

std::string trajectory_csv(const Trajectory& t, std::size_t stride) {
  if (stride == 0) stride = std::max<std::size_t>(1, (t.times.size() + 19999) / 20000);
  const auto d = t.states.empty() ? 0 : t.states.front().size();
  std::string s = "t_seconds";
  for (Eigen::Index j = 0; j < d; ++j) s += fmt::format(",u{}", j);
  s += ",cumulative_units\n";
  for (std::size_t i = 0; i < t.times.size(); i += stride) {
    s += fmt::format("{:.17g}", t.times[i]);
    for (Eigen::Index j = 0; j < d; ++j) s += fmt::format(",{:.17g}", t.states[i](j));
    s += fmt::format(",{}\n", t.cumulative_units[i]);
  }
  return s;
}

double resolved_dt(const RunConfig& c, const Problem& p) { return c.sequential.dt.value_or(p.seq_dt); }

ShootingState initial_state(const RunConfig& c, const Problem& p, const TimeGrid& grid,
                            const PropagatorConfig& pc) {
  const Vector u0 = c.u0.value_or(p.u0);
  if (u0.size() != static_cast<Eigen::Index>(p.system.dim())) {
    throw ConfigError(fmt::format("u0 has {} entries, problem '{}' needs {}", u0.size(), p.name,
                                  p.system.dim()));
  }
  const double period0 = c.period0.value_or(p.period0);
  const double transient = c.seed_transient.value_or(p.seed_transient);
  if (transient > 0.0) return transient_initial_state(p.system, grid, u0, period0, transient, pc);
  return coarse_initial_state(p.system, grid, u0, period0, pc);
}

}  // namespace

Trajectory simulate(const OdeSystem& system, const Vector& u0, double dt, double horizon,
                    const PropagatorConfig& cfg) {
  if (!(dt > 0.0) || !(horizon > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "dt and horizon must be > 0");
  }
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  Trajectory t;
  t.times.reserve(steps + 1);
  t.states.reserve(steps + 1);
  t.cumulative_units.reserve(steps + 1);
  SolveStats stats(system.dim());
  integrate(system, 0.0, dt, steps, u0, cfg,
            [&](std::size_t, double time, const Vector& u, std::uint64_t units) {
              t.times.push_back(time);
              t.states.push_back(u);
              t.cumulative_units.push_back(units);
            },
            &stats);
  t.total = stats.snapshot();
  return t;
}

SequentialResult sequential_reference(const OdeSystem& system, const Vector& u0, double dt,
                                      double horizon, double fraction, bool step_doubling,
                                      std::size_t samples, double tol,
                                      const PropagatorConfig& cfg) {
  SequentialResult r;
  r.dt = dt;
  r.horizon = horizon;
  r.trajectory = simulate(system, u0, dt, horizon, cfg);
  r.estimate = detect_period(r.trajectory.times, r.trajectory.states, fraction);
  if (step_doubling) {
    const Trajectory coarse = simulate(system, u0, 2.0 * dt, horizon, cfg);
    const PeriodEstimate e2 = detect_period(coarse.times, coarse.states, fraction);
    r.estimate.discretization = std::abs(r.estimate.period_seconds - e2.period_seconds);
    r.estimate.confidence_window += r.estimate.discretization;
  }
  r.steady = find_steady_state(r.trajectory.times, r.trajectory.states,
                               r.trajectory.cumulative_units, r.estimate.period_seconds, samples,
                               tol);
  return r;
}

SequentialResult run_sequential(const RunConfig& config) {
  config.validate();
  const Problem p = make_problem(config.problem, config.params);
  const Vector u0 = config.u0.value_or(p.u0);
  const auto& q = config.sequential;
  SequentialResult r = sequential_reference(p.system, u0, resolved_dt(config, p),
                                            q.horizon.value_or(p.seq_horizon), q.fraction,
                                            q.step_doubling, config.windows, config.outer_tol,
                                            config.propagator());
  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    write_file(config.out_dir / "trajectory.csv", trajectory_csv(r.trajectory, q.trajectory_stride));
  }
  return r;
}

double speedup(std::uint64_t sequential_units, std::uint64_t effective_units) {
  if (effective_units == 0) throw SolverError(ErrorKind::InvalidArgument, "zero effective units");
  return static_cast<double>(sequential_units) / static_cast<double>(effective_units);
}

std::uint64_t effective_solve_count(const ConvergenceRecord& record) {
  std::uint64_t n = record.fine_units() + record.coarse_units();
  for (const auto& row : record.rows) n += row.block_units > 0 ? 1 : 0;
  return n;
}

std::string convergence_csv(const std::string& run_id, Mode mode, const ConvergenceRecord& record) {
  std::string s =
      "run_id,mode,k,s,T_seconds,jump_norm_rel,fine_units,coarse_units,block_units,"
      "cumulative_units\n";
  std::uint64_t cumulative = 0;
  const std::string m = to_string(mode);
  for (const auto& r : record.rows) {
    cumulative += r.fine_units + r.coarse_units + r.block_units;
    s += fmt::format("{},{},{},{},{:.17g},{:.17g},{},{},{},{}\n", run_id, m, r.k, r.s, r.period,
                     r.jump_norm_rel, r.fine_units, r.coarse_units, r.block_units, cumulative);
  }
  return s;
}

std::string format_summary(const ExperimentSummary& x) {
  std::string s;
  auto line = [&](const std::string& k, const std::string& v) { s += fmt::format("{} = {}\n", k, v); };
  line("run_id", x.run_id);
  line("problem", x.problem);
  line("mode", to_string(x.mode));
  line("status", x.status);
  line("exit_code", std::to_string(x.exit_code));
  if (!x.error.empty()) line("error", x.error);
  if (x.period_seconds) line("period_seconds", fmt::format("{:.10g}", *x.period_seconds));
  if (x.mode != Mode::Sequential) {
    line("jump_norm_rel", fmt::format("{:.6g}", x.jump_norm_rel));
    line("outer_iterations", std::to_string(x.outer_iterations));
    line("inner_iterations", std::to_string(x.inner_iterations));
    line("total_units", std::to_string(x.total_units));
    line("effective_units", std::to_string(x.effective_units));
    line("fine_units", std::to_string(x.fine_units));
    line("coarse_units", std::to_string(x.coarse_units));
    line("block_units", std::to_string(x.block_units));
    line("linear_solves", std::to_string(x.linear_solves));
    line("effective_solves", std::to_string(x.effective_solves));
    line("csv_rows", std::to_string(x.csv_rows));
  }
  if (x.estimate) {
    line("estimate_period_seconds", fmt::format("{:.10g}", x.estimate->period_seconds));
    line("estimate_confidence_window", fmt::format("{:.4g}", x.estimate->confidence_window));
    line("estimate_crossings", std::to_string(x.estimate->crossings_used));
    line("estimate_component", std::to_string(x.estimate->component));
  }
  if (x.baseline) {
    line("sequential_steady_reached", x.baseline->reached ? "true" : "false");
    if (x.baseline->reached) {
      line("sequential_steady_time", fmt::format("{:.6g}", x.baseline->time));
      line("sequential_units", std::to_string(x.baseline->units));
    }
  }
  if (!x.baseline_error.empty()) line("baseline_error", x.baseline_error);
  if (x.speedup) line("speedup", fmt::format("{:.4f}", *x.speedup));
  if (x.speedup_solves) line("speedup_solve_count", fmt::format("{:.4f}", *x.speedup_solves));
  line("wall_seconds", fmt::format("{:.3f}", x.wall_seconds));
  return s;
}

ExperimentSummary run_experiment(const RunConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const Problem p = make_problem(config.problem, config.params);
  const PropagatorConfig pc = config.propagator();

  ExperimentSummary x;
  x.run_id = config.run_id;
  x.problem = p.name;
  x.mode = config.mode;
  std::optional<Trajectory> trajectory;
  std::string csv;

  try {
    const auto& q = config.sequential;
    if (config.mode == Mode::Sequential) {
      SequentialResult r = sequential_reference(
          p.system, config.u0.value_or(p.u0), resolved_dt(config, p),
          q.horizon.value_or(p.seq_horizon), q.fraction, q.step_doubling, config.windows,
          config.outer_tol, pc);
      x.estimate = r.estimate;
      x.baseline = r.steady;
      x.period_seconds = r.estimate.period_seconds;
      x.total_units = r.trajectory.total.cost_units;
      x.linear_solves = r.trajectory.total.factorizations;
      trajectory = std::move(r.trajectory);
      x.status = "converged";
      x.exit_code = 0;
    } else {
      const TimeGrid grid = TimeGrid::uniform(config.windows);
      WorkerPool pool(config.workers);
      const ShootingState z0 = initial_state(config, p, grid, pc);

      SolveResult result;
      if (config.mode == Mode::Shooting) {
        NewtonOptions o;
        o.tol = config.outer_tol;
        o.max_iter = config.max_iter;
        o.damping = config.damping;
        o.mode = config.coarse_jacobian ? JacobianMode::CoarseParareal : JacobianMode::FdFine;
        o.linear = config.linear;
        result = newton_solve(z0, grid, p.system, pc, o, &pool);
      } else {
        PppcConfig o;
        o.outer_tol = config.outer_tol;
        o.outer_max_iter = config.max_iter;
        o.inner_tol = config.inner_tol;
        o.inner_max_iter = config.inner_max_iter;
        o.tikhonov = config.tikhonov;
        o.linear = config.linear;
        if (config.mode == Mode::Pppc) {
          const double period = config.period_known.value_or(config.period0.value_or(p.period0));
          result = pppc_known_T_solve(z0, period, grid, p.system, p.surrogate, pc, o, &pool);
        } else {
          result = pppc_up_solve(z0, grid, p.system, p.surrogate, pc, o, &pool);
        }
      }

      const ConvergenceRecord& rec = result.record;
      x.status = result.status == SolveStatus::Converged ? "converged" : "max-iter";
      x.exit_code = result.status == SolveStatus::Converged ? 0 : 2;
      x.period_seconds = result.state.period;
      x.jump_norm_rel = result.jump_norm_rel;
      x.outer_iterations = rec.outer_iterations;
      x.inner_iterations = rec.inner_iterations;
      x.total_units = rec.total.cost_units;
      x.effective_units = rec.effective_units();
      x.fine_units = rec.fine_units();
      x.coarse_units = rec.coarse_units();
      x.block_units = rec.block_units();
      x.linear_solves = rec.linear_solves;
      x.effective_solves = effective_solve_count(rec);
      x.csv_rows = rec.rows.size();
      csv = convergence_csv(config.run_id, config.mode, rec);
      x.result = std::move(result);

      if (q.baseline) {
        try {
          SequentialResult r = sequential_reference(
              p.system, config.u0.value_or(p.u0), resolved_dt(config, p),
              q.baseline_horizon.value_or(p.baseline_horizon), q.fraction, false,
              config.windows, config.outer_tol, pc);
          x.estimate = r.estimate;
          x.baseline = r.steady;
          if (r.steady.reached && x.effective_units > 0) {
            x.speedup = speedup(r.steady.units, x.effective_units);
            x.speedup_solves = speedup(r.steady.units, x.effective_solves);
          }
          trajectory = std::move(r.trajectory);
        } catch (const SolverError& e) {
          x.baseline_error = e.what();
        }
      }
    }
  } catch (const SolverError& e) {
    x.status = "solver-error";
    x.exit_code = 3;
    x.error = e.what();
  }

  x.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!config.out_dir.empty()) {
    std::filesystem::create_directories(config.out_dir);
    if (config.mode != Mode::Sequential) {
      if (csv.empty()) csv = convergence_csv(config.run_id, config.mode, ConvergenceRecord{});
      write_file(config.out_dir / "convergence.csv", csv);
    }
    if (trajectory) {
      write_file(config.out_dir / "trajectory.csv",
                 trajectory_csv(*trajectory, config.sequential.trajectory_stride));
    }
    write_file(config.out_dir / "summary.txt", format_summary(x));
  }
  return x;
}

}  // namespace pit::bench
