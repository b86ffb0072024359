#include "pit/shooting.hpp"

#include "pit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pit {

Vector ShootingResidual::stacked() const {
  const Eigen::Index d = blocks.empty() ? 0 : blocks.front().size();
  Vector r(d * static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    r.segment(static_cast<Eigen::Index>(j) * d, d) = blocks[j];
  }
  return r;
}

double ShootingResidual::norm() const {
  double s = 0.0;
  for (const auto& b : blocks) s += b.squaredNorm();
  return std::sqrt(s);
}

double ShootingResidual::max_block_norm() const {
  double m = 0.0;
  for (const auto& b : blocks) m = std::max(m, b.norm());
  return m;
}

std::uint64_t FineSweep::max_window_units() const {
  std::uint64_t m = 0;
  for (const auto& c : window_counts) m = std::max(m, c.cost_units);
  return m;
}

SolveCounts FineSweep::total() const {
  SolveCounts t;
  for (const auto& c : window_counts) t += c;
  return t;
}

FineSweep fine_sweep(const ShootingState& state, const TimeGrid& grid, const OdeSystem& system,
                     const PropagatorConfig& cfg, WorkerPool* pool) {
  const std::size_t n = grid.windows();
  if (state.windows() != n) {
    throw SolverError(ErrorKind::InvalidArgument, "state and grid disagree on window count");
  }
  FineSweep sweep;
  sweep.endpoints.resize(n);
  sweep.window_counts.resize(n);
  auto task = [&](std::size_t w) {
    SolveStats local(system.dim());
    try {
      sweep.endpoints[w] = fine_propagate(system, state.period, grid.node(w), grid.node(w + 1),
                                          state.initial_values[w], cfg, &local);
    } catch (const SolverError& e) {
      throw e.with_window(w);
    }
    sweep.window_counts[w] = local.snapshot();
  };
  if (pool) {
    pool->parallel_for(n, task);
  } else {
    for (std::size_t w = 0; w < n; ++w) task(w);
  }
  return sweep;
}

ShootingResidual residual_from_endpoints(const std::vector<Vector>& endpoints,
                                         const ShootingState& state) {
  const std::size_t n = endpoints.size();
  ShootingResidual r;
  r.blocks.resize(n);
  // Window w ends at node w+1; that node's value is U_{(w+1) mod N}.
  for (std::size_t w = 0; w < n; ++w) {
    const std::size_t j = (w + 1) % n;
    r.blocks[j] = endpoints[w] - state.initial_values[j];
  }
  return r;
}

ShootingResidual residual_phi(const ShootingState& state, const TimeGrid& grid,
                              const OdeSystem& system, const PropagatorConfig& cfg,
                              WorkerPool* pool, SolveStats* stats) {
  state.validate(system.dim());
  const FineSweep sweep = fine_sweep(state, grid, system, cfg, pool);
  if (stats) stats->merge(sweep.total());
  return residual_from_endpoints(sweep.endpoints, state);
}

JacobianResult jacobian_phi_with_costs(const ShootingState& state, const TimeGrid& grid,
                                       const OdeSystem& system, const PropagatorConfig& cfg,
                                       JacobianMode mode, WorkerPool* pool,
                                       const std::vector<Vector>* fine_endpoints) {
  state.validate(system.dim());
  const std::size_t n = grid.windows();
  const auto d = static_cast<Eigen::Index>(system.dim());
  const Eigen::Index rows = static_cast<Eigen::Index>(n) * d;

  JacobianResult out;
  out.matrix = Matrix::Zero(rows, rows + 1);
  out.window_counts.resize(n);

  auto task = [&](std::size_t w) {
    SolveStats local(system.dim());
    const double ta = grid.node(w);
    const double tb = grid.node(w + 1);
    const Vector& u = state.initial_values[w];
    const double period = state.period;
    const auto j = static_cast<Eigen::Index>((w + 1) % n);
    const auto col = static_cast<Eigen::Index>(w);
    try {
      Vector fine_end;
      if (fine_endpoints) {
        fine_end = (*fine_endpoints)[w];
      } else {
        fine_end = fine_propagate(system, period, ta, tb, u, cfg, &local);
      }

      auto prop = [&](const Vector& x, double t) {
        return mode == JacobianMode::FdFine ? fine_propagate(system, t, ta, tb, x, cfg, &local)
                                            : coarse_propagate(system, t, ta, tb, x, cfg, &local);
      };
      const Vector base = mode == JacobianMode::FdFine ? fine_end : prop(u, period);

      auto block = out.matrix.block(j * d, col * d, d, d);
      Vector up = u;
      for (Eigen::Index i = 0; i < d; ++i) {
        const double h = kJacobianFdStep * (1.0 + std::abs(u(i)));
        up(i) = u(i) + h;
        block.col(i) = (prop(up, period) - base) / h;
        up(i) = u(i);
      }
      out.matrix.block(j * d, j * d, d, d) -= Matrix::Identity(d, d);

      Vector g;
      if (mode == JacobianMode::FdFine) {
        const double h = kJacobianFdStep * period;
        g = (prop(u, period + h) - base) / h;
      } else {
        g = period_sensitivity(system, tb - ta, fine_end, &local);
      }
      out.matrix.block(j * d, rows, d, 1) = g;
    } catch (const SolverError& e) {
      throw e.with_window(w);
    }
    out.window_counts[w] = local.snapshot();
  };
  if (pool) {
    pool->parallel_for(n, task);
  } else {
    for (std::size_t w = 0; w < n; ++w) task(w);
  }
  return out;
}

Matrix jacobian_phi(const ShootingState& state, const TimeGrid& grid, const OdeSystem& system,
                    const PropagatorConfig& cfg, JacobianMode mode, WorkerPool* pool,
                    SolveStats* stats) {
  JacobianResult r = jacobian_phi_with_costs(state, grid, system, cfg, mode, pool);
  if (stats) {
    for (const auto& c : r.window_counts) stats->merge(c);
  }
  return std::move(r.matrix);
}

namespace {

std::uint64_t max_units(const std::vector<SolveCounts>& counts) {
  std::uint64_t m = 0;
  for (const auto& c : counts) m = std::max(m, c.cost_units);
  return m;
}

struct Evaluated {
  ShootingState state;
  FineSweep sweep;
  ShootingResidual residual;
  double rel = 0.0;
};

Evaluated evaluate(ShootingState state, const TimeGrid& grid, const OdeSystem& system,
                   const PropagatorConfig& cfg, WorkerPool* pool) {
  Evaluated e;
  e.sweep = fine_sweep(state, grid, system, cfg, pool);
  e.residual = residual_from_endpoints(e.sweep.endpoints, state);
  e.rel = relative_jump_norm(e.residual.blocks, state);
  e.state = std::move(state);
  return e;
}

}  // namespace

SolveResult newton_solve(const ShootingState& z0, const TimeGrid& grid, const OdeSystem& system,
                         const PropagatorConfig& cfg, const NewtonOptions& opts,
                         WorkerPool* pool) {
  cfg.validate();
  z0.validate(system.dim());
  if (!(opts.tol > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "tol must be > 0");

  const std::size_t d = system.dim();
  const std::size_t n = grid.windows();
  SolveResult result;
  ConvergenceRecord& rec = result.record;
  SolveStats block_stats(d);

  Evaluated cur = evaluate(z0, grid, system, cfg, pool);
  rec.total += cur.sweep.total();
  std::uint64_t pending_fine = cur.sweep.max_window_units();

  Evaluated best = cur;
  for (std::size_t k = 0;; ++k) {
    IterationRecord row;
    row.k = k;
    row.period = cur.state.period;
    row.jump_norm_rel = cur.rel;
    row.max_block_norm = cur.residual.max_block_norm();
    row.period_candidate = cur.state.period;
    row.fine_units = pending_fine;
    pending_fine = 0;
    rec.outer_iterations = k;

    if (cur.rel < best.rel) best = cur;
    if (cur.rel <= opts.tol) {
      rec.rows.push_back(row);
      result.status = SolveStatus::Converged;
      break;
    }
    if (k == opts.max_iter) {
      rec.rows.push_back(row);
      result.status = SolveStatus::MaxIterExceeded;
      cur = best;
      break;
    }

    const JacobianResult jac = jacobian_phi_with_costs(cur.state, grid, system, cfg, opts.mode,
                                                       pool, &cur.sweep.endpoints);
    for (const auto& c : jac.window_counts) rec.total += c;
    row.fine_units += max_units(jac.window_counts);

    const SolveCounts before = block_stats.snapshot();
    const Vector step = solve_min_norm(jac.matrix, -cur.residual.stacked(), &block_stats,
                                       opts.linear);
    const SolveCounts used = block_stats.snapshot() - before;
    row.block_units = used.cost_units;
    rec.total += used;

    const Vector z = cur.state.stacked();
    double lambda = 1.0;
    Evaluated trial;
    for (std::size_t halvings = 0;; ++halvings) {
      ShootingState next = ShootingState::from_stacked(z + lambda * step, n, d);
      if (!(next.period > 0.0)) {
        next.period = cur.state.period / 2.0;
        row.note = "period-clamped";
      }
      bool ok = true;
      try {
        trial = evaluate(std::move(next), grid, system, cfg, pool);
        rec.total += trial.sweep.total();
        row.fine_units += trial.sweep.max_window_units();
      } catch (const SolverError& e) {
        if (!opts.damping || halvings == opts.max_halvings) throw;
        ok = false;
      }
      if (ok && (!opts.damping || trial.rel <= cur.rel || halvings == opts.max_halvings)) break;
      lambda /= 2.0;
    }
    if (lambda < 1.0) row.note += row.note.empty() ? "damped" : ";damped";
    row.damping = lambda;
    row.period_candidate = trial.state.period;
    row.period_change_rel = std::abs(trial.state.period - cur.state.period) / cur.state.period;
    rec.rows.push_back(row);
    cur = std::move(trial);
  }

  rec.linear_solves = rec.total.factorizations;
  result.state = cur.state;
  result.jump_norm_rel = cur.rel;
  return result;
}

ShootingState coarse_initial_state(const OdeSystem& system, const TimeGrid& grid,
                                   const Vector& u0, double period0, const PropagatorConfig& cfg,
                                   SolveStats* stats) {
  ShootingState s;
  s.period = period0;
  s.initial_values.reserve(grid.windows());
  s.initial_values.push_back(u0);
  for (std::size_t w = 0; w + 1 < grid.windows(); ++w) {
    s.initial_values.push_back(coarse_propagate(system, period0, grid.node(w), grid.node(w + 1),
                                                s.initial_values.back(), cfg, stats));
  }
  s.validate(system.dim());
  return s;
}

ShootingState transient_initial_state(const OdeSystem& system, const TimeGrid& grid,
                                      const Vector& u0, double period0, double transient,
                                      const PropagatorConfig& cfg, SolveStats* stats) {
  if (!(period0 > 0.0) || !(transient >= 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "period0 must be > 0 and transient >= 0");
  }
  const double dt = period0 * grid.window_length(0) / static_cast<double>(cfg.fine_steps_per_window);
  const auto steps = static_cast<std::size_t>(std::llround(transient / dt));
  ShootingState s;
  s.period = period0;
  s.initial_values.reserve(grid.windows());
  s.initial_values.push_back(integrate(system, 0.0, dt, steps, u0, cfg, {}, stats));
  for (std::size_t w = 0; w + 1 < grid.windows(); ++w) {
    s.initial_values.push_back(fine_propagate(system, period0, grid.node(w), grid.node(w + 1),
                                              s.initial_values.back(), cfg, stats));
  }
  s.validate(system.dim());
  return s;
}

}  // namespace pit
