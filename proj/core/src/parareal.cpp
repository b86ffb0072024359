#include "pit/parareal.hpp"

#include "pit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pit {

void PppcConfig::validate() const {
  if (!(outer_tol > 0.0) || !(inner_tol > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "tolerances must be positive");
  }
  if (inner_max_iter < 1) throw SolverError(ErrorKind::InvalidArgument, "inner_max_iter >= 1");
  if (!(tikhonov > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "tikhonov must be > 0");
  if (period_known && !(*period_known > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "known period must be > 0");
  }
}

std::uint64_t OuterSweep::max_window_units() const {
  std::uint64_t m = 0;
  for (const auto& c : window_counts) m = std::max(m, c.cost_units);
  return m;
}

OuterSweep outer_sweep(const ShootingState& state, const TimeGrid& grid, const OdeSystem& system,
                       const PropagatorConfig& cfg, bool with_period, WorkerPool* pool) {
  state.validate(system.dim());
  const std::size_t n = grid.windows();
  if (state.windows() != n) {
    throw SolverError(ErrorKind::InvalidArgument, "state and grid disagree on window count");
  }
  OuterSweep out;
  out.fine_end.resize(n);
  out.coarse_end.resize(n);
  out.sensitivity.resize(n);
  out.b.resize(n);
  out.window_counts.resize(n);
  const double period = state.period;

  auto task = [&](std::size_t w) {
    SolveStats local(system.dim());
    const double ta = grid.node(w);
    const double tb = grid.node(w + 1);
    const Vector& u = state.initial_values[w];
    try {
      out.fine_end[w] = fine_propagate(system, period, ta, tb, u, cfg, &local);
      out.coarse_end[w] = coarse_propagate(system, period, ta, tb, u, cfg, &local);
      out.sensitivity[w] = with_period
                               ? period_sensitivity(system, tb - ta, out.fine_end[w], &local)
                               : Vector::Zero(u.size());
    } catch (const SolverError& e) {
      throw e.with_window(w);
    }
    out.b[w] = out.sensitivity[w] * period + out.coarse_end[w] - out.fine_end[w];
    out.window_counts[w] = local.snapshot();
  };
  if (pool) {
    pool->parallel_for(n, task);
  } else {
    for (std::size_t w = 0; w < n; ++w) task(w);
  }
  return out;
}

std::vector<Vector> assemble_rhs_b(const ShootingState& state, const TimeGrid& grid,
                                   const OdeSystem& system, const PropagatorConfig& cfg,
                                   WorkerPool* pool, SolveStats* stats) {
  if (!grid.equidistant()) {
    throw SolverError(ErrorKind::InvalidArgument, "periodic Parareal needs an equidistant grid");
  }
  OuterSweep sweep = outer_sweep(state, grid, system, cfg, true, pool);
  if (stats) {
    for (const auto& c : sweep.window_counts) stats->merge(c);
  }
  return std::move(sweep.b);
}

std::vector<Vector> assemble_rhs_h(const std::vector<Vector>& b,
                                   const std::vector<Vector>& inner_values, const TimeGrid& grid,
                                   const OdeSystem& system, const LinearSurrogate& surrogate,
                                   double period, const PropagatorConfig& cfg,
                                   SolveStats* stats) {
  if (!grid.equidistant()) {
    throw SolverError(ErrorKind::InvalidArgument, "closed-form coarse step needs an equidistant grid");
  }
  const std::size_t n = grid.windows();
  if (b.size() != n || inner_values.size() != n) {
    throw SolverError(ErrorKind::InvalidArgument, "assemble_rhs_h: window count mismatch");
  }
  std::vector<Vector> h(n);
  for (std::size_t w = 0; w < n; ++w) {
    const double ta = grid.node(w);
    const double tb = grid.node(w + 1);
    try {
      const Vector linear =
          linear_coarse_step(surrogate, system.mass(), period, tb - ta, inner_values[w], stats);
      const Vector nonlinear =
          coarse_propagate(system, period, ta, tb, inner_values[w], cfg, stats);
      h[w] = b[w] + linear - nonlinear;
    } catch (const SolverError& e) {
      throw e.with_window(w);
    }
  }
  return h;
}

BlockSystem assemble_block_system(const Matrix& mass, const LinearSurrogate& surrogate,
                                  double dtau, double period,
                                  const std::vector<Vector>& sensitivity,
                                  const std::vector<Vector>& h) {
  const std::size_t n = h.size();
  const auto d = mass.rows();
  const bool known = sensitivity.empty();
  if (!known && sensitivity.size() != n) {
    throw SolverError(ErrorKind::InvalidArgument, "sensitivity/h window count mismatch");
  }
  surrogate.validate(static_cast<std::size_t>(d));

  const Matrix c = mass / dtau;
  const Matrix q = c - period * surrogate.a;
  const Eigen::Index rows = static_cast<Eigen::Index>(n) * d;

  BlockSystem bs;
  bs.windows = n;
  bs.dim = static_cast<std::size_t>(d);
  bs.period_known = known;
  bs.matrix = Matrix::Zero(rows, known ? rows : rows + 1);
  bs.rhs.resize(rows);
  for (std::size_t w = 0; w < n; ++w) {
    const auto r = static_cast<Eigen::Index>((w + 1) % n) * d;
    const auto start = static_cast<Eigen::Index>(w) * d;
    bs.matrix.block(r, start, d, d) += c;
    bs.matrix.block(r, r, d, d) -= q;
    if (!known) bs.matrix.block(r, rows, d, 1) = q * sensitivity[w];
    bs.rhs.segment(r, d) = q * h[w] - period * surrogate.c;
  }
  return bs;
}

BlockSolution solve_block_system(const BlockSystem& bs, const ShootingState& reference,
                                 SolveStats* stats, const Tolerances& tol, double tikhonov) {
  const std::size_t n = bs.windows;
  const std::size_t d = bs.dim;
  if (reference.windows() != n) {
    throw SolverError(ErrorKind::InvalidArgument, "reference has wrong window count");
  }
  BlockSolution out;
  if (bs.period_known) {
    const Vector x = solve_square(bs.matrix, bs.rhs, stats, tol);
    out.values.reserve(n);
    for (std::size_t w = 0; w < n; ++w) {
      out.values.push_back(x.segment(static_cast<Eigen::Index>(w * d), static_cast<Eigen::Index>(d)));
    }
    out.period = reference.period;
    return out;
  }

  const Vector x_ref = reference.stacked();
  const Vector residual = bs.rhs - bs.matrix * x_ref;
  Vector correction;
  try {
    correction = solve_min_norm(bs.matrix, residual, stats, tol);
  } catch (const SolverError& e) {
    if (e.kind() != ErrorKind::RankDeficient) throw;
    correction = solve_min_norm_regularized(bs.matrix, residual, tikhonov, stats);
    out.regularized = true;
  }
  const ShootingState s = ShootingState::from_stacked(x_ref + correction, n, d);
  out.values = s.initial_values;
  out.period = s.period;
  return out;
}

namespace {

double stacked_norm(const std::vector<Vector>& v) {
  double s = 0.0;
  for (const auto& x : v) s += x.squaredNorm();
  return std::sqrt(s);
}

double stacked_diff_norm(const std::vector<Vector>& a, const std::vector<Vector>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]).squaredNorm();
  return std::sqrt(s);
}

SolveResult run_pppc(const ShootingState& z0, const TimeGrid& grid, const OdeSystem& system,
                     const LinearSurrogate& surrogate, const PropagatorConfig& cfg,
                     const PppcConfig& pcfg, WorkerPool* pool) {
  cfg.validate();
  pcfg.validate();
  z0.validate(system.dim());
  surrogate.validate(system.dim());
  if (!grid.equidistant()) {
    throw SolverError(ErrorKind::InvalidArgument, "periodic Parareal needs an equidistant grid");
  }
  if (z0.windows() != grid.windows()) {
    throw SolverError(ErrorKind::InvalidArgument, "state and grid disagree on window count");
  }

  const bool known = pcfg.period_known.has_value();
  const std::size_t n = grid.windows();
  const std::size_t d = system.dim();
  const double dtau = grid.window_length(0);

  SolveResult result;
  ConvergenceRecord& rec = result.record;

  ShootingState cur = z0;
  if (known) cur.period = *pcfg.period_known;
  ShootingState best = cur;
  double best_rel = std::numeric_limits<double>::infinity();

  for (std::size_t k = 0;; ++k) {
    const OuterSweep sweep = outer_sweep(cur, grid, system, cfg, !known, pool);
    for (const auto& c : sweep.window_counts) rec.total += c;
    const ShootingResidual phi = residual_from_endpoints(sweep.fine_end, cur);
    double rel = relative_jump_norm(phi.blocks, cur);
    rec.outer_iterations = k;
    if (rel < best_rel) {
      best_rel = rel;
      best = cur;
    }

    IterationRecord head;
    head.k = k;
    head.s = 0;
    head.period = cur.period;
    head.period_candidate = cur.period;
    head.jump_norm_rel = rel;
    head.max_block_norm = phi.max_block_norm();
    head.fine_units = sweep.max_window_units();

    if (rel <= pcfg.outer_tol || k == pcfg.outer_max_iter) {
      rec.rows.push_back(head);
      result.status = rel <= pcfg.outer_tol ? SolveStatus::Converged : SolveStatus::MaxIterExceeded;
      if (result.status == SolveStatus::MaxIterExceeded) {
        cur = best;
        rel = best_rel;
      }
      result.jump_norm_rel = rel;
      break;
    }

    // Inner fixed-point iteration on the linear surrogate, T^(k) frozen.
    std::vector<Vector> inner = cur.initial_values;
    double candidate = cur.period;
    const std::vector<Vector> no_sensitivity;
    for (std::size_t s = 0; s < pcfg.inner_max_iter; ++s) {
      IterationRecord row = s == 0 ? head : IterationRecord{};
      row.k = k;
      row.s = s;
      row.period = cur.period;
      row.jump_norm_rel = rel;
      row.max_block_norm = head.max_block_norm;

      SolveStats coarse_stats(d);
      std::vector<Vector> h;
      if (s == 0) {
        // G(U^(k)) is already known from the sweep.
        h.resize(n);
        for (std::size_t w = 0; w < n; ++w) {
          const Vector linear = linear_coarse_step(surrogate, system.mass(), cur.period, dtau,
                                                   inner[w], &coarse_stats);
          h[w] = sweep.b[w] + linear - sweep.coarse_end[w];
        }
      } else {
        h = assemble_rhs_h(sweep.b, inner, grid, system, surrogate, cur.period, cfg,
                           &coarse_stats);
      }
      const SolveCounts coarse_used = coarse_stats.snapshot();
      row.coarse_units = coarse_used.cost_units;
      rec.total += coarse_used;

      const BlockSystem bs = assemble_block_system(system.mass(), surrogate, dtau, cur.period,
                                                   known ? no_sensitivity : sweep.sensitivity, h);
      SolveStats block_stats(d);
      ShootingState reference{inner, candidate};
      const BlockSolution sol =
          solve_block_system(bs, reference, &block_stats, pcfg.linear, pcfg.tikhonov);
      const SolveCounts block_used = block_stats.snapshot();
      row.block_units = block_used.cost_units;
      rec.total += block_used;
      if (sol.regularized) row.note = "tikhonov";

      const double base = stacked_norm(inner);
      const double change = stacked_diff_norm(sol.values, inner) / (base > 0.0 ? base : 1.0);
      row.inner_change_rel = change;
      row.period_candidate = sol.period;
      inner = sol.values;
      candidate = sol.period;
      ++rec.inner_iterations;

      const bool last = change <= pcfg.inner_tol || s + 1 == pcfg.inner_max_iter;
      if (last) {
        double next_period = known ? cur.period : candidate;
        if (!(next_period > 0.0)) {
          next_period = cur.period / 2.0;
          row.note += row.note.empty() ? "period-clamped" : ";period-clamped";
        }
        row.period_change_rel = std::abs(next_period - cur.period) / cur.period;
        rec.rows.push_back(row);
        cur.initial_values = std::move(inner);
        cur.period = next_period;
        break;
      }
      rec.rows.push_back(row);
    }
  }

  rec.linear_solves = rec.total.factorizations;
  result.state = cur;
  return result;
}

}  // namespace

SolveResult pppc_up_solve(const ShootingState& z0, const TimeGrid& grid, const OdeSystem& system,
                          const LinearSurrogate& surrogate, const PropagatorConfig& cfg,
                          const PppcConfig& pcfg, WorkerPool* pool) {
  PppcConfig unknown = pcfg;
  unknown.period_known.reset();
  return run_pppc(z0, grid, system, surrogate, cfg, unknown, pool);
}

SolveResult pppc_known_T_solve(const ShootingState& z0, double period, const TimeGrid& grid,
                               const OdeSystem& system, const LinearSurrogate& surrogate,
                               const PropagatorConfig& cfg, const PppcConfig& pcfg,
                               WorkerPool* pool) {
  PppcConfig fixed = pcfg;
  fixed.period_known = period;
  return run_pppc(z0, grid, system, surrogate, cfg, fixed, pool);
}

}  // namespace pit
