#pragma once

#include "pit/convergence.hpp"
#include "pit/ode_system.hpp"
#include "pit/propagators.hpp"
#include "pit/shooting.hpp"
#include "pit/time_grid.hpp"
#include "pit/worker_pool.hpp"

#include <optional>
#include <vector>

namespace pit {

/// Settings of the periodic Parareal iteration with periodic coarse problem.
struct PppcConfig {
  /// Relative jump-norm tolerance of the outer iteration.
  double outer_tol = 1e-3;
  std::size_t outer_max_iter = 100;
  /// Inner fixed-point stagnation tolerance ||U^(s+1) - U^(s)|| / ||U^(s)||.
  double inner_tol = 1e-6;
  std::size_t inner_max_iter = 50;
  /// When set, the period is frozen at this value and the bordered column
  /// is dropped (known-period baseline).
  std::optional<double> period_known;
  /// Relative Tikhonov weight used when the bordered system is rank deficient.
  double tikhonov = 1e-10;
  Tolerances linear;

  void validate() const;
};

/// Window-parallel part of one outer iteration at (U^(k), T^(k)).
/// All vectors are indexed by window w = 0..N-1 (window w starts at U_w).
struct OuterSweep {
  std::vector<Vector> fine_end;    ///< F(tau_{w+1}, tau_w, U_w, T)
  std::vector<Vector> coarse_end;  ///< G(tau_{w+1}, tau_w, U_w, T)
  std::vector<Vector> sensitivity; ///< g_w (zero vectors when the period is known)
  std::vector<Vector> b;           ///< g_w T + G - F
  std::vector<SolveCounts> window_counts;

  std::uint64_t max_window_units() const;
};

OuterSweep outer_sweep(const ShootingState& state, const TimeGrid& grid, const OdeSystem& system,
                       const PropagatorConfig& cfg, bool with_period, WorkerPool* pool = nullptr);

/// b_w = g_w T + G(U_w) - F(U_w) for every window.
std::vector<Vector> assemble_rhs_b(const ShootingState& state, const TimeGrid& grid,
                                   const OdeSystem& system, const PropagatorConfig& cfg,
                                   WorkerPool* pool = nullptr, SolveStats* stats = nullptr);

/// h_w = b_w + Gbar(U_w) - G(U_w) at the inner iterate U, both coarse maps
/// taken at `period`. Requires an equidistant grid.
std::vector<Vector> assemble_rhs_h(const std::vector<Vector>& b,
                                   const std::vector<Vector>& inner_values, const TimeGrid& grid,
                                   const OdeSystem& system, const LinearSurrogate& surrogate,
                                   double period, const PropagatorConfig& cfg,
                                   SolveStats* stats = nullptr);

/// Linear block system of one inner step. Row block j belongs to the
/// window ending at node j (mod N):
///   C U_{j-1} - Q U_j + Q g T = Q h - T c,   C = M/dtau,  Q = C - T A,
/// with the last column present only when the period is unknown.
struct BlockSystem {
  Matrix matrix;
  Vector rhs;
  std::size_t windows = 0;
  std::size_t dim = 0;
  bool period_known = false;
};

/// `sensitivity` empty selects the known-period (square) system.
BlockSystem assemble_block_system(const Matrix& mass, const LinearSurrogate& surrogate,
                                  double dtau, double period,
                                  const std::vector<Vector>& sensitivity,
                                  const std::vector<Vector>& h);

struct BlockSolution {
  std::vector<Vector> values;
  double period = 0.0;
  bool regularized = false;
};

/// Solves a block system. Unknown period: the minimum-norm correction
/// relative to `reference` (x = x_ref + B^+ (rhs - B x_ref)); a zero
/// reference gives the plain minimum-norm solution. Known period: direct
/// square solve, period taken from `reference`. Falls back to a Tikhonov
/// solve when the bordered matrix is rank deficient.
BlockSolution solve_block_system(const BlockSystem& bs, const ShootingState& reference,
                                 SolveStats* stats = nullptr, const Tolerances& tol = {},
                                 double tikhonov = 1e-10);

/// Periodic Parareal with unknown period. Requires an equidistant grid.
SolveResult pppc_up_solve(const ShootingState& z0, const TimeGrid& grid, const OdeSystem& system,
                          const LinearSurrogate& surrogate, const PropagatorConfig& cfg,
                          const PppcConfig& pcfg, WorkerPool* pool = nullptr);

/// Known-period baseline: same iteration with T frozen at `period` and no
/// bordered column.
SolveResult pppc_known_T_solve(const ShootingState& z0, double period, const TimeGrid& grid,
                               const OdeSystem& system, const LinearSurrogate& surrogate,
                               const PropagatorConfig& cfg, const PppcConfig& pcfg,
                               WorkerPool* pool = nullptr);

}  // namespace pit
