#pragma once

#include "pit/convergence.hpp"
#include "pit/ode_system.hpp"
#include "pit/propagators.hpp"
#include "pit/time_grid.hpp"
#include "pit/worker_pool.hpp"

#include <vector>

namespace pit {

/// Matching-condition residual Phi(z). Block 0 is the periodicity jump
/// F(tau_N, tau_{N-1}, U_{N-1}, T) - U_0; block n (1 <= n < N) is
/// F(tau_n, tau_{n-1}, U_{n-1}, T) - U_n.
struct ShootingResidual {
  std::vector<Vector> blocks;

  Vector stacked() const;
  double norm() const;
  double max_block_norm() const;
};

/// Fine endpoints of every window, evaluated window-parallel.
struct FineSweep {
  /// endpoints[w] = F(tau_{w+1}, tau_w, U_w, T).
  std::vector<Vector> endpoints;
  /// Solve counts of each window task.
  std::vector<SolveCounts> window_counts;

  /// Largest per-window cost (the parallel cost of the sweep).
  std::uint64_t max_window_units() const;
  SolveCounts total() const;
};

FineSweep fine_sweep(const ShootingState& state, const TimeGrid& grid, const OdeSystem& system,
                     const PropagatorConfig& cfg, WorkerPool* pool = nullptr);

ShootingResidual residual_from_endpoints(const std::vector<Vector>& endpoints,
                                         const ShootingState& state);

/// Phi(z) with the fine propagator. Propagator errors carry the window index.
ShootingResidual residual_phi(const ShootingState& state, const TimeGrid& grid,
                              const OdeSystem& system, const PropagatorConfig& cfg,
                              WorkerPool* pool = nullptr, SolveStats* stats = nullptr);

enum class JacobianMode {
  /// G_n and g_n by forward differences of the fine propagator.
  FdFine,
  /// G_n by forward differences of the coarse propagator, g_n from the
  /// period-sensitivity quadrature at the fine endpoint.
  CoarseParareal,
};

/// Forward-difference step for state components.
inline constexpr double kJacobianFdStep = 1e-6;

struct JacobianResult {
  Matrix matrix;
  std::vector<SolveCounts> window_counts;
};

/// Bordered Nd x (Nd+1) Jacobian of Phi. Row block j belongs to the window
/// ending at node j (mod N): G at column block of its start value, -I at
/// column block j, g in the last column. `fine_endpoints` (from a sweep at
/// the same state) avoids recomputing the unperturbed fine solutions.
JacobianResult jacobian_phi_with_costs(const ShootingState& state, const TimeGrid& grid,
                                       const OdeSystem& system, const PropagatorConfig& cfg,
                                       JacobianMode mode, WorkerPool* pool = nullptr,
                                       const std::vector<Vector>* fine_endpoints = nullptr);

Matrix jacobian_phi(const ShootingState& state, const TimeGrid& grid, const OdeSystem& system,
                    const PropagatorConfig& cfg, JacobianMode mode, WorkerPool* pool = nullptr,
                    SolveStats* stats = nullptr);

struct NewtonOptions {
  /// Stop when ||Phi||_2 / ||z_U||_2 <= tol.
  double tol = 1e-3;
  std::size_t max_iter = 50;
  JacobianMode mode = JacobianMode::FdFine;
  /// Halve the step on residual increase (at most max_halvings times).
  bool damping = true;
  std::size_t max_halvings = 8;
  Tolerances linear;
};

/// Underdetermined Newton iteration z <- z + lambda * J^+ (-Phi(z)).
/// A non-positive period after a step is replaced by half the previous one.
/// Returns the best iterate with status MaxIterExceeded when the tolerance
/// is not reached. Throws RankDeficient from the min-norm solve.
SolveResult newton_solve(const ShootingState& z0, const TimeGrid& grid, const OdeSystem& system,
                         const PropagatorConfig& cfg, const NewtonOptions& opts,
                         WorkerPool* pool = nullptr);

/// Initial iterate from one sequential coarse sweep: U_0 = u0,
/// U_n = G(tau_n, tau_{n-1}, U_{n-1}, T0).
ShootingState coarse_initial_state(const OdeSystem& system, const TimeGrid& grid,
                                   const Vector& u0, double period0, const PropagatorConfig& cfg,
                                   SolveStats* stats = nullptr);

/// Initial iterate seeded from a transient: fine implicit Euler steps of
/// size T0 * delta_tau from u0 over `transient` physical time, then one
/// sequential fine sweep at T0 whose window start values give U_0..U_{N-1}.
ShootingState transient_initial_state(const OdeSystem& system, const TimeGrid& grid,
                                      const Vector& u0, double period0, double transient,
                                      const PropagatorConfig& cfg, SolveStats* stats = nullptr);

}  // namespace pit
