#pragma once

#include "pit/dense.hpp"
#include "pit/ode_system.hpp"

#include <cstddef>
#include <functional>

namespace pit {

/// Step counts and stage-Newton settings for the window integrators.
struct PropagatorConfig {
  /// Fine steps per window (delta_tau = window_length / fine_steps_per_window).
  std::size_t fine_steps_per_window = 1000;
  std::size_t coarse_steps_per_window = 1;
  /// Stage residual tolerance, measured row-wise in state units.
  double newton_tol = 1e-10;
  std::size_t newton_max_iter = 25;
  /// theta-scheme weight; 1 is implicit Euler, the supported default.
  double theta = 1.0;

  /// Throws SolverError(InvalidArgument) unless
  /// fine_steps_per_window >= coarse_steps_per_window >= 1.
  void validate() const;
};

/// Integrates M u' = T f(u) from tau_a to tau_b with `steps` uniform
/// theta-scheme steps, solving each stage by Newton from the previous state.
/// With T = 1 and physical times this is plain time stepping.
/// Throws NewtonDiverged (message carries the step index) or NonFinite.
Vector propagate(const OdeSystem& system, double period, double tau_a, double tau_b,
                 const Vector& u, std::size_t steps, const PropagatorConfig& cfg,
                 SolveStats* stats = nullptr);

/// Fine propagator F(tau_b, tau_a, U, T).
Vector fine_propagate(const OdeSystem& system, double period, double tau_a, double tau_b,
                      const Vector& u, const PropagatorConfig& cfg, SolveStats* stats = nullptr);

/// Nonlinear coarse propagator G(tau_b, tau_a, U, T).
Vector coarse_propagate(const OdeSystem& system, double period, double tau_a, double tau_b,
                        const Vector& u, const PropagatorConfig& cfg,
                        SolveStats* stats = nullptr);

/// One implicit Euler step of M u' = T (A u + c) over a window of length
/// dtau in closed form: [M/dtau - T A] G = M U / dtau + T c.
/// Throws SingularMatrix when M/dtau - T A is singular.
Vector linear_coarse_step(const LinearSurrogate& surrogate, const Matrix& mass, double period,
                          double dtau, const Vector& u, SolveStats* stats = nullptr);

/// Period sensitivity of the fine propagator approximated by the right
/// rectangle rule: g = M^-1 dtau f(U_end), U_end the fine window endpoint.
Vector period_sensitivity(const OdeSystem& system, double dtau, const Vector& u_end,
                          SolveStats* stats = nullptr);

/// Called after each accepted step with (step index, time, state, cumulative
/// cost units of this integration).
using StepObserver = std::function<void(std::size_t, double, const Vector&, std::uint64_t)>;

/// Physical-time integration over `steps` steps of size dt, reporting every
/// state to `observer` (step 0 is the initial state).
Vector integrate(const OdeSystem& system, double t0, double dt, std::size_t steps,
                 const Vector& u0, const PropagatorConfig& cfg, const StepObserver& observer,
                 SolveStats* stats = nullptr);

}  // namespace pit
