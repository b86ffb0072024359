#include "pit/propagators.hpp"

#include "pit/errors.hpp"

#include <cmath>
#include <string>

namespace pit {

void PropagatorConfig::validate() const {
  if (coarse_steps_per_window < 1 || fine_steps_per_window < coarse_steps_per_window) {
    throw SolverError(ErrorKind::InvalidArgument,
                      "need fine_steps_per_window >= coarse_steps_per_window >= 1");
  }
  if (!(newton_tol > 0.0) || newton_max_iter < 1) {
    throw SolverError(ErrorKind::InvalidArgument, "invalid stage Newton settings");
  }
  if (!(theta > 0.0) || theta > 1.0) {
    throw SolverError(ErrorKind::InvalidArgument, "theta must lie in (0, 1]");
  }
}

namespace {

Vector row_scales(const Matrix& mass) {
  Vector s(mass.rows());
  for (Eigen::Index i = 0; i < mass.rows(); ++i) {
    const double r = mass.row(i).cwiseAbs().maxCoeff();
    s(i) = r > 0.0 ? 1.0 / r : 1.0;
  }
  return s;
}

// One theta-scheme step M (v - u) = hT [theta f(v) + (1 - theta) f(u)].
Vector stage_solve(const OdeSystem& system, const Vector& scale, double ht, const Vector& u,
                   const PropagatorConfig& cfg, std::size_t step, SolveStats* stats) {
  const Matrix& mass = system.mass();
  Vector explicit_part = Vector::Zero(u.size());
  if (cfg.theta < 1.0) explicit_part = (1.0 - cfg.theta) * ht * system.rhs(u);

  Vector v = u;
  for (std::size_t it = 0;; ++it) {
    const Vector r = mass * (v - u) - cfg.theta * ht * system.rhs(v) - explicit_part;
    if (!r.allFinite()) {
      throw SolverError(ErrorKind::NonFinite, "stage residual at step " + std::to_string(step));
    }
    if (scale.cwiseProduct(r).lpNorm<Eigen::Infinity>() <= cfg.newton_tol) return v;
    if (it == cfg.newton_max_iter) {
      throw SolverError(ErrorKind::NewtonDiverged,
                        "stage Newton did not converge at step " + std::to_string(step));
    }
    const Matrix jac = mass - cfg.theta * ht * system.rhs_jacobian(v);
    v -= solve_square(jac, r, stats);
  }
}

}  // namespace

Vector propagate(const OdeSystem& system, double period, double tau_a, double tau_b,
                 const Vector& u, std::size_t steps, const PropagatorConfig& cfg,
                 SolveStats* stats) {
  if (!(period > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "period must be > 0");
  if (!(tau_b > tau_a)) throw SolverError(ErrorKind::InvalidArgument, "need tau_a < tau_b");
  if (steps == 0) throw SolverError(ErrorKind::InvalidArgument, "need at least one step");
  if (!u.allFinite()) throw SolverError(ErrorKind::NonFinite, "initial state not finite");

  const Vector scale = row_scales(system.mass());
  const double ht = (tau_b - tau_a) / static_cast<double>(steps) * period;
  Vector state = u;
  for (std::size_t i = 0; i < steps; ++i) {
    state = stage_solve(system, scale, ht, state, cfg, i, stats);
  }
  return state;
}

Vector fine_propagate(const OdeSystem& system, double period, double tau_a, double tau_b,
                      const Vector& u, const PropagatorConfig& cfg, SolveStats* stats) {
  return propagate(system, period, tau_a, tau_b, u, cfg.fine_steps_per_window, cfg, stats);
}

Vector coarse_propagate(const OdeSystem& system, double period, double tau_a, double tau_b,
                        const Vector& u, const PropagatorConfig& cfg, SolveStats* stats) {
  return propagate(system, period, tau_a, tau_b, u, cfg.coarse_steps_per_window, cfg, stats);
}

Vector linear_coarse_step(const LinearSurrogate& surrogate, const Matrix& mass, double period,
                          double dtau, const Vector& u, SolveStats* stats) {
  if (!(dtau > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "dtau must be > 0");
  const Matrix c = mass / dtau;
  const Matrix q = c - period * surrogate.a;
  const Vector rhs = c * u + period * surrogate.c;
  try {
    return solve_square(q, rhs, stats);
  } catch (const SolverError& e) {
    if (e.kind() != ErrorKind::SingularMatrix) throw;
    throw SolverError(ErrorKind::SingularMatrix,
                      "M/dtau - T A singular: dtau*T resonates with the surrogate spectrum");
  }
}

Vector period_sensitivity(const OdeSystem& system, double dtau, const Vector& u_end,
                          SolveStats* stats) {
  return system.solve_mass(dtau * system.rhs(u_end), stats);
}

Vector integrate(const OdeSystem& system, double t0, double dt, std::size_t steps,
                 const Vector& u0, const PropagatorConfig& cfg, const StepObserver& observer,
                 SolveStats* stats) {
  if (!(dt > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "dt must be > 0");
  const Vector scale = row_scales(system.mass());
  SolveStats local(system.dim());
  Vector state = u0;
  if (observer) observer(0, t0, state, 0);
  for (std::size_t i = 0; i < steps; ++i) {
    state = stage_solve(system, scale, dt, state, cfg, i, &local);
    if (observer) {
      observer(i + 1, t0 + static_cast<double>(i + 1) * dt, state, local.snapshot().cost_units);
    }
  }
  if (stats) stats->merge(local.snapshot());
  return state;
}

}  // namespace pit
