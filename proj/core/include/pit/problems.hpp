#pragma once

#include "pit/ode_system.hpp"

namespace pit {

/// Colpitts oscillator circuit constants (SI units: F, Ohm, H, V, A).
/// Defaults are the reference circuit with the enlarged thermal voltage.
struct ColpittsParams {
  double c1 = 50e-12;
  double c2 = 1e-9;
  double c3 = 50e-9;
  double c4 = 100e-9;
  double r1 = 12e3;
  double r2 = 3.0;
  double r3 = 8.2e3;
  double r4 = 1.5e3;
  double l = 10e-3;
  double u_op = 10.0;
  double y_e = 10e-6;
  double x_e = 1.01e-3;
  double i_s = 1e-3;
  double y_c = 20e-6;
  double x_c = 1.02e-3;
  double u_t = 2.585;
  /// Thermal voltage of the linear surrogate.
  double u_t_surrogate = 0.2585;

  /// Throws SolverError(InvalidArgument) unless capacitances, resistances,
  /// inductance and both thermal voltages are strictly positive.
  void validate() const;
};

/// Exponents x/U_T above this value are clamped before exp().
inline constexpr double kColpittsExpClamp = 200.0;

Matrix colpitts_mass(const ColpittsParams& p);

/// Four node-voltage Colpitts model with transistor characteristic
/// h(x) = exp(x/U_T) - 1 and analytic RHS Jacobian.
OdeSystem colpitts_system(const ColpittsParams& p = {});

/// Linear surrogate A u + c: the Colpitts RHS with h(x) replaced by
/// x / U_T_surrogate, differentiated exactly.
LinearSurrogate colpitts_surrogate(const ColpittsParams& p = {});

/// u1' = u2, u2' = mu (1 - u1^2) u2 - u1 with identity mass. Requires mu > 0.
OdeSystem vanderpol_system(double mu);

/// Jacobian of the Van der Pol RHS at the origin, c = 0.
LinearSurrogate vanderpol_surrogate(double mu);

/// u1' = u2, u2' = -omega^2 u1: analytic period 2 pi / omega.
OdeSystem harmonic_system(double omega);

}  // namespace pit
