#include "pit/problems.hpp"

#include "pit/errors.hpp"

#include <cmath>
#include <memory>

namespace pit {

void ColpittsParams::validate() const {
  for (double v : {c1, c2, c3, c4, r1, r2, r3, r4, l, u_t, u_t_surrogate}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw SolverError(ErrorKind::InvalidArgument,
                        "Colpitts capacitances, resistances, inductance and thermal "
                        "voltages must be strictly positive");
    }
  }
  for (double v : {u_op, y_e, x_e, i_s, y_c, x_c}) {
    if (!std::isfinite(v)) throw SolverError(ErrorKind::InvalidArgument, "non-finite parameter");
  }
}

Matrix colpitts_mass(const ColpittsParams& p) {
  Matrix m(4, 4);
  // clang-format off
  m << 1.0, 0.0,          0.0,                 0.0,
       0.0, p.c1 + p.c3,  -p.c3,               -p.c1,
       0.0, -p.c3,        p.c2 + p.c3 + p.c4,  -p.c2,
       0.0, -p.c1,        -p.c2,               p.c1 + p.c2;
  // clang-format on
  return m;
}

namespace {

struct Exp {
  double value;       // exp(x / U_T), possibly clamped
  double derivative;  // d/dx exp(x / U_T); zero when clamped
};

Exp clamped_exp(double x, double u_t, OdeDiagnostics& diag) {
  const double arg = x / u_t;
  if (arg > kColpittsExpClamp) {
    diag.clamped_evaluations.fetch_add(1, std::memory_order_relaxed);
    return {std::exp(kColpittsExpClamp), 0.0};
  }
  const double e = std::exp(arg);
  return {e, e / u_t};
}

}  // namespace

OdeSystem colpitts_system(const ColpittsParams& p) {
  p.validate();
  auto diag = std::make_shared<OdeDiagnostics>();
  auto rhs = [p, diag](const Vector& u) -> Vector {
    const Exp ec = clamped_exp(u(3) - u(1), p.u_t, *diag);  // collector junction
    const Exp ee = clamped_exp(u(3) - u(2), p.u_t, *diag);  // emitter junction
    const double hc = ec.value - 1.0;
    const double he = ee.value - 1.0;
    Vector f(4);
    f(0) = (u(1) - u(0)) * p.r2 / p.l;
    f(1) = (p.u_op - u(0)) / p.r2 + p.x_c * hc - p.i_s * he;
    f(2) = -u(2) / p.r4 + p.x_e * he - p.i_s * hc;
    f(3) = -u(3) / p.r3 + (p.u_op - u(3)) / p.r1 - p.y_e * he - p.y_c * hc;
    return f;
  };
  auto jac = [p, diag](const Vector& u) -> Matrix {
    const double a = clamped_exp(u(3) - u(1), p.u_t, *diag).derivative;
    const double b = clamped_exp(u(3) - u(2), p.u_t, *diag).derivative;
    Matrix j(4, 4);
    // clang-format off
    j << -p.r2 / p.l, p.r2 / p.l, 0.0,                      0.0,
         -1.0 / p.r2, -p.x_c * a, p.i_s * b,                p.x_c * a - p.i_s * b,
         0.0,         p.i_s * a,  -1.0 / p.r4 - p.x_e * b,  p.x_e * b - p.i_s * a,
         0.0,         p.y_c * a,  p.y_e * b,                -1.0 / p.r3 - 1.0 / p.r1 - p.y_e * b - p.y_c * a;
    // clang-format on
    return j;
  };
  return OdeSystem("colpitts", colpitts_mass(p), std::move(rhs), std::move(jac), diag);
}

LinearSurrogate colpitts_surrogate(const ColpittsParams& p) {
  p.validate();
  const double ut = p.u_t_surrogate;
  LinearSurrogate s;
  s.a.resize(4, 4);
  // clang-format off
  s.a << -p.r2 / p.l,  p.r2 / p.l,     0.0,                         0.0,
         -1.0 / p.r2,  -p.x_c / ut,    p.i_s / ut,                  (p.x_c - p.i_s) / ut,
         0.0,          p.i_s / ut,     -1.0 / p.r4 - p.x_e / ut,    (p.x_e - p.i_s) / ut,
         0.0,          p.y_c / ut,     p.y_e / ut,                  -1.0 / p.r3 - 1.0 / p.r1 - p.y_e / ut - p.y_c / ut;
  // clang-format on
  s.c.resize(4);
  s.c << 0.0, p.u_op / p.r2, 0.0, p.u_op / p.r1;
  return s;
}

OdeSystem vanderpol_system(double mu) {
  if (!(mu > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "Van der Pol mu must be > 0");
  auto rhs = [mu](const Vector& u) -> Vector {
    Vector f(2);
    f << u(1), mu * (1.0 - u(0) * u(0)) * u(1) - u(0);
    return f;
  };
  auto jac = [mu](const Vector& u) -> Matrix {
    Matrix j(2, 2);
    j << 0.0, 1.0, -2.0 * mu * u(0) * u(1) - 1.0, mu * (1.0 - u(0) * u(0));
    return j;
  };
  return OdeSystem("vanderpol", Matrix::Identity(2, 2), std::move(rhs), std::move(jac));
}

LinearSurrogate vanderpol_surrogate(double mu) {
  LinearSurrogate s;
  s.a.resize(2, 2);
  s.a << 0.0, 1.0, -1.0, mu;
  s.c = Vector::Zero(2);
  return s;
}

OdeSystem harmonic_system(double omega) {
  if (!(omega > 0.0)) throw SolverError(ErrorKind::InvalidArgument, "omega must be > 0");
  Matrix a(2, 2);
  a << 0.0, 1.0, -omega * omega, 0.0;
  return linear_system(Matrix::Identity(2, 2), LinearSurrogate{a, Vector::Zero(2)}, "harmonic");
}

}  // namespace pit
