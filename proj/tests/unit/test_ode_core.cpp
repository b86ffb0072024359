#include <pit/errors.hpp>
#include <pit/problems.hpp>

#include <gtest/gtest.h>

#include <random>
#include <thread>
#include <vector>

#include "test_systems.hpp"

namespace pit {
namespace {

using testing::random_vector;

Vector colpitts_u0() {
  Vector u(4);
  u << 9.75, 1.0, 1.0, 1.0;
  return u;
}

TEST(Colpitts, MassEntry) {
  const Matrix m = colpitts_mass(ColpittsParams{});
  EXPECT_DOUBLE_EQ(m(1, 1), 50.05e-9);
  EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
}

TEST(Colpitts, MassCapacitanceBlockSymmetricAndNonsingular) {
  const Matrix m = colpitts_mass(ColpittsParams{});
  const Matrix block = m.bottomRightCorner(3, 3);
  EXPECT_EQ(block, block.transpose());
  EXPECT_NO_THROW(solve_square(m, Vector::Ones(4)));
}

TEST(Colpitts, InductorRowVanishesForEqualVoltages) {
  const OdeSystem sys = colpitts_system();
  Vector u(4);
  u << 10, 10, 0, 0;
  EXPECT_EQ(sys.rhs(u)(0), 0.0);
}

TEST(Colpitts, RhsAtInitialStateMatchesScriptedEvaluation) {
  // Independent float64 evaluation of the model equations.
  Vector expected(4);
  expected << -2.625000000000000e+03, 8.333333333333333e-02, -6.666666666666666e-04,
      6.280487804878049e-04;
  const Vector f = colpitts_system().rhs(colpitts_u0());
  for (Eigen::Index i = 0; i < 4; ++i) {
    EXPECT_NEAR(f(i), expected(i), 1e-12 * std::abs(expected(i))) << i;
  }
}

TEST(Colpitts, SurrogateMatricesAsPrinted) {
  const LinearSurrogate s = colpitts_surrogate();
  EXPECT_DOUBLE_EQ(s.a(0, 0), -300.0);
  EXPECT_DOUBLE_EQ(s.a(0, 1), 300.0);
  EXPECT_DOUBLE_EQ(s.c(0), 0.0);
  EXPECT_DOUBLE_EQ(s.c(1), 10.0 / 3.0);
  EXPECT_DOUBLE_EQ(s.c(2), 0.0);
  EXPECT_DOUBLE_EQ(s.c(3), 10.0 / 12000.0);
}

TEST(Colpitts, SurrogateRowSumsMatchScriptedEvaluation) {
  Vector expected(4);
  expected << 0.0, -3.3333333333333337e-01, -6.6666666666666708e-04, -2.0528455284552844e-04;
  const Vector sums = colpitts_surrogate().a.rowwise().sum();
  EXPECT_NEAR(sums(0), 0.0, 1e-12);
  for (Eigen::Index i = 1; i < 4; ++i) {
    EXPECT_NEAR(sums(i), expected(i), 1e-9 * std::abs(expected(i))) << i;
  }
}

TEST(Colpitts, SurrogateConstantHasZerosForAnyParameters) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    ColpittsParams p;
    p.r1 *= scale(rng);
    p.r2 *= scale(rng);
    p.u_op *= scale(rng);
    p.l *= scale(rng);
    const LinearSurrogate s = colpitts_surrogate(p);
    EXPECT_EQ(s.c(0), 0.0);
    EXPECT_EQ(s.c(2), 0.0);
  }
}

TEST(Colpitts, SurrogateIsJacobianOfLinearizedCurrentModel) {
  // Colpitts RHS with h(x) replaced by x / U_T_surrogate; linear, so the
  // central difference is exact up to rounding.
  const ColpittsParams p;
  const double ut = p.u_t_surrogate;
  auto h = [ut](double x) { return x / ut; };
  auto f = [&](const Vector& u) {
    const double hc = h(u(3) - u(1));
    const double he = h(u(3) - u(2));
    Vector r(4);
    r << (u(1) - u(0)) * p.r2 / p.l, (p.u_op - u(0)) / p.r2 + p.x_c * hc - p.i_s * he,
        -u(2) / p.r4 + p.x_e * he - p.i_s * hc,
        -u(3) / p.r3 + (p.u_op - u(3)) / p.r1 - p.y_e * he - p.y_c * hc;
    return r;
  };
  const LinearSurrogate s = colpitts_surrogate(p);
  const Matrix j = fd_jacobian(f, colpitts_u0(), 1e-3);
  for (Eigen::Index r = 0; r < 4; ++r) {
    for (Eigen::Index c = 0; c < 4; ++c) {
      EXPECT_NEAR(s.a(r, c), j(r, c), 1e-9 * (1.0 + std::abs(j(r, c)))) << r << "," << c;
    }
  }
  // c is the constant part: f(0) with the linear currents.
  EXPECT_LE((s.c - f(Vector::Zero(4))).norm(), 1e-15);
}

TEST(Colpitts, ClampedExponentIsFiniteAndCounted) {
  const OdeSystem sys = colpitts_system();
  Vector u(4);
  u << 0, 0, 0, 1e4;
  const std::uint64_t before = sys.clamped_evaluations();
  EXPECT_TRUE(all_finite(sys.rhs(u)));
  EXPECT_TRUE(all_finite(sys.rhs_jacobian(u)));
  EXPECT_GT(sys.clamped_evaluations(), before);
}

TEST(Colpitts, InvalidParamsRejected) {
  ColpittsParams p;
  p.l = 0.0;
  EXPECT_THROW(colpitts_system(p), SolverError);
}

void expect_jacobian_matches_fd(const OdeSystem& sys, std::mt19937_64& rng, double lo, double hi) {
  for (int trial = 0; trial < 100; ++trial) {
    const Vector u = random_vector(rng, static_cast<Eigen::Index>(sys.dim()), lo, hi);
    const Matrix analytic = sys.rhs_jacobian(u);
    const Matrix fd = fd_jacobian([&](const Vector& x) { return sys.rhs(x); }, u);
    for (Eigen::Index r = 0; r < analytic.rows(); ++r) {
      const double scale = analytic.row(r).cwiseAbs().maxCoeff();
      for (Eigen::Index c = 0; c < analytic.cols(); ++c) {
        EXPECT_LE(std::abs(analytic(r, c) - fd(r, c)), 1e-5 * (scale > 0.0 ? scale : 1.0))
            << sys.name() << " trial " << trial << " entry " << r << "," << c;
      }
    }
  }
}

TEST(Jacobians, AnalyticMatchesCentralDifferences) {
  std::mt19937_64 rng(99);
  expect_jacobian_matches_fd(colpitts_system(), rng, -2.0, 12.0);
  expect_jacobian_matches_fd(vanderpol_system(1.0), rng, -3.0, 3.0);
  expect_jacobian_matches_fd(harmonic_system(2.0), rng, -3.0, 3.0);
}

TEST(Jacobians, ColpittsAtInitialState) {
  const OdeSystem sys = colpitts_system();
  const Matrix fd = fd_jacobian([&](const Vector& x) { return sys.rhs(x); }, colpitts_u0());
  const Matrix analytic = sys.rhs_jacobian(colpitts_u0());
  EXPECT_LE((fd - analytic).norm(), 1e-5 * analytic.norm());
}

TEST(VanDerPol, Equilibrium) {
  EXPECT_EQ(vanderpol_system(1.0).rhs(Vector::Zero(2)), Vector::Zero(2));
}

TEST(VanDerPol, RhsAtOneOne) {
  const Vector f = vanderpol_system(1.0).rhs(Vector::Ones(2));
  EXPECT_DOUBLE_EQ(f(0), 1.0);
  EXPECT_DOUBLE_EQ(f(1), -1.0);
}

TEST(VanDerPol, SurrogateIsJacobianAtOrigin) {
  const LinearSurrogate s = vanderpol_surrogate(1.5);
  EXPECT_EQ(s.a, vanderpol_system(1.5).rhs_jacobian(Vector::Zero(2)));
  EXPECT_EQ(s.c, Vector::Zero(2));
}

TEST(VanDerPol, NonPositiveMuRejected) {
  EXPECT_THROW(vanderpol_system(0.0), SolverError);
  EXPECT_THROW(vanderpol_system(-1.0), SolverError);
}

TEST(OdeSystem, SingularMassRejected) {
  try {
    OdeSystem("bad", Matrix::Zero(2, 2), [](const Vector& u) { return u; });
    FAIL() << "expected SingularMatrix";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingularMatrix);
  }
}

TEST(OdeSystem, NonSquareMassRejected) {
  try {
    OdeSystem("bad", Matrix::Identity(2, 3), [](const Vector& u) { return u; });
    FAIL() << "expected InvalidArgument";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
  }
}

TEST(OdeSystem, FiniteDifferenceFallback) {
  const OdeSystem sys("quad", Matrix::Identity(1, 1),
                      [](const Vector& u) { return Vector::Constant(1, u(0) * u(0)); });
  EXPECT_FALSE(sys.has_analytic_jacobian());
  EXPECT_NEAR(sys.rhs_jacobian(Vector::Constant(1, 3.0))(0, 0), 6.0, 1e-8);
}

TEST(OdeSystem, SolveMassCountsOneUnit) {
  const OdeSystem sys = colpitts_system();
  SolveStats stats(4);
  const Vector x = sys.solve_mass(Vector::Ones(4), &stats);
  EXPECT_LE((sys.mass() * x - Vector::Ones(4)).norm(), 1e-9);
  EXPECT_EQ(stats.snapshot().cost_units, 1u);
}

TEST(OdeSystem, ConcurrentEvaluationIsPure) {
  const OdeSystem sys = colpitts_system();
  const Vector u = colpitts_u0();
  const Vector expected = sys.rhs(u);
  std::vector<Vector> results(8);
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 0; t < results.size(); ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 200; ++i) results[t] = sys.rhs(u);
      });
    }
  }
  for (const auto& r : results) EXPECT_EQ(r, expected);
}

TEST(LinearSurrogate, ValidateDimensions) {
  LinearSurrogate s{Matrix::Zero(2, 2), Vector::Zero(3)};
  EXPECT_THROW(s.validate(2), SolverError);
  s.c = Vector::Zero(2);
  EXPECT_NO_THROW(s.validate(2));
}

TEST(LinearSystem, RhsIsAffine) {
  const LinearSurrogate s = colpitts_surrogate();
  const OdeSystem sys = linear_system(colpitts_mass(ColpittsParams{}), s);
  const Vector u = colpitts_u0();
  EXPECT_LE((sys.rhs(u) - (s.a * u + s.c)).norm(), 1e-15 * (s.a * u).norm());
  EXPECT_EQ(sys.rhs_jacobian(u), s.a);
}

}  // namespace
}  // namespace pit
