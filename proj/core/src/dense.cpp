#include "pit/dense.hpp"

#include "pit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pit {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NewtonDiverged: return "NewtonDiverged";
    case ErrorKind::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorKind::NoOscillationDetected: return "NoOscillationDetected";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

SolverError::SolverError(ErrorKind kind, const std::string& what,
                         std::optional<std::size_t> window)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what +
                         (window ? " (window " + std::to_string(*window) + ")" : "")),
      kind_(kind),
      window_(window) {}

SolverError SolverError::with_window(std::size_t window) const {
  if (window_) return *this;
  // Strip the "<Kind>: " prefix added by the constructor.
  std::string msg = what();
  const std::string prefix = std::string(to_string(kind_)) + ": ";
  if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
  return SolverError(kind_, msg, window);
}

std::uint64_t cost_units_for(std::size_t m, std::size_t unit_dim) {
  if (unit_dim == 0 || m <= unit_dim) return 1;
  const double ratio = static_cast<double>(m) / static_cast<double>(unit_dim);
  // Guard against 27.000000000004 rounding up to 28.
  const double cubed = ratio * ratio * ratio;
  return static_cast<std::uint64_t>(std::ceil(cubed - 1e-9));
}

void SolveStats::record_solve(std::size_t m) {
  factorizations_.fetch_add(1, std::memory_order_relaxed);
  back_solves_.fetch_add(1, std::memory_order_relaxed);
  cost_units_.fetch_add(cost_units_for(m, unit_dim_), std::memory_order_relaxed);
}

void SolveStats::merge(const SolveCounts& c) {
  factorizations_.fetch_add(c.factorizations, std::memory_order_relaxed);
  back_solves_.fetch_add(c.back_solves, std::memory_order_relaxed);
  cost_units_.fetch_add(c.cost_units, std::memory_order_relaxed);
}

SolveCounts SolveStats::snapshot() const {
  return {factorizations_.load(std::memory_order_relaxed),
          back_solves_.load(std::memory_order_relaxed),
          cost_units_.load(std::memory_order_relaxed)};
}

double inf_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

bool all_finite(const Matrix& a) { return a.allFinite(); }
bool all_finite(const Vector& v) { return v.allFinite(); }

Vector solve_square(const Matrix& a, const Vector& b, SolveStats* stats,
                    const Tolerances& tol) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw SolverError(ErrorKind::InvalidArgument, "solve_square: dimension mismatch");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw SolverError(ErrorKind::NonFinite, "solve_square: non-finite input");
  }
  const double threshold = tol.pivot * inf_norm(a);
  Eigen::PartialPivLU<Matrix> lu(a);
  const auto& packed = lu.matrixLU();
  for (Eigen::Index i = 0; i < packed.rows(); ++i) {
    if (!(std::abs(packed(i, i)) > threshold)) {
      throw SolverError(ErrorKind::SingularMatrix,
                        "pivot " + std::to_string(i) + " below tolerance");
    }
  }
  Vector x = lu.solve(b);
  if (stats) stats->record_solve(static_cast<std::size_t>(a.rows()));
  return x;
}

Vector solve_min_norm(const Matrix& a, const Vector& b, SolveStats* stats,
                      const Tolerances& tol) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  if (m >= n || b.size() != m) {
    throw SolverError(ErrorKind::InvalidArgument,
                      "solve_min_norm: expects m < n and b of length m");
  }
  if (!a.allFinite() || !b.allFinite()) {
    throw SolverError(ErrorKind::NonFinite, "solve_min_norm: non-finite input");
  }
  // Row scaling leaves the solution set, and so the min-norm solution,
  // unchanged; it only improves the rank decision.
  Vector scale(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double r = a.row(i).cwiseAbs().maxCoeff();
    if (r == 0.0) {
      throw SolverError(ErrorKind::RankDeficient, "zero row " + std::to_string(i));
    }
    scale(i) = 1.0 / r;
  }
  const Matrix as = scale.asDiagonal() * a;
  const Vector bs = scale.cwiseProduct(b);

  // A^T P = Q R  =>  A = P R^T Q^T, x = Q [R^-T P^T b; 0].
  Eigen::ColPivHouseholderQR<Matrix> qr(as.transpose());
  const Matrix r = qr.matrixR().topLeftCorner(m, m).template triangularView<Eigen::Upper>();
  const double rmax = std::abs(r(0, 0));
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(std::abs(r(i, i)) > tol.rank * rmax)) {
      throw SolverError(ErrorKind::RankDeficient,
                        "numerical row rank " + std::to_string(i) + " < " + std::to_string(m));
    }
  }
  const Vector pb = qr.colsPermutation().transpose() * bs;
  Vector y = Vector::Zero(n);
  y.head(m) = r.transpose().template triangularView<Eigen::Lower>().solve(pb);
  Vector x = qr.householderQ() * y;
  if (stats) stats->record_solve(static_cast<std::size_t>(n));
  return x;
}

Vector solve_min_norm_regularized(const Matrix& a, const Vector& b, double rel_eps,
                                  SolveStats* stats) {
  Matrix normal = a * a.transpose();
  const double eps = rel_eps * std::max(inf_norm(normal), 1e-300);
  normal.diagonal().array() += eps;
  Eigen::LDLT<Matrix> ldlt(normal);
  Vector y = ldlt.solve(b);
  if (!y.allFinite()) {
    throw SolverError(ErrorKind::NonFinite, "regularized min-norm solve produced non-finite values");
  }
  if (stats) stats->record_solve(static_cast<std::size_t>(a.cols()));
  return a.transpose() * y;
}

Matrix fd_jacobian(const VectorFunction& f, const Vector& u, double rel_step) {
  const Vector f0 = f(u);
  if (!f0.allFinite()) throw SolverError(ErrorKind::NonFinite, "fd_jacobian: f(u) not finite");
  Matrix jac(f0.size(), u.size());
  Vector up = u;
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double h = rel_step * (1.0 + std::abs(u(j)));
    up(j) = u(j) + h;
    const Vector fp = f(up);
    up(j) = u(j) - h;
    const Vector fm = f(up);
    up(j) = u(j);
    if (!fp.allFinite() || !fm.allFinite()) {
      throw SolverError(ErrorKind::NonFinite,
                        "fd_jacobian: evaluation not finite at column " + std::to_string(j));
    }
    jac.col(j) = (fp - fm) / (2.0 * h);
  }
  return jac;
}

}  // namespace pit
