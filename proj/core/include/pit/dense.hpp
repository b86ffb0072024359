#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <cstdint>
#include <functional>

namespace pit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Plain snapshot of solve counters.
struct SolveCounts {
  std::uint64_t factorizations = 0;
  std::uint64_t back_solves = 0;
  std::uint64_t cost_units = 0;

  SolveCounts& operator+=(const SolveCounts& o) {
    factorizations += o.factorizations;
    back_solves += o.back_solves;
    cost_units += o.cost_units;
    return *this;
  }
  friend SolveCounts operator+(SolveCounts a, const SolveCounts& b) { return a += b; }
  friend SolveCounts operator-(SolveCounts a, const SolveCounts& b) {
    a.factorizations -= b.factorizations;
    a.back_solves -= b.back_solves;
    a.cost_units -= b.cost_units;
    return a;
  }
  friend bool operator==(const SolveCounts&, const SolveCounts&) = default;
};

/// Cost of one solve of size m measured in units of d x d solves:
/// 1 when m <= d, otherwise ceil((m/d)^3).
std::uint64_t cost_units_for(std::size_t m, std::size_t unit_dim);

/// Thread-safe accumulator of linear-solve work. One cost unit is one solve
/// of size `unit_dim` (the state dimension of the problem being solved).
class SolveStats {
 public:
  explicit SolveStats(std::size_t unit_dim = 1) : unit_dim_(unit_dim) {}
  SolveStats(const SolveStats&) = delete;
  SolveStats& operator=(const SolveStats&) = delete;

  std::size_t unit_dim() const noexcept { return unit_dim_; }

  /// Records a factorization plus one back-solve of an m x m (or m x n,
  /// m = max dimension) system.
  void record_solve(std::size_t m);
  void merge(const SolveCounts& counts);
  SolveCounts snapshot() const;

 private:
  std::size_t unit_dim_;
  std::atomic<std::uint64_t> factorizations_{0};
  std::atomic<std::uint64_t> back_solves_{0};
  std::atomic<std::uint64_t> cost_units_{0};
};

struct Tolerances {
  /// Pivot threshold relative to ||A||_inf for square solves.
  double pivot = 1e-14;
  /// Rank threshold relative to the largest |R_ii| of the QR of A^T.
  double rank = 1e-12;
};

double inf_norm(const Matrix& a);
bool all_finite(const Matrix& a);
bool all_finite(const Vector& v);

/// Solves A x = b with partially pivoted LU.
/// Throws SolverError(SingularMatrix) when a pivot falls below
/// tol.pivot * ||A||_inf.
Vector solve_square(const Matrix& a, const Vector& b, SolveStats* stats = nullptr,
                    const Tolerances& tol = {});

/// Minimum-norm solution x = A^+ b of the underdetermined system A x = b
/// (m < n, full row rank). Computed from a column-pivoted Householder QR of
/// A^T after row equilibration; x lies in the row space of A by
/// construction. Throws SolverError(RankDeficient) when the numerical row
/// rank is below m.
Vector solve_min_norm(const Matrix& a, const Vector& b, SolveStats* stats = nullptr,
                      const Tolerances& tol = {});

/// Tikhonov-regularized minimum-norm solve x = A^T (A A^T + eps I)^-1 b with
/// eps = rel_eps * ||A A^T||_inf. Used as the fallback when A is rank
/// deficient.
Vector solve_min_norm_regularized(const Matrix& a, const Vector& b, double rel_eps,
                                  SolveStats* stats = nullptr);

using VectorFunction = std::function<Vector(const Vector&)>;

/// Central-difference Jacobian with per-component step rel_step*(1+|u_i|).
/// Throws SolverError(NonFinite) if any evaluation is not finite.
Matrix fd_jacobian(const VectorFunction& f, const Vector& u, double rel_step = 1e-6);

}  // namespace pit
