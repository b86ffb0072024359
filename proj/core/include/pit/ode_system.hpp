#pragma once

#include "pit/dense.hpp"

#include <atomic>
#include <functional>
#include <memory>
#include <string>

namespace pit {

using RhsFunction = std::function<Vector(const Vector&)>;
using JacobianFunction = std::function<Matrix(const Vector&)>;

/// Counters shared by copies of one OdeSystem. Evaluation itself is pure;
/// these only collect diagnostics such as clamped exponentials.
struct OdeDiagnostics {
  std::atomic<std::uint64_t> clamped_evaluations{0};
};

/// Autonomous system M u' = f(u) with a non-singular mass matrix.
///
/// Copies share the (immutable) callables and the diagnostics block, so an
/// OdeSystem can be passed by value into worker threads.
class OdeSystem {
 public:
  /// Throws SolverError(SingularMatrix) when `mass` is singular and
  /// SolverError(InvalidArgument) on dimension mismatch. An empty
  /// `jacobian` selects the central finite-difference fallback. Callables
  /// that report diagnostics pass the block they write to.
  OdeSystem(std::string name, Matrix mass, RhsFunction rhs, JacobianFunction jacobian = {},
            std::shared_ptr<OdeDiagnostics> diagnostics = nullptr);

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(mass_.rows()); }
  const Matrix& mass() const noexcept { return mass_; }
  bool has_analytic_jacobian() const noexcept { return static_cast<bool>(jacobian_); }

  Vector rhs(const Vector& u) const { return rhs_(u); }
  Matrix rhs_jacobian(const Vector& u) const;

  /// Solves M x = b using the LU factorization computed at construction.
  /// Counted as one d x d solve.
  Vector solve_mass(const Vector& b, SolveStats* stats = nullptr) const;

  std::uint64_t clamped_evaluations() const noexcept {
    return diagnostics_->clamped_evaluations.load(std::memory_order_relaxed);
  }
  const std::shared_ptr<OdeDiagnostics>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string name_;
  Matrix mass_;
  Eigen::PartialPivLU<Matrix> mass_lu_;
  RhsFunction rhs_;
  JacobianFunction jacobian_;
  std::shared_ptr<OdeDiagnostics> diagnostics_;
};

/// Linearized right-hand side f(u) ~ A u + c used by the closed-form coarse
/// propagator. A single window-independent model.
struct LinearSurrogate {
  Matrix a;
  Vector c;

  /// Throws SolverError(InvalidArgument) unless A is dim x dim and c has length dim.
  void validate(std::size_t dim) const;
};

/// System M u' = A u + c built from a surrogate.
OdeSystem linear_system(const Matrix& mass, const LinearSurrogate& surrogate,
                        std::string name = "linear");

}  // namespace pit
