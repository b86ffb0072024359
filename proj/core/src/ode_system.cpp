#include "pit/ode_system.hpp"

#include "pit/errors.hpp"

#include <cmath>

namespace pit {

OdeSystem::OdeSystem(std::string name, Matrix mass, RhsFunction rhs, JacobianFunction jacobian,
                     std::shared_ptr<OdeDiagnostics> diagnostics)
    : name_(std::move(name)),
      mass_(std::move(mass)),
      rhs_(std::move(rhs)),
      jacobian_(std::move(jacobian)),
      diagnostics_(diagnostics ? std::move(diagnostics) : std::make_shared<OdeDiagnostics>()) {
  if (mass_.rows() == 0 || mass_.rows() != mass_.cols()) {
    throw SolverError(ErrorKind::InvalidArgument, "mass matrix must be square and non-empty");
  }
  if (!rhs_) throw SolverError(ErrorKind::InvalidArgument, "rhs function is empty");
  // Solvability test; the factorization is reused by solve_mass.
  const Vector probe = Vector::Ones(mass_.rows());
  (void)solve_square(mass_, probe);
  mass_lu_.compute(mass_);
}

Matrix OdeSystem::rhs_jacobian(const Vector& u) const {
  if (jacobian_) return jacobian_(u);
  return fd_jacobian(rhs_, u, 1e-6);
}

Vector OdeSystem::solve_mass(const Vector& b, SolveStats* stats) const {
  Vector x = mass_lu_.solve(b);
  if (stats) stats->record_solve(dim());
  return x;
}

void LinearSurrogate::validate(std::size_t dim) const {
  const auto d = static_cast<Eigen::Index>(dim);
  if (a.rows() != d || a.cols() != d || c.size() != d) {
    throw SolverError(ErrorKind::InvalidArgument, "surrogate dimensions do not match system");
  }
}

OdeSystem linear_system(const Matrix& mass, const LinearSurrogate& surrogate, std::string name) {
  surrogate.validate(static_cast<std::size_t>(mass.rows()));
  const Matrix a = surrogate.a;
  const Vector c = surrogate.c;
  return OdeSystem(
      std::move(name), mass, [a, c](const Vector& u) -> Vector { return a * u + c; },
      [a](const Vector&) -> Matrix { return a; });
}

}  // namespace pit
