#include "pit/convergence.hpp"

#include "pit/errors.hpp"

#include <cmath>

namespace pit {

Vector ShootingState::stacked_values() const {
  const Eigen::Index d = initial_values.empty() ? 0 : initial_values.front().size();
  Vector z(d * static_cast<Eigen::Index>(initial_values.size()));
  for (std::size_t n = 0; n < initial_values.size(); ++n) {
    z.segment(static_cast<Eigen::Index>(n) * d, d) = initial_values[n];
  }
  return z;
}

Vector ShootingState::stacked() const {
  const Vector u = stacked_values();
  Vector z(u.size() + 1);
  z.head(u.size()) = u;
  z(u.size()) = period;
  return z;
}

ShootingState ShootingState::from_stacked(const Vector& z, std::size_t windows, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  if (z.size() != d * static_cast<Eigen::Index>(windows) + 1) {
    throw SolverError(ErrorKind::InvalidArgument, "stacked state has wrong length");
  }
  ShootingState s;
  s.initial_values.reserve(windows);
  for (std::size_t n = 0; n < windows; ++n) {
    s.initial_values.push_back(z.segment(static_cast<Eigen::Index>(n) * d, d));
  }
  s.period = z(z.size() - 1);
  return s;
}

void ShootingState::validate(std::size_t dim) const {
  if (initial_values.empty()) throw SolverError(ErrorKind::InvalidArgument, "state has no windows");
  for (const auto& u : initial_values) {
    if (u.size() != static_cast<Eigen::Index>(dim)) {
      throw SolverError(ErrorKind::InvalidArgument, "initial value has wrong dimension");
    }
    if (!u.allFinite()) throw SolverError(ErrorKind::NonFinite, "initial value not finite");
  }
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw SolverError(ErrorKind::InvalidArgument, "period must be finite and > 0");
  }
}

std::uint64_t ConvergenceRecord::fine_units() const {
  std::uint64_t s = 0;
  for (const auto& r : rows) s += r.fine_units;
  return s;
}

std::uint64_t ConvergenceRecord::coarse_units() const {
  std::uint64_t s = 0;
  for (const auto& r : rows) s += r.coarse_units;
  return s;
}

std::uint64_t ConvergenceRecord::block_units() const {
  std::uint64_t s = 0;
  for (const auto& r : rows) s += r.block_units;
  return s;
}

std::uint64_t ConvergenceRecord::effective_units() const {
  return fine_units() + coarse_units() + block_units();
}

double relative_jump_norm(const std::vector<Vector>& blocks, const ShootingState& state) {
  double num = 0.0;
  for (const auto& b : blocks) num += b.squaredNorm();
  const double den = state.stacked_values().norm();
  return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

}  // namespace pit
