#pragma once

#include <pit/ode_system.hpp>

#include <random>

namespace pit::testing {

/// M u' = a u + c with scalar M.
inline OdeSystem scalar_linear(double a, double c = 0.0, double m = 1.0) {
  return OdeSystem(
      "scalar", Matrix::Constant(1, 1, m),
      [a, c](const Vector& u) { return Vector::Constant(1, a * u(0) + c); },
      [a](const Vector&) { return Matrix::Constant(1, 1, a); });
}

inline LinearSurrogate scalar_surrogate(double a, double c = 0.0) {
  return LinearSurrogate{Matrix::Constant(1, 1, a), Vector::Constant(1, c)};
}

/// f == 0 with identity mass.
inline OdeSystem zero_system(std::size_t d) {
  const auto n = static_cast<Eigen::Index>(d);
  return OdeSystem(
      "zero", Matrix::Identity(n, n), [n](const Vector&) { return Vector::Zero(n); },
      [n](const Vector&) { return Matrix::Zero(n, n); });
}

inline Matrix random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> dist;
  Matrix a(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) a(i, j) = dist(rng);
  }
  return a;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = dist(rng);
  return v;
}

inline double rel_err(const Vector& a, const Vector& b) {
  const double s = b.norm();
  return (a - b).norm() / (s > 0.0 ? s : 1.0);
}

}  // namespace pit::testing
