#pragma once

#include "pit/dense.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pit {

/// Iteration state: U_0..U_{N-1} at the window starts plus the period.
struct ShootingState {
  std::vector<Vector> initial_values;
  double period = 0.0;

  std::size_t windows() const noexcept { return initial_values.size(); }
  /// Stacked [U_0; ...; U_{N-1}; T].
  Vector stacked() const;
  /// Concatenated U part only.
  Vector stacked_values() const;
  static ShootingState from_stacked(const Vector& z, std::size_t windows, std::size_t dim);

  /// Throws SolverError(InvalidArgument/NonFinite) unless all U_n have
  /// length `dim`, are finite, and the period is > 0.
  void validate(std::size_t dim) const;
};

/// One row of the iteration history. Outer iteration k, inner step s.
/// For the shooting solver s is always 0.
struct IterationRecord {
  std::size_t k = 0;
  std::size_t s = 0;
  double period = 0.0;
  /// ||Phi||_2 / ||z_U||_2 of the outer iterate k.
  double jump_norm_rel = 0.0;
  double max_block_norm = 0.0;
  /// Period produced by the step of this row (Newton step or inner solve);
  /// equals `period` on a final row without a step.
  double period_candidate = 0.0;
  /// |T^(k+1) - T^(k)| / T^(k) of the step taken from this row (0 if none).
  double period_change_rel = 0.0;
  /// Effective (parallel) cost units charged to this row.
  std::uint64_t fine_units = 0;
  std::uint64_t coarse_units = 0;
  std::uint64_t block_units = 0;
  /// Inner stagnation ||U^(s+1) - U^(s)|| / ||U^(s)|| (parareal rows).
  double inner_change_rel = 0.0;
  /// Damping factor of a Newton step (1 when undamped).
  double damping = 1.0;
  /// Free-form events: "period-clamped", "tikhonov", "damped" ...
  std::string note;
};

enum class SolveStatus { Converged, MaxIterExceeded };

struct ConvergenceRecord {
  std::vector<IterationRecord> rows;
  /// All solves summed over windows (serial work).
  SolveCounts total;
  /// Number of outer iterations performed (k of the final iterate).
  std::size_t outer_iterations = 0;
  std::size_t inner_iterations = 0;
  /// Count of linear systems solved, each counted once regardless of size.
  std::uint64_t linear_solves = 0;

  std::uint64_t effective_units() const;
  std::uint64_t fine_units() const;
  std::uint64_t coarse_units() const;
  std::uint64_t block_units() const;
};

struct SolveResult {
  ShootingState state;
  ConvergenceRecord record;
  SolveStatus status = SolveStatus::MaxIterExceeded;
  /// Final relative jump norm.
  double jump_norm_rel = 0.0;
};

/// Relative jump norm ||Phi||_2 / ||z_U||_2.
double relative_jump_norm(const std::vector<Vector>& blocks, const ShootingState& state);

}  // namespace pit
