#pragma once

#include <pit/dense.hpp>

#include <cstdint>
#include <vector>

namespace pit::bench {

struct PeriodEstimate {
  double period_seconds = 0.0;
  /// Half-width of the confidence interval around period_seconds.
  double confidence_window = 0.0;
  int crossings_used = 0;
  /// Component the crossings were taken from.
  std::size_t component = 0;
  /// Parts of the confidence window.
  double standard_error = 0.0;
  double drift = 0.0;
  double discretization = 0.0;
};

/// Mean spacing of upward mean-level crossings of `values` over the last
/// `fraction` of the time span, crossing times linearly interpolated.
/// confidence_window = 2 * standard error + |mean(first half) -
/// mean(second half)| of the crossing intervals.
/// Throws SolverError(NoOscillationDetected) below 3 crossings.
PeriodEstimate detect_period_component(const std::vector<double>& times,
                                       const std::vector<double>& values, double fraction = 0.3);

/// Same on the component with the largest peak-to-peak amplitude in the tail.
PeriodEstimate detect_period(const std::vector<double>& times, const std::vector<Vector>& states,
                             double fraction = 0.3);

struct SteadyState {
  bool reached = false;
  std::size_t step = 0;
  double time = 0.0;
  /// Cumulative solve units of the integration up to `step`.
  std::uint64_t units = 0;
  double defect = 0.0;
};

/// First step i with t_i >= 2 P whose one-period defect
///   || z(t_i) - z(t_i - P) || / || z(t_i) ||,
///   z(t) = [u(t); u(t - P/N); ...; u(t - (N-1) P/N)],
/// is <= tol. Lagged states are linearly interpolated on the uniform
/// sample grid `times`.
SteadyState find_steady_state(const std::vector<double>& times, const std::vector<Vector>& states,
                              const std::vector<std::uint64_t>& cumulative_units, double period,
                              std::size_t samples, double tol);

}  // namespace pit::bench
