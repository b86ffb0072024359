#pragma once

#include <cstddef>
#include <vector>

namespace pit {

/// Partition 0 = tau_0 < tau_1 < ... < tau_N = 1 of the rescaled period.
/// Window w (0-based) is (tau_w, tau_{w+1}].
class TimeGrid {
 public:
  /// N equal windows.
  static TimeGrid uniform(std::size_t windows);
  /// Throws SolverError(InvalidArgument) unless nodes start at 0, end at 1
  /// and increase strictly.
  static TimeGrid from_nodes(std::vector<double> nodes);

  std::size_t windows() const noexcept { return nodes_.size() - 1; }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  double node(std::size_t i) const { return nodes_.at(i); }
  double window_length(std::size_t w) const { return nodes_.at(w + 1) - nodes_.at(w); }
  bool equidistant() const noexcept { return equidistant_; }

 private:
  explicit TimeGrid(std::vector<double> nodes);

  std::vector<double> nodes_;
  bool equidistant_ = false;
};

}  // namespace pit
