#include "pit/time_grid.hpp"

#include "pit/errors.hpp"

#include <cmath>

namespace pit {

TimeGrid TimeGrid::uniform(std::size_t windows) {
  if (windows == 0) throw SolverError(ErrorKind::InvalidArgument, "grid needs at least one window");
  std::vector<double> nodes(windows + 1);
  for (std::size_t i = 0; i <= windows; ++i) {
    nodes[i] = static_cast<double>(i) / static_cast<double>(windows);
  }
  TimeGrid grid(std::move(nodes));
  grid.equidistant_ = true;
  return grid;
}

TimeGrid TimeGrid::from_nodes(std::vector<double> nodes) { return TimeGrid(std::move(nodes)); }

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw SolverError(ErrorKind::InvalidArgument, "grid needs two nodes");
  if (nodes_.front() != 0.0 || std::abs(nodes_.back() - 1.0) > 1e-14) {
    throw SolverError(ErrorKind::InvalidArgument, "grid must span [0, 1]");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      throw SolverError(ErrorKind::InvalidArgument, "grid nodes must increase strictly");
    }
  }
  const double first = nodes_[1] - nodes_[0];
  equidistant_ = true;
  for (std::size_t w = 1; w + 1 < nodes_.size(); ++w) {
    if (std::abs(window_length(w) - first) > 1e-14) {
      equidistant_ = false;
      break;
    }
  }
}

}  // namespace pit
