#pragma once

#include <optional>
#include <stdexcept>
#include <string>

namespace pit {

enum class ErrorKind {
  SingularMatrix,
  RankDeficient,
  NonFinite,
  NewtonDiverged,
  MaxIterExceeded,
  NoOscillationDetected,
  InvalidArgument,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base error for every failure raised by the solver library. Carries the
/// window index when the failure happened inside a window-local computation.
class SolverError : public std::runtime_error {
 public:
  SolverError(ErrorKind kind, const std::string& what,
              std::optional<std::size_t> window = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<std::size_t>& window() const noexcept { return window_; }

  /// Copy of this error annotated with a window index (keeps an existing one).
  SolverError with_window(std::size_t window) const;

 private:
  ErrorKind kind_;
  std::optional<std::size_t> window_;
};

}  // namespace pit
