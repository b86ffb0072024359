#pragma once

#include <pit/dense.hpp>
#include <pit/ode_system.hpp>
#include <pit/propagators.hpp>

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace pit::bench {

/// Invalid or inconsistent configuration (exit code 4).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode { Sequential, Shooting, Pppc, PppcUp };

Mode parse_mode(const std::string& text);
std::string to_string(Mode mode);

/// Problem instance with its run defaults.
struct Problem {
  std::string name;
  OdeSystem system;
  LinearSurrogate surrogate;
  Vector u0;
  double period0 = 0.0;
  /// Physical time of the transient that seeds z0; 0 seeds z0 from one
  /// coarse sweep.
  double seed_transient = 0.0;
  /// Sequential reference: step (physical time), transient horizon and the
  /// longer horizon used for the steady-state solve baseline.
  double seq_dt = 0.0;
  double seq_horizon = 0.0;
  double baseline_horizon = 0.0;
};

/// Registry: "colpitts" (keys c1..c4, r1..r4, l, u_op, y_e, x_e, i_s, y_c,
/// x_c, u_t, u_t_surrogate), "vanderpol" (mu), "harmonic" (omega).
/// Throws ConfigError on unknown names or keys.
Problem make_problem(const std::string& name, const std::map<std::string, double>& params = {});

struct SequentialSettings {
  std::optional<double> dt;
  std::optional<double> horizon;
  std::optional<double> baseline_horizon;
  /// Tail fraction of the horizon used for period detection.
  double fraction = 0.3;
  /// Extra run at 2 dt for the discretization part of the confidence window.
  bool step_doubling = true;
  /// Run the steady-state baseline in solver modes.
  bool baseline = true;
  /// Every n-th state goes to trajectory.csv; 0 picks n so that at most
  /// 20000 rows are written.
  std::size_t trajectory_stride = 0;
};

struct RunConfig {
  std::string run_id = "run";
  std::string problem = "colpitts";
  std::map<std::string, double> params;
  Mode mode = Mode::PppcUp;
  std::size_t windows = 10;
  double coarse_dtau = 0.1;
  double fine_dtau = 1e-4;
  double outer_tol = 1e-3;
  std::size_t max_iter = 100;
  std::optional<Vector> u0;
  std::optional<double> period0;
  std::optional<double> seed_transient;
  /// Frozen period of mode pppc; defaults to period0.
  std::optional<double> period_known;
  std::filesystem::path out_dir = "out";
  std::size_t workers = 1;

  SequentialSettings sequential;

  double inner_tol = 1e-6;
  std::size_t inner_max_iter = 50;
  double tikhonov = 1e-10;

  bool damping = true;
  bool coarse_jacobian = false;

  double stage_newton_tol = 1e-10;
  std::size_t stage_newton_max_iter = 25;
  std::size_t coarse_steps = 1;

  Tolerances linear;

  /// Throws ConfigError unless N * coarse_dtau = 1 and fine_dtau divides
  /// coarse_dtau (both within 1e-12), and all sizes and tolerances are
  /// positive.
  void validate() const;

  std::size_t fine_steps_per_window() const;
  PropagatorConfig propagator() const;
};

/// Sectioned key = value text:
///   run_id, [problem] name/u0/period0/period_known/seed_transient, [params] <key> = value,
///   [run] mode/windows/coarse_dtau/fine_dtau/outer_tol/max_iter/out/workers,
///   [sequential] dt/horizon/baseline_horizon/fraction/step_doubling/
///                baseline/trajectory_stride,
///   [pppc] inner_tol/inner_max_iter/tikhonov,
///   [newton] damping/jacobian (fd-fine | coarse),
///   [propagator] newton_tol/newton_max_iter/coarse_steps,
///   [numerics] pivot_tol/rank_tol.
/// Unknown sections or keys are errors. The result is not validated.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// "1, 2.5, -3" -> vector. Throws ConfigError.
Vector parse_vector(const std::string& text);

}  // namespace pit::bench
