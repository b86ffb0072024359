#include "pit/bench/config.hpp"

#include <pit/errors.hpp>
#include <pit/problems.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <vector>

namespace pit::bench {

namespace pt = boost::property_tree;

Mode parse_mode(const std::string& text) {
  if (text == "sequential") return Mode::Sequential;
  if (text == "shooting") return Mode::Shooting;
  if (text == "pppc") return Mode::Pppc;
  if (text == "pppc-up") return Mode::PppcUp;
  throw ConfigError(fmt::format("unknown mode '{}'", text));
}

std::string to_string(Mode mode) {
  switch (mode) {
    case Mode::Sequential: return "sequential";
    case Mode::Shooting: return "shooting";
    case Mode::Pppc: return "pppc";
    case Mode::PppcUp: return "pppc-up";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (s.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ConfigError(fmt::format("{}: '{}' is not a finite number", key, raw));
  }
  return v;
}

std::size_t parse_size(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(fmt::format("{}: '{}' is not a non-negative integer", key, raw));
  }
  return v;
}

bool parse_bool(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, raw));
}

void reject_unknown(const pt::ptree& section, const std::string& name,
                    const std::set<std::string>& allowed) {
  for (const auto& [key, _] : section) {
    if (!allowed.contains(key)) {
      throw ConfigError(fmt::format("unknown key '{}' in section [{}]", key, name));
    }
  }
}

template <class F>
void with(const pt::ptree& section, const std::string& key, F&& apply) {
  if (auto v = section.get_optional<std::string>(key)) apply(*v);
}

}  // namespace

Vector parse_vector(const std::string& text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto end = comma == std::string::npos ? text.size() : comma;
    values.push_back(parse_double(text.substr(start, end - start), "vector"));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  Vector v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v(static_cast<Eigen::Index>(i)) = values[i];
  return v;
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config syntax: {}", e.what()));
  }

  RunConfig c;
  static const std::set<std::string> sections = {"run_id",     "problem", "params",
                                                 "run",        "sequential", "pppc",
                                                 "newton",     "propagator", "numerics"};
  for (const auto& [key, node] : tree) {
    if (!sections.contains(key)) throw ConfigError(fmt::format("unknown section or key '{}'", key));
    if (key == "run_id") c.run_id = trim(node.data());
  }

  if (auto s = tree.get_child_optional("problem")) {
    reject_unknown(*s, "problem", {"name", "u0", "period0", "period_known", "seed_transient"});
    with(*s, "name", [&](const std::string& v) { c.problem = trim(v); });
    with(*s, "u0", [&](const std::string& v) { c.u0 = parse_vector(v); });
    with(*s, "period0", [&](const std::string& v) { c.period0 = parse_double(v, "period0"); });
    with(*s, "seed_transient",
         [&](const std::string& v) { c.seed_transient = parse_double(v, "seed_transient"); });
    with(*s, "period_known",
         [&](const std::string& v) { c.period_known = parse_double(v, "period_known"); });
  }
  if (auto s = tree.get_child_optional("params")) {
    for (const auto& [key, node] : *s) c.params[key] = parse_double(node.data(), key);
  }
  if (auto s = tree.get_child_optional("run")) {
    reject_unknown(*s, "run", {"mode", "windows", "coarse_dtau", "fine_dtau", "outer_tol",
                               "max_iter", "out", "workers"});
    with(*s, "mode", [&](const std::string& v) { c.mode = parse_mode(trim(v)); });
    with(*s, "windows", [&](const std::string& v) { c.windows = parse_size(v, "windows"); });
    with(*s, "coarse_dtau",
         [&](const std::string& v) { c.coarse_dtau = parse_double(v, "coarse_dtau"); });
    with(*s, "fine_dtau", [&](const std::string& v) { c.fine_dtau = parse_double(v, "fine_dtau"); });
    with(*s, "outer_tol", [&](const std::string& v) { c.outer_tol = parse_double(v, "outer_tol"); });
    with(*s, "max_iter", [&](const std::string& v) { c.max_iter = parse_size(v, "max_iter"); });
    with(*s, "out", [&](const std::string& v) { c.out_dir = trim(v); });
    with(*s, "workers", [&](const std::string& v) { c.workers = parse_size(v, "workers"); });
  }
  if (auto s = tree.get_child_optional("sequential")) {
    reject_unknown(*s, "sequential", {"dt", "horizon", "baseline_horizon", "fraction",
                                      "step_doubling", "baseline", "trajectory_stride"});
    auto& q = c.sequential;
    with(*s, "dt", [&](const std::string& v) { q.dt = parse_double(v, "dt"); });
    with(*s, "horizon", [&](const std::string& v) { q.horizon = parse_double(v, "horizon"); });
    with(*s, "baseline_horizon",
         [&](const std::string& v) { q.baseline_horizon = parse_double(v, "baseline_horizon"); });
    with(*s, "fraction", [&](const std::string& v) { q.fraction = parse_double(v, "fraction"); });
    with(*s, "step_doubling",
         [&](const std::string& v) { q.step_doubling = parse_bool(v, "step_doubling"); });
    with(*s, "baseline", [&](const std::string& v) { q.baseline = parse_bool(v, "baseline"); });
    with(*s, "trajectory_stride",
         [&](const std::string& v) { q.trajectory_stride = parse_size(v, "trajectory_stride"); });
  }
  if (auto s = tree.get_child_optional("pppc")) {
    reject_unknown(*s, "pppc", {"inner_tol", "inner_max_iter", "tikhonov"});
    with(*s, "inner_tol", [&](const std::string& v) { c.inner_tol = parse_double(v, "inner_tol"); });
    with(*s, "inner_max_iter",
         [&](const std::string& v) { c.inner_max_iter = parse_size(v, "inner_max_iter"); });
    with(*s, "tikhonov", [&](const std::string& v) { c.tikhonov = parse_double(v, "tikhonov"); });
  }
  if (auto s = tree.get_child_optional("newton")) {
    reject_unknown(*s, "newton", {"damping", "jacobian"});
    with(*s, "damping", [&](const std::string& v) { c.damping = parse_bool(v, "damping"); });
    with(*s, "jacobian", [&](const std::string& v) {
      const std::string j = trim(v);
      if (j == "fd-fine") {
        c.coarse_jacobian = false;
      } else if (j == "coarse") {
        c.coarse_jacobian = true;
      } else {
        throw ConfigError(fmt::format("jacobian: '{}' is not fd-fine or coarse", v));
      }
    });
  }
  if (auto s = tree.get_child_optional("propagator")) {
    reject_unknown(*s, "propagator", {"newton_tol", "newton_max_iter", "coarse_steps"});
    with(*s, "newton_tol",
         [&](const std::string& v) { c.stage_newton_tol = parse_double(v, "newton_tol"); });
    with(*s, "newton_max_iter",
         [&](const std::string& v) { c.stage_newton_max_iter = parse_size(v, "newton_max_iter"); });
    with(*s, "coarse_steps",
         [&](const std::string& v) { c.coarse_steps = parse_size(v, "coarse_steps"); });
  }
  if (auto s = tree.get_child_optional("numerics")) {
    reject_unknown(*s, "numerics", {"pivot_tol", "rank_tol"});
    with(*s, "pivot_tol", [&](const std::string& v) { c.linear.pivot = parse_double(v, "pivot_tol"); });
    with(*s, "rank_tol", [&](const std::string& v) { c.linear.rank = parse_double(v, "rank_tol"); });
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  return parse_config(in);
}

void RunConfig::validate() const {
  if (windows == 0) throw ConfigError("windows must be >= 1");
  if (!(coarse_dtau > 0.0) || !(fine_dtau > 0.0)) throw ConfigError("step sizes must be > 0");
  if (std::abs(static_cast<double>(windows) * coarse_dtau - 1.0) > 1e-12) {
    throw ConfigError(fmt::format("windows * coarse_dtau = {} != 1", windows * coarse_dtau));
  }
  const double ratio = coarse_dtau / fine_dtau;
  if (ratio < 1.0 - 1e-12 || std::abs(std::round(ratio) * fine_dtau - coarse_dtau) > 1e-12) {
    throw ConfigError(fmt::format("fine_dtau {} does not divide coarse_dtau {}", fine_dtau,
                                  coarse_dtau));
  }
  if (!(outer_tol > 0.0)) throw ConfigError("outer_tol must be > 0");
  if (max_iter == 0) throw ConfigError("max_iter must be >= 1");
  if (workers == 0) throw ConfigError("workers must be >= 1");
  if (period0 && !(*period0 > 0.0)) throw ConfigError("period0 must be > 0");
  if (period_known && !(*period_known > 0.0)) throw ConfigError("period_known must be > 0");
  if (seed_transient && !(*seed_transient >= 0.0)) throw ConfigError("seed_transient must be >= 0");
  if (!(inner_tol > 0.0) || inner_max_iter == 0) throw ConfigError("invalid inner settings");
  if (!(tikhonov > 0.0)) throw ConfigError("tikhonov must be > 0");
  if (!(stage_newton_tol > 0.0) || stage_newton_max_iter == 0) {
    throw ConfigError("invalid propagator newton settings");
  }
  if (coarse_steps == 0 || coarse_steps > fine_steps_per_window()) {
    throw ConfigError("coarse_steps must be in [1, fine steps per window]");
  }
  if (!(linear.pivot > 0.0) || !(linear.rank > 0.0)) throw ConfigError("invalid numerics tolerances");
  const auto& q = sequential;
  if (q.dt && !(*q.dt > 0.0)) throw ConfigError("sequential dt must be > 0");
  if (q.horizon && !(*q.horizon > 0.0)) throw ConfigError("sequential horizon must be > 0");
  if (q.baseline_horizon && !(*q.baseline_horizon > 0.0)) {
    throw ConfigError("sequential baseline_horizon must be > 0");
  }
  if (!(q.fraction > 0.0 && q.fraction <= 1.0)) throw ConfigError("fraction must be in (0, 1]");
}

std::size_t RunConfig::fine_steps_per_window() const {
  return static_cast<std::size_t>(std::llround(coarse_dtau / fine_dtau));
}

PropagatorConfig RunConfig::propagator() const {
  PropagatorConfig p;
  p.fine_steps_per_window = fine_steps_per_window();
  p.coarse_steps_per_window = coarse_steps;
  p.newton_tol = stage_newton_tol;
  p.newton_max_iter = stage_newton_max_iter;
  return p;
}

Problem make_problem(const std::string& name, const std::map<std::string, double>& params) {
  auto take = [&](const std::set<std::string>& allowed) {
    for (const auto& [key, _] : params) {
      if (!allowed.contains(key)) {
        throw ConfigError(fmt::format("unknown parameter '{}' for problem '{}'", key, name));
      }
    }
  };
  auto get = [&](const std::string& key, double fallback) {
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  };
  try {
    if (name == "colpitts") {
      take({"c1", "c2", "c3", "c4", "r1", "r2", "r3", "r4", "l", "u_op", "y_e", "x_e", "i_s",
            "y_c", "x_c", "u_t", "u_t_surrogate"});
      ColpittsParams p;
      p.c1 = get("c1", p.c1);
      p.c2 = get("c2", p.c2);
      p.c3 = get("c3", p.c3);
      p.c4 = get("c4", p.c4);
      p.r1 = get("r1", p.r1);
      p.r2 = get("r2", p.r2);
      p.r3 = get("r3", p.r3);
      p.r4 = get("r4", p.r4);
      p.l = get("l", p.l);
      p.u_op = get("u_op", p.u_op);
      p.y_e = get("y_e", p.y_e);
      p.x_e = get("x_e", p.x_e);
      p.i_s = get("i_s", p.i_s);
      p.y_c = get("y_c", p.y_c);
      p.x_c = get("x_c", p.x_c);
      p.u_t = get("u_t", p.u_t);
      p.u_t_surrogate = get("u_t_surrogate", p.u_t_surrogate);
      p.validate();
      Vector u0(4);
      u0 << 9.75, 1.0, 1.0, 1.0;
      return Problem{name, colpitts_system(p), colpitts_surrogate(p), u0, 1e-4, 0.0,
                     0.1125e-6, 1.125e-3, 5e-3};
    }
    if (name == "vanderpol") {
      take({"mu"});
      const double mu = get("mu", 1.0);
      Vector u0(2);
      u0 << 2.0, 0.0;
      return Problem{name, vanderpol_system(mu), vanderpol_surrogate(mu), u0, 6.0, 20.0,
                     1e-3, 100.0, 100.0};
    }
    if (name == "harmonic") {
      take({"omega"});
      const double omega = get("omega", 2.0 * 3.14159265358979323846);
      if (!(omega > 0.0)) throw ConfigError("omega must be > 0");
      LinearSurrogate s;
      s.a = Matrix::Zero(2, 2);
      s.a(0, 1) = 1.0;
      s.a(1, 0) = -omega * omega;
      s.c = Vector::Zero(2);
      Vector u0(2);
      u0 << 1.0, 0.0;
      const double period = 2.0 * 3.14159265358979323846 / omega;
      return Problem{name, harmonic_system(omega), s, u0, period, 0.0,
                     period * 1e-3, 10.0 * period, 10.0 * period};
    }
  } catch (const SolverError& e) {
    throw ConfigError(fmt::format("problem '{}': {}", name, e.what()));
  }
  throw ConfigError(fmt::format("unknown problem '{}'", name));
}

}  // namespace pit::bench
