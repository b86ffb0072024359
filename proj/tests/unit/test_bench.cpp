#include <pit/bench/config.hpp>
#include <pit/bench/experiment.hpp>
#include <pit/bench/period.hpp>
#include <pit/errors.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace pit::bench {
namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("pit_bench_" + name);
  std::filesystem::remove_all(p);
  return p;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, ParsesAllSections) {
  const RunConfig c = parse(
      "run_id = abc\n"
      "[problem]\nname = vanderpol\nu0 = 2, 0\nperiod0 = 6.5\nseed_transient = 10\n"
      "[params]\nmu = 2\n"
      "[run]\nmode = shooting\nwindows = 20\ncoarse_dtau = 0.05\nfine_dtau = 0.001\n"
      "outer_tol = 1e-6\nmax_iter = 7\nout = somewhere\nworkers = 3\n"
      "[sequential]\ndt = 0.01\nhorizon = 50\nfraction = 0.5\nstep_doubling = false\n"
      "[pppc]\ninner_tol = 1e-8\ninner_max_iter = 9\ntikhonov = 1e-12\n"
      "[newton]\ndamping = false\njacobian = coarse\n"
      "[propagator]\nnewton_tol = 1e-12\nnewton_max_iter = 30\ncoarse_steps = 2\n");
  EXPECT_EQ(c.run_id, "abc");
  EXPECT_EQ(c.problem, "vanderpol");
  EXPECT_EQ(c.params.at("mu"), 2.0);
  ASSERT_TRUE(c.u0);
  EXPECT_EQ(*c.u0, (Vector(2) << 2.0, 0.0).finished());
  EXPECT_EQ(c.period0, 6.5);
  EXPECT_EQ(c.seed_transient, 10.0);
  EXPECT_EQ(c.mode, Mode::Shooting);
  EXPECT_EQ(c.windows, 20u);
  EXPECT_EQ(c.fine_steps_per_window(), 50u);
  EXPECT_EQ(c.max_iter, 7u);
  EXPECT_EQ(c.out_dir, "somewhere");
  EXPECT_EQ(c.workers, 3u);
  EXPECT_EQ(c.sequential.dt, 0.01);
  EXPECT_FALSE(c.sequential.step_doubling);
  EXPECT_EQ(c.inner_max_iter, 9u);
  EXPECT_FALSE(c.damping);
  EXPECT_TRUE(c.coarse_jacobian);
  EXPECT_EQ(c.propagator().coarse_steps_per_window, 2u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, DefaultsMatchColpittsSetup) {
  const RunConfig c = parse("");
  EXPECT_EQ(c.problem, "colpitts");
  EXPECT_EQ(c.mode, Mode::PppcUp);
  EXPECT_EQ(c.windows, 10u);
  EXPECT_EQ(c.fine_steps_per_window(), 1000u);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, RejectsUnknownKeysSectionsAndValues) {
  EXPECT_THROW(parse("[run]\nwindowz = 3\n"), ConfigError);
  EXPECT_THROW(parse("[nope]\na = 1\n"), ConfigError);
  EXPECT_THROW(parse("[run]\nwindows = ten\n"), ConfigError);
  EXPECT_THROW(parse("[run]\nwindows = 10x\n"), ConfigError);
  EXPECT_THROW(parse("[run]\nmode = fast\n"), ConfigError);
  EXPECT_THROW(parse("[newton]\njacobian = exact\n"), ConfigError);
}

TEST(Config, ValidateGridInvariants) {
  RunConfig c;
  c.coarse_dtau = 0.2;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.fine_dtau = 0.03;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.outer_tol = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.workers = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = RunConfig{};
  c.windows = 3;
  c.coarse_dtau = 1.0 / 3.0;
  c.fine_dtau = 1.0 / 300.0;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.fine_steps_per_window(), 100u);
}

TEST(Config, ModeNamesRoundTrip) {
  for (Mode m : {Mode::Sequential, Mode::Shooting, Mode::Pppc, Mode::PppcUp}) {
    EXPECT_EQ(parse_mode(to_string(m)), m);
  }
}

TEST(Config, ParseVector) {
  EXPECT_EQ(parse_vector("1, 2.5,-3"), (Vector(3) << 1.0, 2.5, -3.0).finished());
  EXPECT_THROW(parse_vector("1,,2"), ConfigError);
  EXPECT_THROW(parse_vector(""), ConfigError);
}

TEST(Config, ShippedConfigsLoadAndValidate) {
  const std::filesystem::path dir = std::filesystem::path(PIT_SOURCE_DIR) / "tools" / "configs";
  for (const char* name : {"colpitts.ini", "vanderpol.ini", "harmonic.ini"}) {
    const RunConfig c = load_config(dir / name);
    EXPECT_NO_THROW(c.validate()) << name;
  }
}

TEST(Registry, KnownProblems) {
  const Problem c = make_problem("colpitts");
  EXPECT_EQ(c.system.dim(), 4u);
  EXPECT_EQ(c.u0.size(), 4);
  const Problem v = make_problem("vanderpol", {{"mu", 2.0}});
  EXPECT_EQ(v.system.dim(), 2u);
  const Problem h = make_problem("harmonic", {{"omega", 3.0}});
  EXPECT_NEAR(h.period0, 2.0 * std::numbers::pi / 3.0, 1e-15);
  EXPECT_THROW(make_problem("lorenz"), ConfigError);
  EXPECT_THROW(make_problem("vanderpol", {{"omega", 1.0}}), ConfigError);
}

TEST(Period, SineCrossings) {
  std::vector<double> t;
  std::vector<double> v;
  for (int i = 0; i <= 20000; ++i) {
    t.push_back(i * 1e-3);
    v.push_back(std::sin(2.0 * std::numbers::pi * t.back() / 0.7) + 0.2);
  }
  const PeriodEstimate e = detect_period_component(t, v, 0.5);
  EXPECT_NEAR(e.period_seconds, 0.7, 1e-6);
  EXPECT_GE(e.crossings_used, 3);
  EXPECT_LE(e.confidence_window, 1e-5);
}

TEST(Period, PicksLargestAmplitudeComponent) {
  std::vector<double> t;
  std::vector<Vector> s;
  for (int i = 0; i <= 10000; ++i) {
    t.push_back(i * 1e-3);
    Vector u(2);
    u << 1e-3 * std::sin(17.0 * t.back()), 5.0 * std::cos(2.0 * std::numbers::pi * t.back());
    s.push_back(u);
  }
  const PeriodEstimate e = detect_period(t, s, 0.5);
  EXPECT_EQ(e.component, 1u);
  EXPECT_NEAR(e.period_seconds, 1.0, 1e-6);
}

TEST(Period, NoOscillation) {
  std::vector<double> t;
  std::vector<double> v;
  for (int i = 0; i <= 1000; ++i) {
    t.push_back(i * 1e-2);
    v.push_back(std::exp(-t.back()));
  }
  try {
    detect_period_component(t, v);
    FAIL() << "expected NoOscillationDetected";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoOscillationDetected);
  }
}

TEST(SteadyState, SyntheticDecayingTransient) {
  // u(t) = sin(2 pi t) + 3 exp(-t): the defect falls below tol once
  // 3 exp(-t) (1 - e) is small.
  std::vector<double> t;
  std::vector<Vector> s;
  std::vector<std::uint64_t> units;
  for (int i = 0; i <= 40000; ++i) {
    t.push_back(i * 1e-3);
    Vector u(2);
    u << std::sin(2.0 * std::numbers::pi * t.back()) + 3.0 * std::exp(-t.back()),
        std::cos(2.0 * std::numbers::pi * t.back()) + 1.0;
    s.push_back(u);
    units.push_back(static_cast<std::uint64_t>(i));
  }
  const SteadyState st = find_steady_state(t, s, units, 1.0, 10, 1e-3);
  ASSERT_TRUE(st.reached);
  EXPECT_GE(st.time, 2.0);
  EXPECT_LE(st.defect, 1e-3);
  EXPECT_EQ(st.units, st.step);
  EXPECT_GT(st.time, 5.0);
  EXPECT_LT(st.time, 12.0);
  // One step earlier the defect was still above tol.
  const SteadyState before = find_steady_state(t, s, units, 1.0, 10, st.defect * 1.5);
  EXPECT_LE(before.step, st.step);
}

TEST(Sequential, HarmonicPeriod) {
  const Problem p = make_problem("harmonic");
  const SequentialResult r = sequential_reference(p.system, p.u0, p.seq_dt, p.seq_horizon, 0.3,
                                                  true, 10, 1e-3, PropagatorConfig{});
  EXPECT_NEAR(r.estimate.period_seconds, 1.0, 1e-3);
  EXPECT_LE(std::abs(r.estimate.period_seconds - 1.0), r.estimate.confidence_window + 1e-5);
}

TEST(Sequential, VanDerPolPeriodAndHorizonConsistency) {
  const Problem p = make_problem("vanderpol");
  const SequentialResult a = sequential_reference(p.system, p.u0, p.seq_dt, 100.0, 0.3, false, 10,
                                                  1e-3, PropagatorConfig{});
  const SequentialResult b = sequential_reference(p.system, p.u0, p.seq_dt, 200.0, 0.3, false, 10,
                                                  1e-3, PropagatorConfig{});
  EXPECT_NEAR(a.estimate.period_seconds, 6.663, 1e-2 * 6.663);
  EXPECT_NEAR(a.estimate.period_seconds, b.estimate.period_seconds,
              1e-4 * a.estimate.period_seconds);
}

TEST(Sequential, ColpittsPeriod) {
  const Problem p = make_problem("colpitts");
  const SequentialResult r = sequential_reference(p.system, p.u0, p.seq_dt, p.seq_horizon, 0.3,
                                                  false, 10, 1e-3, PropagatorConfig{});
  EXPECT_NEAR(r.estimate.period_seconds, 1.158e-4, 1e-2 * 1.158e-4);
  EXPECT_EQ(r.trajectory.times.size(), r.trajectory.states.size());
  EXPECT_EQ(r.trajectory.cumulative_units.front(), 0u);
  EXPECT_EQ(r.trajectory.cumulative_units.back(), r.trajectory.total.cost_units);
}

TEST(Speedup, Ratio) {
  EXPECT_DOUBLE_EQ(speedup(100, 40), 2.5);
  EXPECT_THROW(speedup(100, 0), std::exception);
}

TEST(Experiment, ColpittsPppcUpSummaryAndCsv) {
  RunConfig c;
  c.run_id = "t";
  c.out_dir = scratch("colpitts");
  c.sequential.baseline = true;
  const ExperimentSummary x = run_experiment(c);
  ASSERT_EQ(x.exit_code, 0) << x.error;
  EXPECT_EQ(x.status, "converged");
  ASSERT_TRUE(x.period_seconds);
  EXPECT_NEAR(*x.period_seconds, 1.158e-4, 1e-2 * 1.158e-4);
  EXPECT_LE(x.jump_norm_rel, c.outer_tol);
  EXPECT_EQ(x.effective_units, x.fine_units + x.coarse_units + x.block_units);
  ASSERT_TRUE(x.baseline);
  ASSERT_TRUE(x.baseline->reached);
  ASSERT_TRUE(x.speedup);
  EXPECT_DOUBLE_EQ(*x.speedup, static_cast<double>(x.baseline->units) /
                                   static_cast<double>(x.effective_units));

  const std::string csv = slurp(c.out_dir / "convergence.csv");
  const auto lines = std::count(csv.begin(), csv.end(), '\n');
  EXPECT_EQ(static_cast<std::size_t>(lines), x.csv_rows + 1);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "run_id,mode,k,s,T_seconds,jump_norm_rel,fine_units,coarse_units,block_units,"
            "cumulative_units");
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "summary.txt"));
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "trajectory.csv"));

  RunConfig c4 = c;
  c4.workers = 4;
  c4.out_dir = scratch("colpitts4");
  c4.sequential.baseline = false;
  const ExperimentSummary x4 = run_experiment(c4);
  EXPECT_EQ(slurp(c4.out_dir / "convergence.csv"), csv);
  EXPECT_EQ(x4.effective_units, x.effective_units);
}

TEST(Experiment, VanDerPolShootingMatchesSequential) {
  const RunConfig c =
      load_config(std::filesystem::path(PIT_SOURCE_DIR) / "tools" / "configs" / "vanderpol.ini");
  RunConfig local = c;
  local.out_dir.clear();
  const ExperimentSummary x = run_experiment(local);
  ASSERT_EQ(x.exit_code, 0) << x.error;
  ASSERT_TRUE(x.period_seconds);
  ASSERT_TRUE(x.estimate);
  EXPECT_NEAR(*x.period_seconds, x.estimate->period_seconds, 1e-2 * x.estimate->period_seconds);
}

TEST(Experiment, MaxIterExitCode) {
  RunConfig c;
  c.max_iter = 1;
  c.out_dir.clear();
  c.sequential.baseline = false;
  const ExperimentSummary x = run_experiment(c);
  EXPECT_EQ(x.exit_code, 2);
  EXPECT_EQ(x.status, "max-iter");
}

TEST(Experiment, SolverErrorExitCode) {
  RunConfig c;
  c.mode = Mode::Shooting;
  c.out_dir = scratch("err");
  c.stage_newton_tol = 1e-300;
  c.stage_newton_max_iter = 1;
  c.sequential.baseline = false;
  const ExperimentSummary x = run_experiment(c);
  EXPECT_EQ(x.exit_code, 3);
  EXPECT_EQ(x.status, "solver-error");
  EXPECT_FALSE(x.error.empty());
  EXPECT_TRUE(std::filesystem::exists(c.out_dir / "summary.txt"));
}

TEST(Experiment, InvalidConfigThrows) {
  RunConfig c;
  c.coarse_dtau = 0.3;
  EXPECT_THROW(run_experiment(c), ConfigError);
}

}  // namespace
}  // namespace pit::bench
