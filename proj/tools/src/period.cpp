#include "pit/bench/period.hpp"

#include <pit/errors.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pit::bench {

namespace {

double mean(const std::vector<double>& v, std::size_t a, std::size_t b) {
  return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(a),
                         v.begin() + static_cast<std::ptrdiff_t>(b), 0.0) /
         static_cast<double>(b - a);
}

std::size_t tail_start(const std::vector<double>& times, double fraction) {
  const double t_start = times.back() - fraction * (times.back() - times.front());
  return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t_start) -
                                  times.begin());
}

}  // namespace

PeriodEstimate detect_period_component(const std::vector<double>& times,
                                       const std::vector<double>& values, double fraction) {
  if (times.size() != values.size() || times.size() < 2) {
    throw SolverError(ErrorKind::InvalidArgument, "period detection needs matching samples");
  }
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "fraction must be in (0, 1]");
  }
  const std::size_t a = tail_start(times, fraction);
  const std::size_t n = times.size();
  if (n - a < 2) throw SolverError(ErrorKind::NoOscillationDetected, "tail has fewer than 2 samples");
  const double level = mean(values, a, n);

  std::vector<double> crossings;
  for (std::size_t i = a; i + 1 < n; ++i) {
    const double y0 = values[i] - level;
    const double y1 = values[i + 1] - level;
    if (y0 < 0.0 && y1 >= 0.0) {
      crossings.push_back(times[i] + (-y0) / (y1 - y0) * (times[i + 1] - times[i]));
    }
  }
  if (crossings.size() < 3) {
    throw SolverError(ErrorKind::NoOscillationDetected,
                      fmt::format("{} upward crossings in the tail, need 3", crossings.size()));
  }

  std::vector<double> gaps(crossings.size() - 1);
  for (std::size_t i = 0; i + 1 < crossings.size(); ++i) gaps[i] = crossings[i + 1] - crossings[i];
  const std::size_t m = gaps.size();
  const double p = mean(gaps, 0, m);
  double var = 0.0;
  for (double g : gaps) var += (g - p) * (g - p);
  var = m > 1 ? var / static_cast<double>(m - 1) : 0.0;

  PeriodEstimate e;
  e.period_seconds = p;
  e.crossings_used = static_cast<int>(crossings.size());
  e.standard_error = std::sqrt(var / static_cast<double>(m));
  e.drift = m >= 2 ? std::abs(mean(gaps, 0, m / 2) - mean(gaps, m - m / 2, m)) : 0.0;
  e.confidence_window = 2.0 * e.standard_error + e.drift;
  return e;
}

PeriodEstimate detect_period(const std::vector<double>& times, const std::vector<Vector>& states,
                             double fraction) {
  if (states.empty() || times.size() != states.size()) {
    throw SolverError(ErrorKind::InvalidArgument, "period detection needs matching samples");
  }
  const std::size_t a = tail_start(times, fraction);
  const auto d = static_cast<std::size_t>(states.front().size());
  std::size_t best = 0;
  double best_amp = -1.0;
  for (std::size_t j = 0; j < d; ++j) {
    double lo = states[a](static_cast<Eigen::Index>(j));
    double hi = lo;
    for (std::size_t i = a; i < states.size(); ++i) {
      lo = std::min(lo, states[i](static_cast<Eigen::Index>(j)));
      hi = std::max(hi, states[i](static_cast<Eigen::Index>(j)));
    }
    if (hi - lo > best_amp) {
      best_amp = hi - lo;
      best = j;
    }
  }
  std::vector<double> values(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) values[i] = states[i](static_cast<Eigen::Index>(best));
  PeriodEstimate e = detect_period_component(times, values, fraction);
  e.component = best;
  return e;
}

SteadyState find_steady_state(const std::vector<double>& times, const std::vector<Vector>& states,
                              const std::vector<std::uint64_t>& cumulative_units, double period,
                              std::size_t samples, double tol) {
  if (times.size() != states.size() || times.size() != cumulative_units.size() ||
      times.size() < 2) {
    throw SolverError(ErrorKind::InvalidArgument, "steady-state detection needs matching samples");
  }
  if (!(period > 0.0) || samples == 0 || !(tol > 0.0)) {
    throw SolverError(ErrorKind::InvalidArgument, "invalid steady-state settings");
  }
  const double t0 = times.front();
  const double dt = (times.back() - t0) / static_cast<double>(times.size() - 1);
  auto at = [&](double t) -> Vector {
    const double x = (t - t0) / dt;
    const auto i = std::min(static_cast<std::size_t>(x), times.size() - 2);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * states[i] + w * states[i + 1];
  };

  SteadyState s;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double t = times[i];
    if (t - t0 < 2.0 * period) continue;
    double num = 0.0;
    double den = 0.0;
    for (std::size_t m = 0; m < samples; ++m) {
      const double lag = period * static_cast<double>(m) / static_cast<double>(samples);
      const Vector cur = m == 0 ? states[i] : at(t - lag);
      num += (cur - at(t - lag - period)).squaredNorm();
      den += cur.squaredNorm();
    }
    const double defect = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
    if (defect <= tol) {
      s.reached = true;
      s.step = i;
      s.time = t;
      s.units = cumulative_units[i];
      s.defect = defect;
      return s;
    }
  }
  return s;
}

}  // namespace pit::bench
