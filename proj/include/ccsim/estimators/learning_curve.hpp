#pragma once

// Agent learning-curve model for average handling time: agent j on day t
// (counted from the agent's first working day) has expected handling time
// alpha_j * exp(-gamma_j * t). Per agent, (alpha, gamma) minimise the squared
// error over all individual calls. The daily skill-level AHT is the
// call-weighted mean of the agents' predictions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ccsim/core/error.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::estimators {

struct AgentDayCalls {
  std::string agent;
  std::int64_t day = 0;  // absolute day number (e.g. days since epoch)
  std::vector<double> handling;
};

struct AgentLearningFit {
  std::string agent;
  std::int64_t origin_day = 0;  // t = 0
  double alpha = 0.0;
  double gamma = 0.0;
  std::map<std::int64_t, int> n_per_day;  // t -> n_jt
  double sse = 0.0;

  double predict(std::int64_t absolute_day) const {
    return alpha * std::exp(-gamma * static_cast<double>(absolute_day - origin_day));
  }
};

struct LearningFitOptions {
  double gamma_max = 0.1;
  double tolerance = 1e-6;
  std::size_t grid_points = 101;
};

namespace detail {

struct DayMoments {
  double t = 0.0;
  double n = 0.0;
  double sum = 0.0;
  double sumsq = 0.0;
};

inline double best_alpha(std::span<const DayMoments> days, double gamma) {
  double num = 0.0, den = 0.0;
  for (const auto& d : days) {
    const double e = std::exp(-gamma * d.t);
    num += e * d.sum;
    den += d.n * e * e;
  }
  return den > 0.0 ? num / den : 0.0;
}

inline double sse(std::span<const DayMoments> days, double alpha, double gamma) {
  double total = 0.0;
  for (const auto& d : days) {
    const double b = alpha * std::exp(-gamma * d.t);
    total += d.n * b * b - 2.0 * b * d.sum + d.sumsq;
  }
  return std::max(total, 0.0);
}

inline double profiled_sse(std::span<const DayMoments> days, double gamma) {
  return sse(days, best_alpha(days, gamma), gamma);
}

}  // namespace detail

// Fits one agent from its per-day calls. Fewer than two distinct days leaves
// gamma unidentifiable: gamma = 0 and alpha = the mean handling time.
inline AgentLearningFit fit_single_agent(std::string agent, std::span<const AgentDayCalls> calls,
                                         const LearningFitOptions& opts = {}) {
  std::map<std::int64_t, detail::DayMoments> by_day;
  for (const auto& c : calls) {
    auto& m = by_day[c.day];
    for (double h : c.handling) {
      m.n += 1.0;
      m.sum += h;
      m.sumsq += h * h;
    }
  }
  std::erase_if(by_day, [](const auto& kv) { return kv.second.n == 0.0; });
  if (by_day.empty()) throw DataError("fit_agent_learning: agent '" + agent + "' has no calls");
  AgentLearningFit fit;
  fit.agent = std::move(agent);
  fit.origin_day = by_day.begin()->first;
  std::vector<detail::DayMoments> days;
  for (auto& [day, m] : by_day) {
    m.t = static_cast<double>(day - fit.origin_day);
    days.push_back(m);
    fit.n_per_day[day - fit.origin_day] = static_cast<int>(m.n);
  }
  if (days.size() < 2) {
    fit.alpha = days[0].sum / days[0].n;
    fit.gamma = 0.0;
    fit.sse = detail::sse(days, fit.alpha, 0.0);
    return fit;
  }
  // Coarse scan to bracket the minimum, then golden-section refinement.
  const std::size_t grid = std::max<std::size_t>(opts.grid_points, 3);
  const double step = opts.gamma_max / static_cast<double>(grid - 1);
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid; ++i) {
    const double v = detail::profiled_sse(days, step * static_cast<double>(i));
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = step * static_cast<double>(best == 0 ? 0 : best - 1);
  double hi = step * static_cast<double>(std::min(best + 1, grid - 1));
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = detail::profiled_sse(days, x1);
  double f2 = detail::profiled_sse(days, x2);
  while (hi - lo > opts.tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = detail::profiled_sse(days, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = detail::profiled_sse(days, x2);
    }
  }
  double gamma = 0.5 * (lo + hi);
  double value = detail::profiled_sse(days, gamma);
  for (double candidate : {0.0, step * static_cast<double>(best)}) {
    const double v = detail::profiled_sse(days, candidate);
    if (v < value) {
      value = v;
      gamma = candidate;
    }
  }
  fit.gamma = gamma;
  fit.alpha = detail::best_alpha(days, gamma);
  fit.sse = value;
  return fit;
}

// One fit per agent, ordered by agent id.
inline std::vector<AgentLearningFit> fit_agent_learning(std::span<const AgentDayCalls> calls,
                                                        const LearningFitOptions& opts = {}) {
  std::map<std::string, std::vector<AgentDayCalls>> by_agent;
  for (const auto& c : calls) by_agent[c.agent].push_back(c);
  std::vector<AgentLearningFit> out;
  for (const auto& [agent, list] : by_agent) {
    if (std::all_of(list.begin(), list.end(), [](const auto& c) { return c.handling.empty(); })) continue;
    out.push_back(fit_single_agent(agent, list, opts));
  }
  return out;
}

struct DailyAhtPoint {
  std::int64_t day = 0;
  std::int64_t calls = 0;
  double fitted = 0.0;  // beta_t
  double actual = 0.0;  // s_t
};

struct DailyAhtFit {
  std::vector<DailyAhtPoint> days;  // ascending day, days without calls skipped
  double overall_mean = 0.0;        // s-bar, call-weighted over every call
  // 1 - sum (s_t - beta_t)^2 / sum (s_t - s_bar)^2; 1 when both sums vanish, 0 when only the denominator does.
  double r_squared = 0.0;

  std::optional<double> fitted_for(std::int64_t day) const {
    for (const auto& p : days) {
      if (p.day == day) return p.fitted;
    }
    return std::nullopt;
  }
};

inline DailyAhtFit daily_aht_fit(std::span<const AgentLearningFit> fits, std::span<const AgentDayCalls> calls) {
  std::map<std::string, const AgentLearningFit*> fit_of;
  for (const auto& f : fits) fit_of[f.agent] = &f;
  struct Acc {
    double n = 0, weighted_beta = 0, sum = 0;
  };
  std::map<std::int64_t, Acc> by_day;
  double grand_sum = 0.0, grand_n = 0.0;
  for (const auto& c : calls) {
    if (c.handling.empty()) continue;
    const auto it = fit_of.find(c.agent);
    if (it == fit_of.end()) throw DataError("daily_aht_fit: no learning fit for agent '" + c.agent + "'");
    auto& acc = by_day[c.day];
    const double n = static_cast<double>(c.handling.size());
    double s = 0.0;
    for (double h : c.handling) s += h;
    acc.n += n;
    acc.weighted_beta += n * it->second->predict(c.day);
    acc.sum += s;
    grand_sum += s;
    grand_n += n;
  }
  DailyAhtFit out;
  if (grand_n == 0.0) return out;
  out.overall_mean = grand_sum / grand_n;
  double num = 0.0, den = 0.0;
  for (const auto& [day, acc] : by_day) {
    DailyAhtPoint p{day, static_cast<std::int64_t>(acc.n), acc.weighted_beta / acc.n, acc.sum / acc.n};
    num += (p.actual - p.fitted) * (p.actual - p.fitted);
    den += (p.actual - out.overall_mean) * (p.actual - out.overall_mean);
    out.days.push_back(p);
  }
  out.r_squared = den > 0.0 ? 1.0 - num / den : (num == 0.0 ? 1.0 : 0.0);
  return out;
}

}  // namespace ccsim::estimators
