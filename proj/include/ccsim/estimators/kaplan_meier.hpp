#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "ccsim/core/error.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::estimators {

// Product-limit estimate of a survival function from right-censored data.
struct SurvivalEstimate {
  std::vector<double> event_times;  // distinct uncensored durations, ascending
  std::vector<double> survival;     // S(t) just after each event time
  std::vector<int> events;          // d_i
  std::vector<int> at_risk;         // n_i
  double tail_mass = 0.0;           // S after the last event time
  double max_observation = 0.0;     // largest duration, censored or not

  double cdf(std::size_t i) const { return 1.0 - survival[i]; }

  double survival_at(double t) const {
    const auto it = std::upper_bound(event_times.begin(), event_times.end(), t);
    if (it == event_times.begin()) return 1.0;
    return survival[static_cast<std::size_t>(it - event_times.begin()) - 1];
  }

  double hazard(std::size_t i) const { return static_cast<double>(events[i]) / static_cast<double>(at_risk[i]); }
};

// Censored observations tied with an event time are counted at risk at that time.
inline SurvivalEstimate kaplan_meier(std::span<const PatienceObservation> observations) {
  std::vector<PatienceObservation> sorted(observations.begin(), observations.end());
  for (const auto& o : sorted) {
    if (o.duration < 0.0) throw DataError("kaplan_meier: negative duration");
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.duration < b.duration; });
  SurvivalEstimate est;
  double s = 1.0;
  std::size_t i = 0;
  const std::size_t n = sorted.size();
  while (i < n) {
    const double t = sorted[i].duration;
    int d = 0;
    std::size_t j = i;
    for (; j < n && sorted[j].duration == t; ++j) {
      if (!sorted[j].censored) ++d;
    }
    if (d > 0) {
      const auto at_risk = static_cast<int>(n - i);
      s *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
      est.event_times.push_back(t);
      est.survival.push_back(s);
      est.events.push_back(d);
      est.at_risk.push_back(at_risk);
    }
    i = j;
  }
  if (est.event_times.empty()) throw DataError("kaplan_meier: every observation is censored");
  est.tail_mass = est.survival.back();
  est.max_observation = sorted.back().duration;
  return est;
}

struct ExponentialFit {
  double mean = 0.0;
  // The survival curve had mass left at the largest observation; the mean
  // integral stopped there.
  bool tail_truncated = false;
};

// Mean for an exponential patience model: the arithmetic mean when nothing is
// censored, otherwise the area under the KM survival curve up to the largest
// observation.
inline ExponentialFit fit_exponential(std::span<const PatienceObservation> observations) {
  const bool any_censored =
      std::any_of(observations.begin(), observations.end(), [](const auto& o) { return o.censored; });
  if (!any_censored) {
    if (observations.empty()) throw DataError("fit_exponential: no observations");
    double sum = 0.0;
    for (const auto& o : observations) sum += o.duration;
    return ExponentialFit{sum / static_cast<double>(observations.size()), false};
  }
  const SurvivalEstimate km = kaplan_meier(observations);
  double area = 0.0;
  double prev_t = 0.0;
  double prev_s = 1.0;
  for (std::size_t i = 0; i < km.event_times.size(); ++i) {
    area += (km.event_times[i] - prev_t) * prev_s;
    prev_t = km.event_times[i];
    prev_s = km.survival[i];
  }
  area += (km.max_observation - prev_t) * prev_s;
  return ExponentialFit{area, km.tail_mass > 0.0};
}

inline double fit_exponential(std::span<const double> durations) {
  if (durations.empty()) throw DataError("fit_exponential: no observations");
  double sum = 0.0;
  for (double d : durations) sum += d;
  return sum / static_cast<double>(durations.size());
}

inline Json to_json(const SurvivalEstimate& km) {
  Json j;
  j["event_times"] = km.event_times;
  j["survival"] = km.survival;
  j["events"] = km.events;
  j["at_risk"] = km.at_risk;
  j["tail_mass"] = km.tail_mass;
  j["max_observation"] = km.max_observation;
  return j;
}

inline SurvivalEstimate survival_from_json(const Json& j) {
  SurvivalEstimate km;
  km.event_times = j.at("event_times").get<std::vector<double>>();
  km.survival = j.at("survival").get<std::vector<double>>();
  km.events = j.value("events", std::vector<int>(km.event_times.size(), 0));
  km.at_risk = j.value("at_risk", std::vector<int>(km.event_times.size(), 0));
  km.tail_mass = j.at("tail_mass").get<double>();
  km.max_observation = j.value("max_observation", km.event_times.empty() ? 0.0 : km.event_times.back());
  if (km.event_times.size() != km.survival.size() || km.event_times.empty()) {
    throw DataError("survival curve: event_times and survival must be non-empty and equally long");
  }
  return km;
}

}  // namespace ccsim::estimators
