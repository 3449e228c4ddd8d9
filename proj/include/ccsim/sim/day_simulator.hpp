#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccsim/core/rng.hpp"
#include "ccsim/scenario.hpp"
#include "ccsim/sim/engine.hpp"
#include "ccsim/sim/model_config.hpp"
#include "ccsim/sim/parameters.hpp"
#include "ccsim/sim/sampling.hpp"

namespace ccsim::sim {

struct SimOptions {
  double time_to_answer = 60.0;
};

// Arrival times per skill for one replication: an exact copy of the day's
// arrivals, or per interval a Poisson(count) number of points placed
// uniformly in that interval.
inline std::vector<std::vector<double>> generate_arrivals(const DayScenario& day, ArrivalMode mode, RandomStream& rng) {
  if (mode == ArrivalMode::kIdentical) {
    if (day.arrivals_exact.size() != day.skills.size()) {
      throw DataError("scenario " + day.date.iso() + " lacks field 'arrivals_exact' (needed for Identical arrivals)");
    }
    return day.arrivals_exact;
  }
  std::vector<std::vector<double>> out(day.skills.size());
  const auto len = static_cast<double>(day.interval_seconds);
  for (std::size_t k = 0; k < day.skills.size(); ++k) {
    for (std::size_t i = 0; i < day.interval_count; ++i) {
      const auto n = rng.poisson(day.arrival_counts[k][i]);
      const double lo = static_cast<double>(i) * len;
      for (std::int64_t j = 0; j < n; ++j) out[k].push_back(lo + len * rng.uniform());
    }
    std::sort(out[k].begin(), out[k].end());
  }
  return out;
}

// Staffing changes at interval boundaries for the selected staffing profile.
inline std::vector<StaffingChange> staffing_changes(const DayScenario& day, const std::vector<std::vector<int>>& profile) {
  std::vector<StaffingChange> out;
  for (std::size_t i = 0; i < day.interval_count; ++i) {
    for (std::size_t g = 0; g < profile.size(); ++g) {
      if (i == 0 || profile[g][i] != profile[g][i - 1]) {
        out.push_back(StaffingChange{static_cast<double>(i) * static_cast<double>(day.interval_seconds),
                                     static_cast<std::uint32_t>(g), profile[g][i]});
      }
    }
  }
  return out;
}

inline EngineSetup engine_setup(const DayScenario& day, const ModelConfig& cfg, const SimOptions& opts) {
  const auto& profile = cfg.breaks ? day.staffing : day.staffing_no_breaks;
  if (profile.size() != day.groups.size()) {
    throw DataError("scenario " + day.date.iso() + " lacks field '" +
                    std::string(cfg.breaks ? "staffing" : "staffing_no_breaks") + "'");
  }
  EngineSetup setup;
  setup.skill_count = day.skills.size();
  for (const auto& g : day.groups) {
    std::vector<std::uint32_t> skills(g.skills.begin(), g.skills.end());
    std::sort(skills.begin(), skills.end());
    setup.group_skills.push_back(std::move(skills));
  }
  setup.staffing = staffing_changes(day, profile);
  setup.closing_time = day.horizon();
  setup.time_to_answer = opts.time_to_answer;
  return setup;
}

// Simulates one day under one model. Each replication is driven by a single
// 64-bit key from which the arrival, handling-time and patience streams are
// derived; handling and patience are drawn per call in arrival order, so two
// runs with the same key share their durations whatever the staffing.
class DaySimulator {
 public:
  DaySimulator(const DayScenario& day, const ModelConfig& cfg, const ModelParameters& params, SimOptions opts = {})
      : day_(&day), cfg_(cfg), samplers_(resolve_samplers(cfg, day, params)), engine_(engine_setup(day, cfg, opts)) {
    cfg_.validate();
  }

  const std::vector<std::string>& warnings() const noexcept { return samplers_.warnings; }
  const DayScenario& scenario() const noexcept { return *day_; }

  // Calls of one replication, sorted by (arrival, skill).
  const std::vector<CallSpec>& draw_calls(std::uint64_t replication_key) {
    RandomStream arrivals_rng(derive_seed(replication_key, {static_cast<std::uint64_t>(Stream::kArrivals)}));
    RandomStream handling_rng(derive_seed(replication_key, {static_cast<std::uint64_t>(Stream::kHandling)}));
    RandomStream patience_rng(derive_seed(replication_key, {static_cast<std::uint64_t>(Stream::kPatience)}));
    const auto per_skill = generate_arrivals(*day_, cfg_.arrival, arrivals_rng);
    calls_.clear();
    for (std::size_t k = 0; k < per_skill.size(); ++k) {
      for (double t : per_skill[k]) calls_.push_back(CallSpec{t, static_cast<std::uint32_t>(k)});
    }
    std::stable_sort(calls_.begin(), calls_.end(), [](const CallSpec& a, const CallSpec& b) {
      return a.arrival < b.arrival || (a.arrival == b.arrival && a.skill < b.skill);
    });
    for (auto& c : calls_) {
      c.patience = samplers_.patience[c.skill].draw(patience_rng);
      c.handling = samplers_.handling[c.skill].draw(handling_rng);
    }
    return calls_;
  }

  DayMetrics run(std::uint64_t replication_key) {
    draw_calls(replication_key);
    return engine_.run(std::span<const CallSpec>(calls_));
  }

  // Same run with engine hooks; calls() holds the replication's calls.
  template <typename Hooks>
  DayMetrics run(std::uint64_t replication_key, Hooks&& hooks) {
    draw_calls(replication_key);
    return engine_.run(std::span<const CallSpec>(calls_), std::forward<Hooks>(hooks));
  }

  const std::vector<CallSpec>& calls() const noexcept { return calls_; }

 private:
  const DayScenario* day_;
  ModelConfig cfg_;
  ResolvedSamplers samplers_;
  Engine engine_;
  std::vector<CallSpec> calls_;
};

// Single replication keyed by (seed, day, replication 0).
inline DayMetrics run_day(const DayScenario& day, const ModelConfig& cfg, const ModelParameters& params,
                          std::uint64_t seed, SimOptions opts = {}) {
  DaySimulator sim(day, cfg, params, opts);
  return sim.run(derive_seed(seed, {static_cast<std::uint64_t>(day.date.days_since_epoch()), 0, 0}));
}

}  // namespace ccsim::sim
