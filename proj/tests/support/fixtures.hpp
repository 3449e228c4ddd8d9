#pragma once

#include <string>
#include <vector>

#include "ccsim/scenario.hpp"
#include "ccsim/sim/parameters.hpp"

namespace fixtures {

// One skill, one group, constant staffing, `intervals` intervals.
inline ccsim::DayScenario single_skill_day(std::size_t intervals, std::int64_t interval_seconds, int arrivals_per_interval,
                                           int staff) {
  ccsim::DayScenario d;
  d.date = ccsim::CivilDate{2014, 1, 2};
  d.interval_seconds = interval_seconds;
  d.interval_count = intervals;
  d.skills = {"S"};
  d.groups = {ccsim::AgentGroup{{0}}};
  d.arrival_counts = {std::vector<int>(intervals, arrivals_per_interval)};
  d.arrivals_exact = {{}};
  for (std::size_t i = 0; i < intervals; ++i) {
    for (int j = 0; j < arrivals_per_interval; ++j) {
      d.arrivals_exact[0].push_back(static_cast<double>(i) * static_cast<double>(interval_seconds) +
                                    (j + 0.5) * static_cast<double>(interval_seconds) / arrivals_per_interval);
    }
  }
  d.staffing = {std::vector<int>(intervals, staff)};
  d.staffing_no_breaks = d.staffing;
  d.ht_samples_day = {{}};
  d.ht_mean_day = {0.0};
  d.ht_fitted_day = {std::nullopt};
  d.patience_observations = {{}};
  return d;
}

inline ccsim::sim::ModelParameters exp_params(double ht_mean, std::optional<double> patience_mean) {
  ccsim::sim::ModelParameters p;
  ccsim::sim::SkillParameters s;
  s.skill = "S";
  s.ht_mean_year = ht_mean;
  s.ht_samples_year = {ht_mean};
  s.patience_mean = patience_mean;
  p.skills.push_back(s);
  return p;
}

}  // namespace fixtures
