#pragma once

// Per-day compilation: partitioning logs into days, arrival bucketing,
// effective staffing, wrap-up and shrinkage statistics.

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ccsim/ingest/records.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::ingest {

struct DayLayout {
  CivilDate date;
  std::int64_t opening_seconds = 8 * 3600;
  std::int64_t interval_seconds = 1800;
  std::size_t interval_count = 24;

  static DayLayout from(const IngestConfig& cfg, CivilDate date) {
    return DayLayout{date, cfg.opening_seconds, cfg.interval_seconds, cfg.interval_count};
  }
  std::int64_t interval_start(std::size_t i) const noexcept {
    return Timestamp::from_parts(date, opening_seconds).epoch_seconds + static_cast<std::int64_t>(i) * interval_seconds;
  }
  double offset_of(Timestamp t) const noexcept {
    return static_cast<double>(t.epoch_seconds - Timestamp::from_parts(date, opening_seconds).epoch_seconds);
  }
  double horizon() const noexcept { return static_cast<double>(interval_seconds * static_cast<std::int64_t>(interval_count)); }
};

struct DaySkeleton {
  CivilDate date;
  std::vector<CallRecord> calls;
  std::vector<ActivityRecord> activities;
};

// One ISO date per line; blank lines and '#' comments are ignored.
inline std::set<CivilDate> parse_exclusion_calendar(std::istream& in) {
  std::set<CivilDate> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto body = std::string_view(line).substr(0, line.find('#'));
    body = csv::trim(body);
    if (body.empty()) continue;
    const auto d = CivilDate::parse_iso(body);
    if (!d) throw DataError("exclusion calendar line " + std::to_string(line_no) + ": not an ISO date");
    out.insert(*d);
  }
  return out;
}

// Groups calls by arrival date and activities by start date; days listed in
// the exclusion calendar are dropped. Output is in date order.
inline std::vector<DaySkeleton> partition_days(std::span<const CallRecord> calls, std::span<const ActivityRecord> activities,
                                               const std::set<CivilDate>& excluded) {
  std::map<CivilDate, DaySkeleton> days;
  for (const auto& c : calls) {
    const CivilDate d = c.arrival.date();
    if (excluded.contains(d)) continue;
    auto& day = days[d];
    day.date = d;
    day.calls.push_back(c);
  }
  for (const auto& a : activities) {
    const CivilDate d = a.start.date();
    if (excluded.contains(d)) continue;
    auto& day = days[d];
    day.date = d;
    day.activities.push_back(a);
  }
  std::vector<DaySkeleton> out;
  out.reserve(days.size());
  for (auto& [date, day] : days) out.push_back(std::move(day));
  return out;
}

struct BucketedArrivals {
  std::vector<std::vector<double>> arrivals_exact;
  std::vector<std::vector<int>> arrival_counts;
  std::int64_t clamped = 0;      // arrivals outside opening hours, moved to a boundary
  std::int64_t unselected = 0;   // calls of skills not in the skill list
};

inline BucketedArrivals bucket_arrivals(std::span<const CallRecord> calls, const std::vector<std::string>& skills,
                                        const DayLayout& layout) {
  BucketedArrivals out;
  out.arrivals_exact.assign(skills.size(), {});
  out.arrival_counts.assign(skills.size(), std::vector<int>(layout.interval_count, 0));
  const double horizon = layout.horizon();
  for (const auto& c : calls) {
    const auto it = std::find(skills.begin(), skills.end(), c.skill);
    if (it == skills.end()) {
      ++out.unselected;
      continue;
    }
    const auto k = static_cast<std::size_t>(it - skills.begin());
    double t = layout.offset_of(c.arrival);
    if (t < 0.0 || t > horizon) {
      ++out.clamped;
      t = std::clamp(t, 0.0, horizon);
    }
    out.arrivals_exact[k].push_back(t);
    ++out.arrival_counts[k][interval_of(t, layout.interval_seconds, layout.interval_count)];
  }
  for (auto& list : out.arrivals_exact) std::sort(list.begin(), list.end());
  return out;
}

struct AgentGrouping {
  std::vector<AgentGroup> groups;
  std::map<std::string, std::size_t> group_of;  // agent -> index into groups
};

// Skill sets come from IngestConfig::agent_skills when listed, otherwise from
// the selected skills the agent answered anywhere in the call log. Agents with
// an empty skill set are left out. Groups are ordered by their skill vectors.
inline AgentGrouping group_agents(std::span<const CallRecord> calls, const std::vector<std::string>& skills,
                                  const IngestConfig& cfg) {
  auto index_of = [&](const std::string& skill) -> std::optional<std::size_t> {
    const auto it = std::find(skills.begin(), skills.end(), skill);
    if (it == skills.end()) return std::nullopt;
    return static_cast<std::size_t>(it - skills.begin());
  };
  std::map<std::string, std::set<std::size_t>> sets;
  for (const auto& c : calls) {
    if (!c.agent || cfg.agent_skills.contains(*c.agent)) continue;
    if (auto k = index_of(c.skill)) sets[*c.agent].insert(*k);
  }
  for (const auto& [agent, list] : cfg.agent_skills) {
    auto& s = sets[agent];
    for (const auto& skill : list) {
      if (auto k = index_of(skill)) s.insert(*k);
    }
  }
  AgentGrouping out;
  if (cfg.pooled_staffing) {
    std::set<std::size_t> all;
    for (const auto& [agent, s] : sets) {
      if (s.empty()) continue;
      all.insert(s.begin(), s.end());
      out.group_of[agent] = 0;
    }
    if (!all.empty()) out.groups.push_back(AgentGroup{{all.begin(), all.end()}});
    return out;
  }
  std::map<std::vector<std::size_t>, std::vector<std::string>> by_set;
  for (const auto& [agent, s] : sets) {
    if (!s.empty()) by_set[{s.begin(), s.end()}].push_back(agent);
  }
  for (const auto& [skill_set, agents] : by_set) {
    for (const auto& a : agents) out.group_of[a] = out.groups.size();
    out.groups.push_back(AgentGroup{skill_set});
  }
  return out;
}

struct StaffingOptions {
  bool subtract_breaks = true;
  bool subtract_unpaid_breaks = true;
};

// Effective agents per group and interval: seconds spent taking calls or in
// wrap-up (plus break time when breaks are not subtracted) divided by the
// interval length, rounded to nearest with halves away from zero. Any other
// activity (meetings, logging in, other skills) never counts as working time.
inline std::vector<std::vector<int>> compute_staffing(std::span<const ActivityRecord> activities,
                                                      const std::map<std::string, std::size_t>& group_of,
                                                      std::size_t group_count, const DayLayout& layout,
                                                      StaffingOptions opts) {
  std::vector<std::vector<double>> seconds(group_count, std::vector<double>(layout.interval_count, 0.0));
  for (const auto& a : activities) {
    const auto it = group_of.find(a.agent);
    if (it == group_of.end()) throw ConfigError("agent '" + a.agent + "' has no skill-set entry");
    bool working = false;
    switch (a.activity) {
      case Activity::kTakingCalls:
      case Activity::kWrapUp: working = true; break;
      case Activity::kBreakPaid: working = !opts.subtract_breaks; break;
      case Activity::kBreakUnpaid: working = !(opts.subtract_breaks && opts.subtract_unpaid_breaks); break;
      default: break;
    }
    if (!working) continue;
    for (std::size_t i = 0; i < layout.interval_count; ++i) {
      const std::int64_t lo = layout.interval_start(i);
      const std::int64_t hi = lo + layout.interval_seconds;
      const std::int64_t overlap = std::min(hi, a.end.epoch_seconds) - std::max(lo, a.start.epoch_seconds);
      if (overlap > 0) seconds[it->second][i] += static_cast<double>(overlap);
    }
  }
  std::vector<std::vector<int>> out(group_count, std::vector<int>(layout.interval_count, 0));
  for (std::size_t g = 0; g < group_count; ++g) {
    for (std::size_t i = 0; i < layout.interval_count; ++i) {
      out[g][i] = static_cast<int>(std::lround(seconds[g][i] / static_cast<double>(layout.interval_seconds)));
    }
  }
  return out;
}

struct WrapupSummary {
  std::vector<double> durations;
  double mean = 0.0;  // 0 when there are no wrap-ups
};

inline WrapupSummary summarize_wrapups(std::vector<double> durations) {
  WrapupSummary out;
  out.durations = std::move(durations);
  double sum = 0.0;
  for (double d : out.durations) sum += d;
  out.mean = out.durations.empty() ? 0.0 : sum / static_cast<double>(out.durations.size());
  return out;
}

// All wrap-up records, zero-length ones included.
inline WrapupSummary extract_wrapups(std::span<const ActivityRecord> activities) {
  std::vector<double> d;
  for (const auto& a : activities) {
    if (a.activity == Activity::kWrapUp) d.push_back(a.duration_seconds());
  }
  return summarize_wrapups(std::move(d));
}

struct ShrinkageStat {
  std::string agent;
  double break_time = 0.0;
  double productive_plus_break_time = 0.0;
  double shrinkage = 0.0;
};

struct ShrinkageReport {
  std::vector<ShrinkageStat> agents;  // ordered by agent id
  double mean = 0.0;                  // unweighted mean over agents
  std::vector<std::string> excluded;  // zero denominator
};

// Per agent: paid break time / (taking calls + wrap-up + paid break time).
inline ShrinkageReport compute_shrinkage(std::span<const ActivityRecord> activities) {
  std::map<std::string, std::pair<double, double>> acc;  // agent -> (breaks, productive)
  for (const auto& a : activities) {
    auto& [breaks, productive] = acc[a.agent];
    switch (a.activity) {
      case Activity::kBreakPaid: breaks += a.duration_seconds(); break;
      case Activity::kTakingCalls:
      case Activity::kWrapUp: productive += a.duration_seconds(); break;
      default: break;
    }
  }
  ShrinkageReport out;
  double sum = 0.0;
  for (const auto& [agent, bp] : acc) {
    const double denom = bp.first + bp.second;
    if (denom <= 0.0) {
      out.excluded.push_back(agent);
      continue;
    }
    out.agents.push_back(ShrinkageStat{agent, bp.first, denom, bp.first / denom});
    sum += bp.first / denom;
  }
  out.mean = out.agents.empty() ? 0.0 : sum / static_cast<double>(out.agents.size());
  return out;
}

// Realized day performance straight from the call log.
inline DayMetrics actual_metrics(std::span<const CallRecord> calls, const std::vector<std::string>& skills,
                                 double time_to_answer) {
  DayMetrics m;
  for (const auto& c : calls) {
    if (std::find(skills.begin(), skills.end(), c.skill) == skills.end()) continue;
    ++m.offered;
    const double w = c.wait_seconds();
    if (c.is_answered()) {
      if (w <= time_to_answer) ++m.answered_within_tta;
      else ++m.answered_late;
      m.wait_answered += w;
    } else {
      ++m.abandoned;
      m.wait_abandoned += w;
    }
  }
  return m;
}

}  // namespace ccsim::ingest
