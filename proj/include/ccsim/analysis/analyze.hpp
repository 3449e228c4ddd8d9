#pragma once

// Logs to model inputs: per-day scenarios, whole-period parameters and the
// descriptive estimates (lognormal HT fit, learning curves, patience KM,
// shrinkage, NHPP tests) with their CSV exports.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ccsim/core/csv.hpp"
#include "ccsim/estimators/kaplan_meier.hpp"
#include "ccsim/estimators/ks_test.hpp"
#include "ccsim/estimators/learning_curve.hpp"
#include "ccsim/estimators/lognormal_fit.hpp"
#include "ccsim/ingest/day_builder.hpp"
#include "ccsim/ingest/records.hpp"
#include "ccsim/scenario.hpp"
#include "ccsim/sim/parameters.hpp"

namespace ccsim::analysis {

using ingest::ActivityRecord;
using ingest::CallRecord;
using ingest::IngestConfig;

struct SkillAnalysis {
  std::string skill;
  std::size_t answered = 0;
  std::size_t abandoned = 0;
  std::vector<double> handling;  // every answered call, pooled over days
  std::optional<estimators::LognormalFit> lognormal;
  std::optional<estimators::SurvivalEstimate> patience_km;
  std::optional<estimators::ExponentialFit> patience_exp;
  std::vector<estimators::AgentLearningFit> learning;
  std::optional<estimators::DailyAhtFit> daily_aht;
};

struct NhppRow {
  CivilDate day;
  std::string skill;
  std::int64_t interval_seconds = 0;
  bool summed = false;
  estimators::NhppTestResult result;
};

struct NhppSummary {
  std::int64_t interval_seconds = 0;
  std::size_t tested = 0;
  std::size_t rejected = 0;
  std::size_t summed_tested = 0;
  std::size_t summed_rejected = 0;  // at 5%
};

struct AnalysisBundle {
  IngestConfig config;
  std::vector<std::string> skills;
  std::vector<AgentGroup> groups;
  std::map<std::string, std::size_t> group_of;
  std::vector<DayScenario> scenarios;
  sim::ModelParameters params;
  std::vector<SkillAnalysis> skill_stats;
  std::vector<ingest::RowReject> call_rejects;
  std::vector<ingest::RowReject> activity_rejects;
  std::size_t call_rows = 0;
  std::size_t activity_rows = 0;
  std::size_t unknown_activity_rows = 0;
  bool activities_present = false;
  std::optional<ingest::WrapupSummary> wrapups;
  std::optional<ingest::ShrinkageReport> shrinkage;
  std::vector<std::pair<ingest::Activity, double>> breaks;  // (kind, seconds)
  std::vector<NhppRow> nhpp;
  std::vector<NhppSummary> nhpp_summary;
  std::vector<std::string> warnings;
};

struct AnalyzeOptions {
  std::set<CivilDate> excluded;
  bool ks_jitter = false;
  std::uint64_t seed = 0;  // jitter stream only
};

namespace detail {

inline std::vector<std::string> select_skills(std::span<const CallRecord> calls, const IngestConfig& cfg) {
  if (!cfg.skills.empty()) return cfg.skills;
  std::set<std::string> seen;
  for (const auto& c : calls) seen.insert(c.skill);
  return {seen.begin(), seen.end()};
}

inline std::size_t skill_index(const std::vector<std::string>& skills, const std::string& s) {
  return static_cast<std::size_t>(std::find(skills.begin(), skills.end(), s) - skills.begin());
}

}  // namespace detail

inline AnalysisBundle analyze(const ingest::ParseResult<CallRecord>& calls,
                              const std::optional<ingest::ParseResult<ActivityRecord>>& activities,
                              const IngestConfig& cfg, const AnalyzeOptions& opts = {}) {
  AnalysisBundle b;
  b.config = cfg;
  b.call_rejects = calls.rejects;
  b.call_rows = calls.input_rows;
  b.activities_present = activities && !activities->records.empty();
  if (activities) {
    b.activity_rejects = activities->rejects;
    b.activity_rows = activities->input_rows;
    b.unknown_activity_rows = activities->unknown_activity_rows;
    if (b.unknown_activity_rows) {
      b.warnings.push_back(std::to_string(b.unknown_activity_rows) + " activity rows with unmapped names counted as 'other'");
    }
  }
  if (!b.activities_present) b.warnings.push_back("no activity records: staffing, wrap-up and break sections absent");

  b.skills = detail::select_skills(calls.records, cfg);
  if (b.skills.empty()) throw DataError("call log: no calls, nothing to analyze");
  const auto grouping = ingest::group_agents(calls.records, b.skills, cfg);
  b.groups = grouping.groups;
  b.group_of = grouping.group_of;

  const std::vector<ActivityRecord> no_activities;
  const auto& acts = b.activities_present ? activities->records : no_activities;
  auto days = ingest::partition_days(calls.records, acts, opts.excluded);

  // Whole-period wrap-up, breaks and shrinkage over the retained days.
  std::vector<ActivityRecord> kept_acts;
  for (const auto& d : days) kept_acts.insert(kept_acts.end(), d.activities.begin(), d.activities.end());
  if (b.activities_present) {
    b.wrapups = ingest::extract_wrapups(kept_acts);
    b.shrinkage = ingest::compute_shrinkage(kept_acts);
    for (const auto& a : kept_acts) {
      if (a.activity == ingest::Activity::kBreakPaid || a.activity == ingest::Activity::kBreakUnpaid) {
        b.breaks.emplace_back(a.activity, a.duration_seconds());
      }
    }
  }
  const double wrapup_mean = b.wrapups ? b.wrapups->mean : 0.0;

  // Per-skill pooled samples and learning data.
  const std::size_t ns = b.skills.size();
  b.skill_stats.resize(ns);
  std::vector<std::vector<PatienceObservation>> patience(ns);
  std::vector<std::map<std::pair<std::string, std::int64_t>, std::vector<double>>> learning(ns);
  for (std::size_t k = 0; k < ns; ++k) b.skill_stats[k].skill = b.skills[k];
  for (const auto& d : days) {
    for (const auto& c : d.calls) {
      const auto k = detail::skill_index(b.skills, c.skill);
      if (k == ns) continue;
      auto& st = b.skill_stats[k];
      if (c.is_answered()) {
        ++st.answered;
        st.handling.push_back(c.handling_seconds());
        patience[k].push_back({c.wait_seconds(), true});
        learning[k][{*c.agent, c.arrival.date().days_since_epoch()}].push_back(c.handling_seconds());
      } else {
        ++st.abandoned;
        patience[k].push_back({c.wait_seconds(), false});
      }
    }
  }

  b.params.wrapup_mean = wrapup_mean;
  for (std::size_t k = 0; k < ns; ++k) {
    auto& st = b.skill_stats[k];
    sim::SkillParameters sp;
    sp.skill = b.skills[k];
    sp.ht_samples_year = st.handling;
    if (!st.handling.empty()) {
      double s = 0.0;
      for (double h : st.handling) s += h;
      sp.ht_mean_year = s / static_cast<double>(st.handling.size());
      try {
        st.lognormal = estimators::fit_lognormal(st.handling, cfg.min_lognormal_duration);
      } catch (const DataError& e) {
        b.warnings.push_back("skill " + sp.skill + ": " + e.what());
      }
    } else {
      b.warnings.push_back("skill " + sp.skill + ": no answered calls, no handling-time sample");
    }
    if (st.abandoned > 0) {
      st.patience_km = estimators::kaplan_meier(patience[k]);
      st.patience_exp = estimators::fit_exponential(patience[k]);
      sp.patience_km = st.patience_km;
      sp.patience_mean = st.patience_exp->mean;
      sp.patience_mean_truncated = st.patience_exp->tail_truncated;
      if (sp.patience_mean_truncated) {
        b.warnings.push_back("skill " + sp.skill + ": KM curve has mass beyond the largest wait; exponential patience mean truncated there");
      }
    } else if (!patience[k].empty()) {
      b.warnings.push_back("skill " + sp.skill + ": no abandonments, patience treated as infinite");
    }
    std::vector<estimators::AgentDayCalls> ad;
    for (auto& [key, hts] : learning[k]) ad.push_back({key.first, key.second, hts});
    if (!ad.empty()) {
      st.learning = estimators::fit_agent_learning(ad);
      st.daily_aht = estimators::daily_aht_fit(st.learning, ad);
    }
    b.params.skills.push_back(std::move(sp));
  }

  // Per-day scenarios.
  const auto& staffed_group_of = b.group_of;
  std::set<std::string> unstaffed;
  for (const auto& d : days) {
    const auto layout = ingest::DayLayout::from(cfg, d.date);
    DayScenario s;
    s.date = d.date;
    s.opening_seconds = cfg.opening_seconds;
    s.interval_seconds = cfg.interval_seconds;
    s.interval_count = cfg.interval_count;
    s.skills = b.skills;
    s.groups = b.groups;
    auto bucket = ingest::bucket_arrivals(d.calls, b.skills, layout);
    s.arrivals_exact = std::move(bucket.arrivals_exact);
    s.arrival_counts = std::move(bucket.arrival_counts);
    s.clamped_arrivals = bucket.clamped;
    if (bucket.clamped) {
      b.warnings.push_back(d.date.iso() + ": " + std::to_string(bucket.clamped) + " arrivals outside opening hours moved to a boundary interval");
    }
    if (b.activities_present) {
      std::vector<ActivityRecord> own;
      for (const auto& a : d.activities) {
        if (staffed_group_of.contains(a.agent)) own.push_back(a);
        else unstaffed.insert(a.agent);
      }
      s.staffing = ingest::compute_staffing(own, staffed_group_of, b.groups.size(), layout, {true, cfg.subtract_unpaid_breaks});
      s.staffing_no_breaks = ingest::compute_staffing(own, staffed_group_of, b.groups.size(), layout, {false, cfg.subtract_unpaid_breaks});
    }
    s.ht_samples_day.assign(ns, {});
    s.ht_mean_day.assign(ns, 0.0);
    s.ht_fitted_day.assign(ns, std::nullopt);
    s.patience_observations.assign(ns, {});
    for (const auto& c : d.calls) {
      const auto k = detail::skill_index(b.skills, c.skill);
      if (k == ns) continue;
      if (c.is_answered()) s.ht_samples_day[k].push_back(c.handling_seconds());
      s.patience_observations[k].push_back({c.wait_seconds(), c.is_answered()});
    }
    for (std::size_t k = 0; k < ns; ++k) {
      const auto& hs = s.ht_samples_day[k];
      if (!hs.empty()) {
        double sum = 0.0;
        for (double h : hs) sum += h;
        s.ht_mean_day[k] = sum / static_cast<double>(hs.size());
      }
      if (b.skill_stats[k].daily_aht) s.ht_fitted_day[k] = b.skill_stats[k].daily_aht->fitted_for(d.date.days_since_epoch());
    }
    s.wrapup_mean = wrapup_mean;
    s.actual = ingest::actual_metrics(d.calls, b.skills, cfg.time_to_answer);
    check_scenario(s);

    RandomStream jitter(derive_seed(opts.seed, {static_cast<std::uint64_t>(Stream::kJitter), static_cast<std::uint64_t>(d.date.days_since_epoch())}));
    for (std::size_t k = 0; k < ns; ++k) {
      for (auto len : cfg.nhpp_interval_seconds) {
        const auto table = estimators::nhpp_day_tests(s.arrivals_exact[k], static_cast<double>(len), s.horizon(),
                                                      opts.ks_jitter ? &jitter : nullptr);
        for (const auto& r : table.intervals) b.nhpp.push_back({d.date, b.skills[k], len, false, r});
        b.nhpp.push_back({d.date, b.skills[k], len, true, table.summed});
      }
    }
    b.scenarios.push_back(std::move(s));
  }
  if (!unstaffed.empty()) {
    b.warnings.push_back(std::to_string(unstaffed.size()) + " agents in the activity log answered no selected skill and are left out of staffing");
  }
  for (auto len : cfg.nhpp_interval_seconds) {
    NhppSummary sum;
    sum.interval_seconds = len;
    for (const auto& r : b.nhpp) {
      if (r.interval_seconds != len || r.result.skipped) continue;
      if (r.summed) {
        ++sum.summed_tested;
        sum.summed_rejected += r.result.p_value < 0.05;
      } else {
        ++sum.tested;
        sum.rejected += r.result.rejected;
      }
    }
    b.nhpp_summary.push_back(sum);
  }
  return b;
}

inline Json to_json(const ingest::RowReject& r) { return Json{{"line", r.line}, {"reason", r.reason}}; }

// Summary bundle; scenarios and parameters are written separately.
inline Json to_json(const AnalysisBundle& b) {
  Json j;
  j["skills"] = b.skills;
  std::vector<std::size_t> agents(b.groups.size(), 0);
  for (const auto& [a, g] : b.group_of) ++agents[g];
  Json groups = Json::array();
  for (std::size_t g = 0; g < b.groups.size(); ++g) {
    Json names = Json::array();
    for (auto k : b.groups[g].skills) names.push_back(b.skills[k]);
    groups.push_back(Json{{"skills", names}, {"agents", agents[g]}});
  }
  j["groups"] = groups;
  j["days"] = b.scenarios.size();
  j["calls"] = {{"rows", b.call_rows}, {"rejected", b.call_rejects.size()}};
  j["activities"] = {{"present", b.activities_present},
                     {"rows", b.activity_rows},
                     {"rejected", b.activity_rejects.size()},
                     {"unknown_activity_rows", b.unknown_activity_rows}};
  Json skills = Json::array();
  for (const auto& s : b.skill_stats) {
    Json sj{{"skill", s.skill}, {"answered", s.answered}, {"abandoned", s.abandoned}};
    sj["lognormal"] = s.lognormal ? estimators::to_json(*s.lognormal) : Json(nullptr);
    if (s.patience_exp) {
      sj["patience"] = {{"exp_mean", s.patience_exp->mean},
                        {"tail_truncated", s.patience_exp->tail_truncated},
                        {"km_tail_mass", s.patience_km->tail_mass}};
    } else {
      sj["patience"] = nullptr;
    }
    if (s.daily_aht) {
      sj["daily_aht"] = {{"r_squared", s.daily_aht->r_squared}, {"overall_mean", s.daily_aht->overall_mean}};
      Json agents = Json::array();
      for (const auto& f : s.learning) agents.push_back({{"agent", f.agent}, {"alpha", f.alpha}, {"gamma", f.gamma}});
      sj["learning"] = agents;
    }
    skills.push_back(sj);
  }
  j["skill_stats"] = skills;
  j["wrapup"] = b.wrapups ? Json{{"count", b.wrapups->durations.size()}, {"mean", b.wrapups->mean}} : Json(nullptr);
  if (b.shrinkage) {
    j["shrinkage"] = {{"mean", b.shrinkage->mean}, {"agents", b.shrinkage->agents.size()}};
    j["breaks"] = {{"count", b.breaks.size()}};
  } else {
    j["shrinkage"] = nullptr;
    j["breaks"] = nullptr;
  }
  Json nhpp = Json::array();
  for (const auto& s : b.nhpp_summary) {
    nhpp.push_back({{"interval_minutes", s.interval_seconds / 60},
                    {"tested", s.tested},
                    {"rejected", s.rejected},
                    {"summed_tested", s.summed_tested},
                    {"summed_rejected", s.summed_rejected}});
  }
  j["nhpp"] = nhpp;
  j["warnings"] = b.warnings;
  return j;
}

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw DataError("cannot write " + p.string());
  out.precision(10);
  return out;
}

inline std::string clock(std::int64_t opening, double offset) {
  const auto s = opening + static_cast<std::int64_t>(offset);
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(s / 3600), static_cast<int>((s / 60) % 60));
  return buf;
}

}  // namespace detail

// CSV exports for external plotting; sections without data are skipped.
// Returns the file names written.
inline std::vector<std::string> write_exports(const AnalysisBundle& b, const std::filesystem::path& dir) {
  std::vector<std::string> written;
  auto open = [&](const char* name) {
    written.push_back(name);
    return detail::open_csv(dir / name);
  };
  {
    auto out = open("handling_times.csv");
    out << "skill,handling_seconds\n";
    for (const auto& s : b.skill_stats) {
      for (double h : s.handling) out << csv::escape(s.skill) << ',' << h << '\n';
    }
  }
  {
    auto out = open("patience_km.csv");
    out << "skill,time,at_risk,events,survival,cdf,hazard\n";
    for (const auto& s : b.skill_stats) {
      if (!s.patience_km) continue;
      const auto& km = *s.patience_km;
      for (std::size_t i = 0; i < km.event_times.size(); ++i) {
        out << csv::escape(s.skill) << ',' << km.event_times[i] << ',' << km.at_risk[i] << ',' << km.events[i] << ','
            << km.survival[i] << ',' << 1.0 - km.survival[i] << ','
            << static_cast<double>(km.events[i]) / static_cast<double>(km.at_risk[i]) << '\n';
      }
    }
  }
  {
    auto out = open("daily_aht.csv");
    out << "skill,date,calls,actual_aht,fitted_aht\n";
    for (const auto& s : b.skill_stats) {
      if (!s.daily_aht) continue;
      for (const auto& p : s.daily_aht->days) {
        out << csv::escape(s.skill) << ',' << CivilDate::from_days(p.day).iso() << ',' << p.calls << ',' << p.actual << ','
            << p.fitted << '\n';
      }
    }
  }
  {
    auto out = open("learning_fits.csv");
    out << "skill,agent,alpha,gamma,days\n";
    for (const auto& s : b.skill_stats) {
      for (const auto& f : s.learning) {
        out << csv::escape(s.skill) << ',' << csv::escape(f.agent) << ',' << f.alpha << ',' << f.gamma << ','
            << f.n_per_day.size() << '\n';
      }
    }
  }
  {
    // Shaped like the NHPP test table: per-interval rows, then the summed row.
    auto out = open("nhpp_tests.csv");
    out << "Skill,Date,Interval minutes,Time interval,N,p-value,Per-test level,Rejected,Skipped\n";
    for (const auto& r : b.nhpp) {
      const std::string label = r.summed ? "all intervals summed"
                                         : detail::clock(b.config.opening_seconds, r.result.start) + "-" +
                                               detail::clock(b.config.opening_seconds, r.result.end);
      out << csv::escape(r.skill) << ',' << r.day.iso() << ',' << r.interval_seconds / 60 << ',' << label << ','
          << r.result.n << ',' << r.result.p_value << ',' << r.result.per_test_level << ',' << r.result.rejected << ','
          << r.result.skipped << '\n';
    }
  }
  {
    auto out = open("rejects.csv");
    out << "log,line,reason,text\n";
    for (const auto& r : b.call_rejects) out << "calls," << r.line << ',' << csv::escape(r.reason) << ',' << csv::escape(r.text) << '\n';
    for (const auto& r : b.activity_rejects) {
      out << "activities," << r.line << ',' << csv::escape(r.reason) << ',' << csv::escape(r.text) << '\n';
    }
  }
  if (b.wrapups) {
    auto out = open("wrapup_times.csv");
    out << "wrapup_seconds\n";
    for (double d : b.wrapups->durations) out << d << '\n';
  }
  if (b.shrinkage) {
    auto out = open("break_durations.csv");
    out << "activity,seconds\n";
    for (const auto& [kind, secs] : b.breaks) out << ingest::to_string(kind) << ',' << secs << '\n';
    auto sh = open("shrinkage.csv");
    sh << "agent,break_seconds,productive_plus_break_seconds,shrinkage\n";
    for (const auto& a : b.shrinkage->agents) {
      sh << csv::escape(a.agent) << ',' << a.break_time << ',' << a.productive_plus_break_time << ',' << a.shrinkage << '\n';
    }
  }
  return written;
}

}  // namespace ccsim::analysis
