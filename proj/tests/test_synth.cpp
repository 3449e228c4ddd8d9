#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ccsim/analysis/analyze.hpp"
#include "ccsim/sim/day_simulator.hpp"
#include "ccsim/synth/direct.hpp"
#include "ccsim/synth/reality.hpp"

using namespace ccsim;

namespace {

synth::SyntheticSpec small_spec() {
  synth::SyntheticSpec s;
  s.n_days = 3;
  s.interval_count = 24;
  synth::SkillSpec k;
  k.name = "S1";
  k.rates.assign(24, 30.0);
  k.mu_log = 5.2;
  k.sigma_log = 0.6;
  k.patience = {{1.0}, {240.0}};
  s.skills = {k};
  s.groups = {{{"S1"}, {{8 * 3600, 20 * 3600, 9}}}};
  return s;
}

struct Ingested {
  ingest::ParseResult<ingest::CallRecord> calls;
  std::optional<ingest::ParseResult<ingest::ActivityRecord>> activities;
  ingest::IngestConfig cfg;
};

Ingested reingest(const synth::SyntheticSpec& spec, const synth::RealityLogs& logs, bool with_activities = true) {
  Ingested out;
  out.cfg = synth::ingest_config_for(spec).get<ingest::IngestConfig>();
  std::stringstream calls, acts;
  synth::write_call_log(calls, logs.calls);
  out.calls = ingest::parse_call_log(calls, out.cfg);
  if (with_activities) {
    synth::write_activity_log(acts, logs.activities);
    out.activities = ingest::parse_activity_log(acts, out.cfg);
  }
  return out;
}

analysis::AnalysisBundle run_analysis(const Ingested& in) { return analysis::analyze(in.calls, in.activities, in.cfg); }

std::string dump_logs(const synth::RealityLogs& logs) {
  std::stringstream os;
  synth::write_call_log(os, logs.calls);
  synth::write_activity_log(os, logs.activities);
  return os.str();
}

}  // namespace

TEST(SyntheticSpec, ParsesJsonAndRejectsBadWeights) {
  const auto j = Json::parse(R"({"n_days": 2, "interval_count": 4,
    "skills": [{"name": "A", "rate": 5, "patience": {"kind": "mixture", "weights": [0.3, 0.7], "means": [30, 300]}}],
    "groups": [{"skills": ["A"], "shifts": [{"start": "08:00", "end": "10:00", "agents": 2}]}]})");
  const auto s = synth::spec_from_json(j);
  EXPECT_EQ(s.skills[0].rates, std::vector<double>(4, 5.0));
  EXPECT_DOUBLE_EQ(s.skills[0].patience.mean(), 0.3 * 30 + 0.7 * 300);
  EXPECT_EQ(s.groups[0].shifts[0].end, 10 * 3600);

  auto bad = j;
  bad["skills"][0]["patience"]["weights"] = {0.3, 0.6};
  EXPECT_THROW(synth::spec_from_json(bad), ConfigError);
  bad = j;
  bad["groups"][0]["skills"] = {"B"};
  EXPECT_THROW(synth::spec_from_json(bad), ConfigError);
  bad = j;
  bad["skills"][0]["rate"] = -1;
  EXPECT_THROW(synth::spec_from_json(bad), ConfigError);
}

TEST(SyntheticSpec, JsonRoundTrip) {
  const auto s = small_spec();
  const auto back = synth::spec_from_json(synth::to_json(s));
  EXPECT_EQ(synth::to_json(back), synth::to_json(s));
}

TEST(Reality, SameSeedSameLogs) {
  auto spec = small_spec();
  spec.breaks.rate_per_hour = 0.5;
  spec.wrapup = {5.0, 0.3};
  EXPECT_EQ(dump_logs(synth::generate_reality(spec, 11)), dump_logs(synth::generate_reality(spec, 11)));
  EXPECT_NE(dump_logs(synth::generate_reality(spec, 11)), dump_logs(synth::generate_reality(spec, 12)));
}

TEST(Reality, ZeroBreakPropensityWritesNoBreaks) {
  const auto logs = synth::generate_reality(small_spec(), 3);
  for (const auto& a : logs.activities) {
    EXPECT_NE(a.activity, ingest::Activity::kBreakPaid);
    EXPECT_NE(a.activity, ingest::Activity::kBreakUnpaid);
  }
  EXPECT_FALSE(logs.activities.empty());
}

TEST(Reality, BreakDurationsPeakAtFiveTenFifteen) {
  auto spec = small_spec();
  spec.n_days = 10;
  spec.breaks.rate_per_hour = 0.6;
  const auto logs = synth::generate_reality(spec, 5);
  std::size_t n = 0, near_peak = 0;
  for (const auto& a : logs.activities) {
    if (a.activity != ingest::Activity::kBreakPaid) continue;
    ++n;
    const double minutes = static_cast<double>(a.end.epoch_seconds - a.start.epoch_seconds) / 60.0;
    if (std::abs(minutes - 5) < 2 || std::abs(minutes - 10) < 2 || std::abs(minutes - 15) < 2) ++near_peak;
  }
  ASSERT_GT(n, 200u);
  EXPECT_GT(static_cast<double>(near_peak) / static_cast<double>(n), 0.97);
}

TEST(Reality, IngestedCountsMatchGroundTruth) {
  auto spec = small_spec();
  spec.breaks.rate_per_hour = 0.3;
  const auto logs = synth::generate_reality(spec, 21);
  const auto b = run_analysis(reingest(spec, logs));
  ASSERT_EQ(b.scenarios.size(), logs.days.size());
  for (std::size_t d = 0; d < logs.days.size(); ++d) {
    EXPECT_EQ(b.scenarios[d].date, logs.days[d].date);
    EXPECT_EQ(b.scenarios[d].arrival_counts, logs.days[d].arrivals);
  }
  EXPECT_TRUE(b.call_rejects.empty());
  EXPECT_TRUE(b.activity_rejects.empty());
}

// Poisson moments: per-interval mean and dispersion of ingested counts over many seeds.
TEST(Reality, IngestedCountsArePoissonInExpectation) {
  auto spec = small_spec();
  spec.n_days = 1;
  spec.interval_count = 6;
  spec.skills[0].rates = {5, 10, 20, 40, 20, 10};
  spec.groups[0].shifts = {{8 * 3600, 11 * 3600, 12}};
  const int seeds = 300;
  std::vector<double> sum(6, 0.0), sq(6, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto logs = synth::generate_reality(spec, 1000 + static_cast<std::uint64_t>(s));
    const auto b = run_analysis(reingest(spec, logs, false));
    ASSERT_EQ(b.scenarios.size(), 1u);
    for (std::size_t i = 0; i < 6; ++i) {
      const double c = b.scenarios[0].arrival_counts[0][i];
      sum[i] += c;
      sq[i] += c * c;
    }
  }
  for (std::size_t i = 0; i < 6; ++i) {
    const double rate = spec.skills[0].rates[i];
    const double mean = sum[i] / seeds;
    const double var = (sq[i] - seeds * mean * mean) / (seeds - 1);
    EXPECT_NEAR(mean, rate, 4.0 * std::sqrt(rate / seeds)) << "interval " << i;
    // var/mean of a Poisson sample has sd about sqrt(2/(n-1))
    EXPECT_NEAR(var / rate, 1.0, 4.0 * std::sqrt(2.0 / (seeds - 1))) << "interval " << i;
  }
}

TEST(RoundTrip, LognormalParametersRecovered) {
  auto spec = small_spec();
  spec.n_days = 20;
  const auto logs = synth::generate_reality(spec, 8);
  const auto b = run_analysis(reingest(spec, logs));
  ASSERT_EQ(b.skill_stats.size(), 1u);
  ASSERT_TRUE(b.skill_stats[0].lognormal);
  // about 14000 calls: standard errors near 0.005
  EXPECT_NEAR(b.skill_stats[0].lognormal->mu_log, 5.2, 0.03);
  EXPECT_NEAR(b.skill_stats[0].lognormal->sigma_log, 0.6, 0.03);
}

TEST(RoundTrip, ExponentialPatienceRecovered) {
  auto spec = small_spec();
  spec.n_days = 20;
  spec.groups[0].shifts[0].agents = 4;  // 3.6 Erlang offered: heavy abandonment
  const auto logs = synth::generate_reality(spec, 9);
  const auto b = run_analysis(reingest(spec, logs));
  ASSERT_TRUE(b.skill_stats[0].patience_exp);
  ASSERT_GT(b.skill_stats[0].abandoned, 300u);
  EXPECT_NEAR(b.skill_stats[0].patience_exp->mean, 240.0, 240.0 * 0.2);
}

TEST(RoundTrip, ShrinkageFromPaidBreaks) {
  auto spec = small_spec();
  spec.n_days = 10;
  spec.breaks.rate_per_hour = 0.5;
  const auto logs = synth::generate_reality(spec, 4);
  double break_seconds = 0.0;
  for (const auto& a : logs.activities) {
    if (a.activity == ingest::Activity::kBreakPaid) break_seconds += static_cast<double>(a.end.epoch_seconds - a.start.epoch_seconds);
  }
  const double shift_seconds = 10.0 * 9 * 12 * 3600;
  const auto b = run_analysis(reingest(spec, logs));
  ASSERT_TRUE(b.shrinkage);
  EXPECT_NEAR(b.shrinkage->mean, break_seconds / shift_seconds, 0.01);
  // breaks-subtracted staffing never exceeds the no-breaks count
  for (const auto& d : b.scenarios) {
    for (std::size_t i = 0; i < d.interval_count; ++i) EXPECT_LE(d.staffing[0][i], d.staffing_no_breaks[0][i]);
  }
}

TEST(RoundTrip, EmpiricalModelReplaysOfferedCounts) {
  auto spec = small_spec();
  spec.breaks.rate_per_hour = 0.3;
  spec.wrapup = {4.0, 0.5};
  const auto logs = synth::generate_reality(spec, 17);
  const auto b = run_analysis(reingest(spec, logs));
  const auto cfg = models::preset("Empirical Model");
  for (const auto& day : b.scenarios) {
    sim::DaySimulator s(day, cfg, b.params);
    for (std::uint64_t r = 0; r < 3; ++r) {
      const auto m = s.run(r);
      EXPECT_EQ(m.offered, day.actual->offered);
      EXPECT_EQ(m.offered, day.total_arrivals());
    }
  }
}

TEST(RoundTrip, EmptyActivityLogMarksSectionsAbsent) {
  const auto spec = small_spec();
  const auto logs = synth::generate_reality(spec, 2);
  auto in = reingest(spec, logs);
  in.activities->records.clear();
  const auto b = run_analysis(in);
  EXPECT_FALSE(b.activities_present);
  EXPECT_FALSE(b.wrapups);
  EXPECT_FALSE(b.shrinkage);
  EXPECT_EQ(b.scenarios.size(), spec.n_days);
  for (const auto& d : b.scenarios) EXPECT_TRUE(d.staffing.empty());
  const auto j = analysis::to_json(b);
  EXPECT_TRUE(j["wrapup"].is_null());
  EXPECT_TRUE(j["breaks"].is_null());
  EXPECT_TRUE(j["shrinkage"].is_null());
}

TEST(RoundTrip, NhppTableHasPerIntervalAndSummedRows) {
  const auto spec = small_spec();
  const auto b = run_analysis(reingest(spec, synth::generate_reality(spec, 6)));
  std::size_t per = 0, summed = 0;
  for (const auto& r : b.nhpp) (r.summed ? summed : per)++;
  EXPECT_GT(per, 0u);
  EXPECT_GT(summed, 0u);
  ASSERT_FALSE(b.nhpp_summary.empty());
  EXPECT_EQ(b.nhpp_summary[0].summed_tested, spec.n_days);
}

TEST(DirectSynthesis, StructureAndDeterminism) {
  synth::DirectSpec s;
  s.n_days = 5;
  s.rates.assign(4, 20.0);
  s.staffing.assign(4, 5);
  s.break_shrinkage = 0.07;
  s.aht_day_variation = 0.15;
  const auto a = synth::synthesize_days(s, 1);
  const auto b = synth::synthesize_days(s, 1);
  ASSERT_EQ(a.days.size(), 5u);
  for (std::size_t d = 0; d < 5; ++d) {
    EXPECT_EQ(to_json(a.days[d]), to_json(b.days[d]));
    EXPECT_NO_THROW(check_scenario(a.days[d]));
    EXPECT_EQ(a.days[d].staffing_no_breaks[0][0], 5);  // round(5 / 0.93) = 5
    EXPECT_GE(a.aht_factor[d], 0.85);
    EXPECT_LE(a.aht_factor[d], 1.15);
    ASSERT_TRUE(a.days[d].actual);
    EXPECT_EQ(a.days[d].actual->offered, a.days[d].total_arrivals());
  }
  s.staffing.assign(4, 14);
  EXPECT_EQ(synth::synthesize_days(s, 1).days[0].staffing_no_breaks[0][0], 15);  // 14 / 0.93 = 15.05
}
