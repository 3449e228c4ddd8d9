#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "ccsim/sim/replicate.hpp"
#include "support/erlang_a.hpp"
#include "support/fixtures.hpp"

using namespace ccsim;
using namespace ccsim::sim;

namespace {

EngineSetup one_group(std::vector<StaffingChange> staffing, double closing = 3600.0) {
  EngineSetup s;
  s.skill_count = 1;
  s.group_skills = {{0}};
  s.staffing = std::move(staffing);
  s.closing_time = closing;
  return s;
}

struct Recorder : NullHooks {
  std::vector<std::pair<std::size_t, std::size_t>> answers;  // (call, agent)
  std::vector<double> answer_times;
  std::vector<std::size_t> abandons;
  std::vector<std::pair<std::size_t, double>> offline;
  void on_answer(std::size_t call, std::size_t agent, double t) {
    answers.emplace_back(call, agent);
    answer_times.push_back(t);
  }
  void on_abandon(std::size_t call, double) { abandons.push_back(call); }
  void on_agent_offline(std::size_t agent, double t) { offline.emplace_back(agent, t); }
};

ModelConfig cfg_of(ArrivalMode a, HandlingMode h, AhtPerDay d, bool wrap, PatienceMode p, bool breaks) {
  return ModelConfig{a, h, d, wrap, p, breaks};
}

}  // namespace

TEST(Engine, SingleIdleAgentAnswersImmediately) {
  Engine e(one_group({{0.0, 0, 1}}));
  std::vector<CallSpec> calls = {{10.0, 0, kInfinity, 100.0, 0.0}};
  const auto m = e.run(calls);
  EXPECT_EQ(m.offered, 1);
  EXPECT_DOUBLE_EQ(m.sl(), 1.0);
  EXPECT_DOUBLE_EQ(m.ab(), 0.0);
  EXPECT_DOUBLE_EQ(m.asa(), 0.0);
}

TEST(Engine, NoAgentsEveryoneAbandons) {
  Engine e(one_group({{0.0, 0, 0}}));
  std::vector<CallSpec> calls = {{10.0, 0, 30.0, 100.0}, {20.0, 0, 5.0, 100.0}};
  const auto m = e.run(calls);
  EXPECT_DOUBLE_EQ(m.sl(), 0.0);
  EXPECT_DOUBLE_EQ(m.ab(), 1.0);
  EXPECT_DOUBLE_EQ(m.wait_abandoned, 35.0);
}

TEST(Engine, InfinitePatienceLeftInQueueIsUnresolved) {
  Engine e(one_group({{0.0, 0, 0}}));
  std::vector<CallSpec> calls = {{10.0, 0, kInfinity, 100.0}};
  const auto m = e.run(calls);
  EXPECT_EQ(m.unresolved, 1);
  EXPECT_EQ(m.abandoned, 0);
  EXPECT_DOUBLE_EQ(m.asa(), 0.0);
}

TEST(Engine, QueueDrainsAfterClosing) {
  Engine e(one_group({{0.0, 0, 1}}, 100.0));
  std::vector<CallSpec> calls = {{90.0, 0, kInfinity, 50.0}, {95.0, 0, kInfinity, 50.0}};
  const auto m = e.run(calls);
  EXPECT_EQ(m.answered(), 2);
  EXPECT_DOUBLE_EQ(m.wait_answered, 45.0);  // second call waits 95 -> 140
}

TEST(Engine, LongestIdleAgentGetsTheCall) {
  // Agent 1 frees at t=20, agent 0 at t=30; next arrival at 40 goes to agent 1.
  Engine e(one_group({{0.0, 0, 2}}));
  std::vector<CallSpec> calls = {{0.0, 0, kInfinity, 30.0}, {0.0, 0, kInfinity, 20.0}, {40.0, 0, kInfinity, 5.0}};
  Recorder r;
  e.run(calls, r);
  ASSERT_EQ(r.answers.size(), 3u);
  EXPECT_EQ(r.answers[0].second, 0u);  // equal idle-since: lower index first
  EXPECT_EQ(r.answers[1].second, 1u);
  EXPECT_EQ(r.answers[2].second, 1u);
}

TEST(Engine, FreedAgentTakesLongestWaitingCallAcrossSkills) {
  EngineSetup s;
  s.skill_count = 2;
  s.group_skills = {{0, 1}};
  s.staffing = {{0.0, 0, 1}};
  s.closing_time = 1000.0;
  Engine e(s);
  std::vector<CallSpec> calls = {{0.0, 0, kInfinity, 100.0}, {10.0, 1, kInfinity, 10.0}, {20.0, 0, kInfinity, 10.0}};
  Recorder r;
  e.run(calls, r);
  ASSERT_EQ(r.answers.size(), 3u);
  EXPECT_EQ(r.answers[1].first, 1u);  // skill 1 waited longer
  EXPECT_EQ(r.answers[2].first, 2u);
}

TEST(Engine, EqualWaitTieGoesToLowerSkill) {
  EngineSetup s;
  s.skill_count = 2;
  s.group_skills = {{0, 1}};
  s.staffing = {{0.0, 0, 1}};
  s.closing_time = 1000.0;
  Engine e(s);
  std::vector<CallSpec> calls = {{0.0, 0, kInfinity, 100.0}, {10.0, 0, kInfinity, 10.0}, {10.0, 1, kInfinity, 10.0}};
  Recorder r;
  e.run(calls, r);
  ASSERT_EQ(r.answers.size(), 3u);
  EXPECT_EQ(r.answers[1].first, 1u);
}

TEST(Engine, StaffingDecreaseRemovesIdleFirstAndBusyFinish) {
  // Two agents; agent 0 busy until 100. At t=50 staffing drops to 0: agent 1
  // (idle) leaves at once, agent 0 leaves at 100 after finishing.
  Engine e(one_group({{0.0, 0, 2}, {50.0, 0, 0}}, 1000.0));
  std::vector<CallSpec> calls = {{0.0, 0, kInfinity, 100.0}, {60.0, 0, 30.0, 10.0}};
  Recorder r;
  const auto m = e.run(calls, r);
  ASSERT_EQ(r.offline.size(), 2u);
  EXPECT_EQ(r.offline[0].first, 1u);
  EXPECT_DOUBLE_EQ(r.offline[0].second, 50.0);
  EXPECT_EQ(r.offline[1].first, 0u);
  EXPECT_DOUBLE_EQ(r.offline[1].second, 100.0);
  EXPECT_EQ(m.abandoned, 1);
}

TEST(Engine, StaffingDecreaseRemovesHighestIndexIdleAgent) {
  Engine e(one_group({{0.0, 0, 3}, {10.0, 0, 1}}, 100.0));
  std::vector<CallSpec> calls;
  Recorder r;
  e.run(calls, r);
  ASSERT_EQ(r.offline.size(), 2u);
  EXPECT_EQ(r.offline[0].first, 2u);
  EXPECT_EQ(r.offline[1].first, 1u);
}

TEST(Engine, LeavingAgentIsReinstatedOnIncrease) {
  Engine e(one_group({{0.0, 0, 1}, {10.0, 0, 0}, {20.0, 0, 1}}, 1000.0));
  std::vector<CallSpec> calls = {{0.0, 0, kInfinity, 100.0}, {30.0, 0, kInfinity, 10.0}};
  Recorder r;
  const auto m = e.run(calls, r);
  EXPECT_TRUE(r.offline.empty());
  EXPECT_EQ(m.answered(), 2);
  EXPECT_DOUBLE_EQ(r.answer_times[1], 100.0);
}

TEST(Engine, StaffingChangeBeforeArrivalAtSameTime) {
  Engine e(one_group({{0.0, 0, 0}, {50.0, 0, 1}}, 1000.0));
  std::vector<CallSpec> calls = {{50.0, 0, 0.0, 10.0}};
  const auto m = e.run(calls);
  EXPECT_EQ(m.answered_within_tta, 1);  // agent online at 50 takes it before zero patience fires
}

TEST(Engine, ServiceEndBeforeAbandonmentAtSameTime) {
  Engine e(one_group({{0.0, 0, 1}}, 1000.0));
  std::vector<CallSpec> calls = {{0.0, 0, kInfinity, 10.0}, {5.0, 0, 5.0, 10.0}};
  const auto m = e.run(calls);
  EXPECT_EQ(m.abandoned, 0);
  EXPECT_EQ(m.answered(), 2);
}

TEST(Engine, TimeToAnswerBoundaryIsInclusive) {
  Engine e(one_group({{0.0, 0, 1}}, 1000.0));
  std::vector<CallSpec> calls = {{0.0, 0, kInfinity, 60.0}, {0.0, 0, kInfinity, 1.0}, {0.5, 0, kInfinity, 1.0}};
  const auto m = e.run(calls);
  EXPECT_EQ(m.answered_within_tta, 2);  // waits 0 and exactly 60
  EXPECT_EQ(m.answered_late, 1);        // waits 60.5
}

TEST(Engine, RerunIsIndependentOfPreviousRun) {
  Engine e(one_group({{0.0, 0, 1}}, 1000.0));
  std::vector<CallSpec> a = {{0.0, 0, 10.0, 500.0}, {1.0, 0, 10.0, 5.0}};
  std::vector<CallSpec> b = {{0.0, 0, kInfinity, 5.0}};
  e.run(a);
  const auto m1 = e.run(b);
  Engine fresh(one_group({{0.0, 0, 1}}, 1000.0));
  EXPECT_EQ(m1, fresh.run(b));
}

TEST(Generate, IdenticalCopiesExactArrivals) {
  auto d = fixtures::single_skill_day(4, 900, 7, 1);
  RandomStream rng(1);
  EXPECT_EQ(generate_arrivals(d, ArrivalMode::kIdentical, rng), d.arrivals_exact);
}

TEST(Generate, IppZeroRateGivesNoArrivals) {
  auto d = fixtures::single_skill_day(3, 900, 0, 1);
  RandomStream rng(2);
  for (int r = 0; r < 100; ++r) EXPECT_TRUE(generate_arrivals(d, ArrivalMode::kIpp, rng)[0].empty());
}

TEST(Generate, IppPoissonMeanAndPlacement) {
  auto d = fixtures::single_skill_day(1, 1800, 20, 1);
  RandomStream rng(3);
  const int reps = 10000;
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto a = generate_arrivals(d, ArrivalMode::kIpp, rng)[0];
    total += static_cast<double>(a.size());
    for (double t : a) ASSERT_TRUE(t >= 0.0 && t < 1800.0);
    ASSERT_TRUE(std::is_sorted(a.begin(), a.end()));
  }
  EXPECT_NEAR(total / reps, 20.0, 3.0 * std::sqrt(20.0 / reps));
}

TEST(Sampling, SingleSampleListAlwaysReturnsIt) {
  auto d = fixtures::single_skill_day(1, 1800, 1, 1);
  ModelParameters p = fixtures::exp_params(100.0, std::nullopt);
  p.skills[0].ht_samples_year = {100.0};
  RandomStream rng(4);
  const ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kEmpirical, AhtPerDay::kNo, false, PatienceMode::kEmpirical, true);
  for (int i = 0; i < 50; ++i) EXPECT_DOUBLE_EQ(sample_handling_time(c, d, 0, p, rng), 100.0);
}

TEST(Sampling, ShortDayListFallsBackToYearly) {
  auto d = fixtures::single_skill_day(1, 1800, 1, 1);
  d.ht_samples_day = {{7.0, 7.0}};
  ModelParameters p = fixtures::exp_params(100.0, std::nullopt);
  std::vector<std::string> warnings;
  const ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kEmpirical, AhtPerDay::kYes, false, PatienceMode::kEmpirical, true);
  const auto h = resolve_handling(c, d, 0, p.find("S"), warnings);
  EXPECT_EQ(h.samples, std::vector<double>{100.0});
  EXPECT_EQ(warnings.size(), 1u);
}

TEST(Sampling, ExponentialDayMean) {
  auto d = fixtures::single_skill_day(1, 1800, 1, 1);
  d.ht_mean_day = {300.0};
  ModelParameters p = fixtures::exp_params(100.0, std::nullopt);
  const ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kYes, false, PatienceMode::kEmpirical, true);
  RandomStream rng(5);
  std::vector<std::string> w;
  const auto h = resolve_handling(c, d, 0, p.find("S"), w);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += h.draw(rng);
  EXPECT_NEAR(s / n, 300.0, 3.0);
}

TEST(Sampling, WrapupAddsConstant) {
  auto d = fixtures::single_skill_day(1, 1800, 1, 1);
  d.ht_mean_day = {300.0};
  d.wrapup_mean = 3.28;
  ModelParameters p = fixtures::exp_params(100.0, std::nullopt);
  const ModelConfig with = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kYes, true, PatienceMode::kEmpirical, true);
  ModelConfig without = with;
  without.wrapup = false;
  RandomStream r1(6), r2(6);
  for (int i = 0; i < 100; ++i) {
    EXPECT_NEAR(sample_handling_time(with, d, 0, p, r1) - sample_handling_time(without, d, 0, p, r2), 3.28, 1e-9);
  }
}

TEST(Sampling, FitWithoutFittedValueNamesField) {
  auto d = fixtures::single_skill_day(1, 1800, 1, 1);
  ModelParameters p = fixtures::exp_params(100.0, std::nullopt);
  const ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kFit, true, PatienceMode::kEmpirical, true);
  RandomStream rng(7);
  try {
    sample_handling_time(c, d, 0, p, rng);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("ht_fitted_day"), std::string::npos);
  }
}

TEST(Sampling, PatienceSingleEventTime) {
  ModelParameters p = fixtures::exp_params(100.0, std::nullopt);
  p.skills[0].patience_km = estimators::kaplan_meier(std::vector<PatienceObservation>{{30.0, false}});
  RandomStream rng(8);
  const ModelConfig c{};
  for (int i = 0; i < 100; ++i) EXPECT_DOUBLE_EQ(sample_patience(c, "S", p, rng), 30.0);
}

TEST(Sampling, PatienceTailMassIsInfinite) {
  // S drops to 0.25 at t=10 and stays there: 3 events at 10, one censored at 20.
  ModelParameters p = fixtures::exp_params(100.0, std::nullopt);
  p.skills[0].patience_km =
      estimators::kaplan_meier(std::vector<PatienceObservation>{{10, false}, {10, false}, {10, false}, {20, true}});
  ASSERT_DOUBLE_EQ(p.skills[0].patience_km->tail_mass, 0.25);
  RandomStream rng(9);
  const ModelConfig c{};
  int inf = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) inf += std::isinf(sample_patience(c, "S", p, rng));
  EXPECT_NEAR(static_cast<double>(inf) / n, 0.25, 4.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST(Sampling, PatienceExponentialMean) {
  ModelParameters p = fixtures::exp_params(100.0, 120.0);
  ModelConfig c{};
  c.patience = PatienceMode::kExponential;
  RandomStream rng(10);
  double s = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) s += sample_patience(c, "S", p, rng);
  EXPECT_NEAR(s / n, 120.0, 1.2);
}

TEST(Sampling, EmpiricalPatienceFollowsKmCdf) {
  std::vector<PatienceObservation> obs = {{5, false}, {10, true}, {15, false}, {20, false}, {25, true}, {30, false}};
  const auto km = estimators::kaplan_meier(obs);
  ModelParameters p = fixtures::exp_params(100.0, std::nullopt);
  p.skills[0].patience_km = km;
  RandomStream rng(11);
  const int n = 200000;
  std::vector<int> counts(km.event_times.size(), 0);
  for (int i = 0; i < n; ++i) {
    const double x = sample_patience(ModelConfig{}, "S", p, rng);
    for (std::size_t k = 0; k < km.event_times.size(); ++k) counts[k] += x == km.event_times[k];
  }
  double prev = 1.0;
  for (std::size_t k = 0; k < km.event_times.size(); ++k) {
    const double mass = prev - km.survival[k];
    EXPECT_NEAR(static_cast<double>(counts[k]) / n, mass, 4.0 * std::sqrt(mass * (1 - mass) / n));
    prev = km.survival[k];
  }
}

TEST(RunDay, ConservationAndDeterminism) {
  auto d = fixtures::single_skill_day(8, 1800, 200, 9);
  const auto p = fixtures::exp_params(90.0, 100.0);
  ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kNo, false, PatienceMode::kExponential, true);
  DaySimulator s(d, c, p);
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto m = s.run(r);
    EXPECT_EQ(m.offered, m.answered_within_tta + m.answered_late + m.abandoned + m.unresolved);
    EXPECT_EQ(m, s.run(r));
  }
  EXPECT_EQ(run_day(d, c, p, 42), run_day(d, c, p, 42));
}

TEST(RunDay, IdenticalArrivalOfferedEqualsRealizedCount) {
  auto d = fixtures::single_skill_day(6, 1800, 37, 5);
  const auto p = fixtures::exp_params(90.0, 100.0);
  ModelConfig c = cfg_of(ArrivalMode::kIdentical, HandlingMode::kExponential, AhtPerDay::kNo, true, PatienceMode::kExponential, true);
  EXPECT_EQ(run_day(d, c, p, 1).offered, d.total_arrivals());
}

TEST(RunDay, InfinitePatienceNeverAbandons) {
  auto d = fixtures::single_skill_day(4, 1800, 300, 8);
  const auto p = fixtures::exp_params(120.0, std::nullopt);
  ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kNo, false, PatienceMode::kEmpirical, true);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = run_day(d, c, p, seed);
    EXPECT_EQ(m.abandoned, 0);
    EXPECT_EQ(m.unresolved, 0);
    EXPECT_EQ(m.answered(), m.offered);
  }
}

TEST(RunDay, FcfsWaitsWithinSingleGroup) {
  // With a single group and infinite patience, answer order equals arrival order.
  auto d = fixtures::single_skill_day(4, 1800, 250, 7);
  const auto p = fixtures::exp_params(100.0, std::nullopt);
  ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kNo, false, PatienceMode::kEmpirical, true);
  DaySimulator s(d, c, p);
  Recorder r;
  s.run(3, r);
  for (std::size_t i = 1; i < r.answers.size(); ++i) EXPECT_LT(r.answers[i - 1].first, r.answers[i].first);
}

TEST(RunDay, ExtraAgentNeverHurtsWithCommonRandomNumbers) {
  auto d = fixtures::single_skill_day(6, 1800, 180, 6);
  auto more = d;
  for (auto& v : more.staffing[0]) ++v;
  const auto p = fixtures::exp_params(95.0, 150.0);
  ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kNo, false, PatienceMode::kExponential, true);
  DaySimulator a(d, c, p), b(more, c, p);
  for (std::uint64_t r = 0; r < 30; ++r) {
    const auto ma = a.run(r), mb = b.run(r);
    EXPECT_EQ(ma.offered, mb.offered);
    EXPECT_GE(mb.sl() + 1e-12, ma.sl());
  }
}

TEST(RunDay, BreaksFlagSelectsStaffingProfile) {
  auto d = fixtures::single_skill_day(2, 1800, 50, 0);
  d.staffing_no_breaks = {{5, 5}};
  const auto p = fixtures::exp_params(60.0, 30.0);
  ModelConfig c = cfg_of(ArrivalMode::kIdentical, HandlingMode::kExponential, AhtPerDay::kNo, false, PatienceMode::kExponential, true);
  EXPECT_EQ(run_day(d, c, p, 1).answered(), 0);
  c.breaks = false;
  EXPECT_GT(run_day(d, c, p, 1).answered(), 0);
}

TEST(Replicate, SingleReplicationSummary) {
  auto d = fixtures::single_skill_day(4, 1800, 100, 4);
  const auto p = fixtures::exp_params(100.0, 100.0);
  ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kNo, false, PatienceMode::kExponential, true);
  ReplicateOptions o;
  o.reps = 1;
  o.seed = 5;
  const auto r = replicate(d, c, p, o);
  ASSERT_EQ(r.runs.size(), 1u);
  for (Metric m : kAllMetrics) {
    EXPECT_DOUBLE_EQ(r.of(m).mean, r.runs[0].value(m));
    EXPECT_DOUBLE_EQ(r.of(m).q025, r.runs[0].value(m));
    EXPECT_DOUBLE_EQ(r.of(m).q975, r.runs[0].value(m));
  }
}

TEST(Replicate, DeterministicAcrossThreadCounts) {
  auto d = fixtures::single_skill_day(4, 1800, 100, 4);
  const auto p = fixtures::exp_params(100.0, 100.0);
  ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kNo, false, PatienceMode::kExponential, true);
  ReplicateOptions o;
  o.reps = 64;
  o.seed = 77;
  const auto a = replicate(d, c, p, o);
  o.threads = 4;
  const auto b = replicate(d, c, p, o);
  EXPECT_EQ(a.runs, b.runs);
  o.reps = 10;
  const auto prefix = replicate(d, c, p, o);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(prefix.runs[i], a.runs[i]);
}

TEST(Replicate, DeterministicScenarioHasZeroVariance) {
  auto d = fixtures::single_skill_day(4, 1800, 40, 2);
  auto p = fixtures::exp_params(100.0, std::nullopt);
  p.skills[0].ht_samples_year = {100.0};
  ModelConfig c = cfg_of(ArrivalMode::kIdentical, HandlingMode::kEmpirical, AhtPerDay::kNo, false, PatienceMode::kEmpirical, true);
  ReplicateOptions o;
  o.reps = 50;
  const auto r = replicate(d, c, p, o);
  for (Metric m : kAllMetrics) EXPECT_EQ(r.of(m).std, 0.0);
}

TEST(Replicate, ParallelForPropagatesExceptions) {
  EXPECT_THROW(parallel_for(100, 4, [](unsigned, std::size_t i) {
                 if (i == 37) throw DataError("boom");
               }),
               DataError);
}

TEST(Replicate, ZeroRepsIsAnError) {
  auto d = fixtures::single_skill_day(1, 1800, 1, 1);
  const auto p = fixtures::exp_params(100.0, 100.0);
  ReplicateOptions o;
  o.reps = 0;
  EXPECT_THROW(replicate(d, ModelConfig{}, p, o), ConfigError);
}

// Moderate-size version of the Erlang-A check; the acceptance suite runs the
// full-size one.
TEST(ErlangA, MatchesBirthDeathOracle) {
  const double lambda = 9.0 / 60.0, mu = 1.0 / 60.0, theta = 1.0 / 120.0;
  const int s = 10;
  const auto ref = oracle::erlang_a(lambda, mu, theta, s);
  EXPECT_NEAR(ref.p_abandon, theta * ref.mean_queue / lambda, 1e-9);

  const std::size_t intervals = 20;
  auto d = fixtures::single_skill_day(intervals, 1800, static_cast<int>(lambda * 1800), s);
  const auto p = fixtures::exp_params(60.0, 120.0);
  ModelConfig c = cfg_of(ArrivalMode::kIpp, HandlingMode::kExponential, AhtPerDay::kNo, false, PatienceMode::kExponential, true);
  DaySimulator sim(d, c, p);
  const double warmup = 1800.0, stop = d.horizon();
  std::vector<double> ab_rate, mean_wait;
  for (std::uint64_t r = 0; r < 8; ++r) {
    struct H : NullHooks {
      const std::vector<CallSpec>* calls;
      double warmup, stop;
      long offered = 0, abandoned = 0, answered = 0;
      double wait = 0.0;
      void on_answer(std::size_t c, std::size_t, double t) {
        const double a = (*calls)[c].arrival;
        if (a < warmup || a >= stop) return;
        ++answered;
        wait += t - a;
      }
      void on_abandon(std::size_t c, double) {
        const double a = (*calls)[c].arrival;
        if (a >= warmup && a < stop) ++abandoned;
      }
    } h;
    h.calls = &sim.calls();
    h.warmup = warmup;
    h.stop = stop;
    sim.run(derive_seed(1234, {r}), h);
    for (const auto& cs : sim.calls()) h.offered += cs.arrival >= warmup && cs.arrival < stop;
    ab_rate.push_back(static_cast<double>(h.abandoned) / static_cast<double>(h.offered));
    mean_wait.push_back(h.wait / static_cast<double>(h.answered));
  }
  const double se_ab = stats::sample_std(ab_rate) / std::sqrt(8.0);
  const double se_w = stats::sample_std(mean_wait) / std::sqrt(8.0);
  EXPECT_NEAR(stats::mean(ab_rate), ref.p_abandon, 4.0 * se_ab);
  EXPECT_NEAR(stats::mean(mean_wait), ref.mean_wait_served, 4.0 * se_w);
}
