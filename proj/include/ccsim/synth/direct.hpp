#pragma once

// Scenario-level synthesis for experiments with a known truth: single-skill
// days whose realized arrivals, handling-time samples and staffing are drawn
// from stated distributions, and whose "actual" performance is one run of a
// reality model on the realized arrivals.

#include <cmath>
#include <cstdint>
#include <vector>

#include "ccsim/estimators/kaplan_meier.hpp"
#include "ccsim/models/presets.hpp"
#include "ccsim/scenario.hpp"
#include "ccsim/sim/day_simulator.hpp"
#include "ccsim/sim/replicate.hpp"

namespace ccsim::synth {

struct DirectSpec {
  std::size_t n_days = 200;
  CivilDate start{2014, 1, 6};
  std::int64_t interval_seconds = 1800;
  std::vector<double> rates;    // expected arrivals per interval
  std::vector<int> staffing;    // agents on the phone per interval, breaks already subtracted
  double break_shrinkage = 0.0; // staffing_no_breaks = round(staffing / (1 - shrinkage))
  double ht_mu_log = 5.0;
  double ht_sigma_log = 0.8;
  double aht_day_variation = 0.0;  // day factor ~ U(1 - v, 1 + v)
  double patience_mean = 300.0;    // exponential
  std::size_t patience_sample = 5000;
  double wrapup_mean = 0.0;
  sim::ModelConfig reality = models::preset("Empirical Model");
};

struct DirectSynthesis {
  std::vector<DayScenario> days;
  sim::ModelParameters params;
  std::vector<double> aht_factor;  // [day]
};

inline DirectSynthesis synthesize_days(const DirectSpec& spec, std::uint64_t seed) {
  if (spec.rates.empty() || spec.rates.size() != spec.staffing.size()) {
    throw ConfigError("direct synthesis: rates and staffing need one entry per interval");
  }
  if (spec.break_shrinkage < 0.0 || spec.break_shrinkage >= 1.0) throw ConfigError("direct synthesis: shrinkage must be in [0, 1)");
  DirectSynthesis out;
  const std::size_t n = spec.rates.size();
  const auto len = static_cast<double>(spec.interval_seconds);

  RandomStream prng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::kReality), 0}));
  std::vector<PatienceObservation> patience;
  for (std::size_t i = 0; i < spec.patience_sample; ++i) patience.push_back({prng.exponential(spec.patience_mean), false});
  sim::SkillParameters sp;
  sp.skill = "S";
  sp.patience_km = estimators::kaplan_meier(patience);
  sp.patience_mean = spec.patience_mean;

  std::vector<int> no_breaks;
  for (int s : spec.staffing) no_breaks.push_back(static_cast<int>(std::lround(s / (1.0 - spec.break_shrinkage))));

  for (std::size_t d = 0; d < spec.n_days; ++d) {
    DayScenario day;
    day.date = CivilDate::from_days(spec.start.days_since_epoch() + static_cast<std::int64_t>(d));
    RandomStream rng(derive_seed(seed, {static_cast<std::uint64_t>(Stream::kReality), 1,
                                        static_cast<std::uint64_t>(day.date.days_since_epoch())}));
    day.interval_seconds = spec.interval_seconds;
    day.interval_count = n;
    day.skills = {"S"};
    day.groups = {AgentGroup{{0}}};
    day.arrival_counts = {std::vector<int>(n, 0)};
    day.arrivals_exact = {{}};
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = rng.poisson(spec.rates[i]);
      day.arrival_counts[0][i] = static_cast<int>(a);
      for (std::int64_t j = 0; j < a; ++j) day.arrivals_exact[0].push_back((static_cast<double>(i) + rng.uniform()) * len);
    }
    std::sort(day.arrivals_exact[0].begin(), day.arrivals_exact[0].end());
    day.staffing = {spec.staffing};
    day.staffing_no_breaks = {no_breaks};
    const double v = spec.aht_day_variation;
    const double factor = v > 0.0 ? rng.uniform(1.0 - v, 1.0 + v) : 1.0;
    out.aht_factor.push_back(factor);
    std::vector<double> ht;
    const auto samples = std::max<std::int64_t>(day.total_arrivals(), 5);
    for (std::int64_t j = 0; j < samples; ++j) ht.push_back(factor * rng.lognormal(spec.ht_mu_log, spec.ht_sigma_log));
    double sum = 0.0;
    for (double h : ht) sum += h;
    day.ht_mean_day = {sum / static_cast<double>(ht.size())};
    day.ht_fitted_day = {factor * std::exp(spec.ht_mu_log + 0.5 * spec.ht_sigma_log * spec.ht_sigma_log)};
    sp.ht_samples_year.insert(sp.ht_samples_year.end(), ht.begin(), ht.end());
    day.ht_samples_day = {std::move(ht)};
    day.patience_observations = {{}};
    day.wrapup_mean = spec.wrapup_mean;
    out.days.push_back(std::move(day));
  }
  double sum = 0.0;
  for (double h : sp.ht_samples_year) sum += h;
  sp.ht_mean_year = sum / static_cast<double>(sp.ht_samples_year.size());
  out.params.skills.push_back(std::move(sp));
  out.params.wrapup_mean = spec.wrapup_mean;

  for (auto& day : out.days) {
    sim::DaySimulator reality(day, spec.reality, out.params);
    day.actual = reality.run(sim::replication_key(seed, day.date, sim::Purpose::kReality, 0));
  }
  return out;
}

}  // namespace ccsim::synth
