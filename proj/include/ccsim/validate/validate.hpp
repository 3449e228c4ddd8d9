#pragma once

// Simulation versus actual: per-day comparisons, MAE / coverage / median
// exceedance tables, and the model-error decomposition
//   measured = E_S S(A(L)) - X(L),   noise = E_S S(A2(L)) - S(A(L)),
// with mu = mean(measured) - mean(noise), sigma^2 = var(measured) - var(noise)
// and the MAE of N(mu, sigma).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ccsim/core/rng.hpp"
#include "ccsim/core/stats.hpp"
#include "ccsim/models/presets.hpp"
#include "ccsim/scenario.hpp"
#include "ccsim/sim/replicate.hpp"

namespace ccsim::validate {

using sim::MetricSummary;

struct DayComparison {
  CivilDate day;
  DayMetrics actual;
  std::array<MetricSummary, 3> sim{};  // indexed by Metric
  std::size_t reps = 0;

  double actual_value(Metric m, AsaBasis basis = AsaBasis::kAnsweredCalls) const { return actual.value(m, basis); }
  const MetricSummary& of(Metric m) const { return sim[static_cast<std::size_t>(m)]; }
};

inline std::size_t idx(Metric m) { return static_cast<std::size_t>(m); }

inline double mean_signed_error(const std::vector<DayComparison>& days, Metric m) {
  if (days.empty()) return 0.0;
  double s = 0.0;
  for (const auto& d : days) s += d.of(m).mean - d.actual_value(m);
  return s / static_cast<double>(days.size());
}

inline double mae(const std::vector<DayComparison>& days, Metric m) {
  if (days.empty()) return 0.0;
  double s = 0.0;
  for (const auto& d : days) s += std::abs(d.of(m).mean - d.actual_value(m));
  return s / static_cast<double>(days.size());
}

// Fraction of days whose actual lies in the central 95% replication interval.
inline double coverage(const std::vector<DayComparison>& days, Metric m, std::vector<std::string>* warnings = nullptr) {
  if (days.empty()) return 0.0;
  std::size_t inside = 0;
  bool few = false;
  for (const auto& d : days) {
    const double x = d.actual_value(m);
    inside += (x >= d.of(m).q025 && x <= d.of(m).q975);
    few = few || d.reps < 40;
  }
  if (few && warnings) warnings->push_back("coverage: fewer than 40 replications on some days, 95% interval is unreliable");
  return static_cast<double>(inside) / static_cast<double>(days.size());
}

// Fraction of days whose actual is strictly above the simulated median.
inline double median_exceedance(const std::vector<DayComparison>& days, Metric m) {
  if (days.empty()) return 0.0;
  std::size_t above = 0;
  for (const auto& d : days) above += d.actual_value(m) > d.of(m).q50;
  return static_cast<double>(above) / static_cast<double>(days.size());
}

// Mean over days of the per-day replication standard deviation.
inline double variability(const std::vector<DayComparison>& days, Metric m) {
  if (days.empty()) return 0.0;
  double s = 0.0;
  for (const auto& d : days) s += d.of(m).std;
  return s / static_cast<double>(days.size());
}

struct MetricReport {
  double mae = 0.0;
  double mean_error = 0.0;
  double i_alpha = 0.0;
  double above_median = 0.0;
  double variability = 0.0;
};

struct ValidationReport {
  std::array<MetricReport, 3> metrics{};
  std::vector<std::string> warnings;
  const MetricReport& of(Metric m) const { return metrics[idx(m)]; }
};

inline ValidationReport make_report(const std::vector<DayComparison>& days) {
  ValidationReport r;
  for (Metric m : kAllMetrics) {
    auto& mr = r.metrics[idx(m)];
    mr.mae = mae(days, m);
    mr.mean_error = mean_signed_error(days, m);
    mr.i_alpha = coverage(days, m, m == Metric::kSl ? &r.warnings : nullptr);
    mr.above_median = median_exceedance(days, m);
    mr.variability = variability(days, m);
  }
  return r;
}

// Poisson(count) arrivals per interval, placed uniformly; everything else is kept.
inline DayScenario resample_arrivals(const DayScenario& day, RandomStream& rng) {
  DayScenario out = day;
  const auto len = static_cast<double>(day.interval_seconds);
  out.arrivals_exact.assign(day.skills.size(), {});
  for (std::size_t k = 0; k < day.skills.size(); ++k) {
    auto& exact = out.arrivals_exact[k];
    for (std::size_t i = 0; i < day.interval_count; ++i) {
      const auto n = rng.poisson(day.arrival_counts[k][i]);
      out.arrival_counts[k][i] = static_cast<int>(n);
      for (std::int64_t j = 0; j < n; ++j) exact.push_back((static_cast<double>(i) + rng.uniform()) * len);
    }
    std::sort(exact.begin(), exact.end());
  }
  out.clamped_arrivals = 0;
  return out;
}

struct CorrectedError {
  double mu = 0.0;
  double sigma = 0.0;
  double corrected_mae = 0.0;
  bool clamped = false;  // noise variance exceeded the measured variance
};

// E|Y| for Y ~ N(mu, sigma).
inline double normal_mae(double mu, double sigma) {
  if (!(sigma > 0.0)) return std::abs(mu);
  const double z = mu / sigma;
  return 2.0 * sigma / std::sqrt(2.0 * std::numbers::pi) * std::exp(-0.5 * z * z) + mu * (2.0 * stats::normal_cdf(z) - 1.0);
}

inline CorrectedError corrected_model_error(double measured_mean, double measured_std, double noise_mean, double noise_std) {
  CorrectedError c;
  c.mu = measured_mean - noise_mean;
  const double var = measured_std * measured_std - noise_std * noise_std;
  c.clamped = var < 0.0;
  c.sigma = std::sqrt(std::max(0.0, var));
  c.corrected_mae = normal_mae(c.mu, c.sigma);
  return c;
}

struct DifferenceStats {
  double mean = 0.0;
  double std = 0.0;
  double mae = 0.0;
};

inline DifferenceStats difference_stats(const std::vector<double>& d) {
  return {stats::mean(d), stats::sample_std(d), stats::mean_abs(d)};
}

struct ErrorDecomposition {
  DifferenceStats noise;
  DifferenceStats measured;
  CorrectedError corrected;
};

struct NoiseSample {
  CivilDate day;
  std::array<double, 3> single{};     // S(A(L)), one replication
  std::array<double, 3> resampled{};  // E_S S(A2(L))
  std::array<double, 3> difference() const {
    return {resampled[0] - single[0], resampled[1] - single[1], resampled[2] - single[2]};
  }
};

struct NoiseStats {
  std::array<DifferenceStats, 3> stats{};
  std::vector<NoiseSample> days;
};

struct RunOptions {
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  sim::SimOptions sim;
  AsaBasis asa_basis = AsaBasis::kAnsweredCalls;
};

// Days run in parallel, each day's replications sequentially on one worker.
inline std::vector<sim::ReplicationResult> replicate_days(const std::vector<DayScenario>& days, const sim::ModelConfig& cfg,
                                                          const sim::ModelParameters& params, const RunOptions& opts,
                                                          sim::Purpose purpose = sim::Purpose::kReplicate) {
  std::vector<sim::ReplicationResult> out(days.size());
  sim::parallel_for(days.size(), opts.threads, [&](unsigned, std::size_t i) {
    sim::ReplicateOptions ro;
    ro.reps = opts.reps;
    ro.seed = opts.seed;
    ro.threads = 1;
    ro.purpose = purpose;
    ro.sim = opts.sim;
    ro.asa_basis = opts.asa_basis;
    out[i] = sim::replicate(days[i], cfg, params, ro);
  });
  return out;
}

// Per day: one replication on the realized arrivals, S(A(L)), against the
// replication mean on a Poisson resample of them, E_S S(A2(L)).
inline NoiseStats noise_cheating_stats(const std::vector<DayScenario>& days, const sim::ModelConfig& cfg,
                                       const sim::ModelParameters& params, const RunOptions& opts) {
  NoiseStats out;
  out.days.resize(days.size());
  sim::parallel_for(days.size(), opts.threads, [&](unsigned, std::size_t i) {
    const auto& day = days[i];
    NoiseSample& ns = out.days[i];
    ns.day = day.date;
    sim::DaySimulator single(day, cfg, params, opts.sim);
    const DayMetrics s = single.run(sim::replication_key(opts.seed, day.date, sim::Purpose::kNoiseSingle, 0));
    RandomStream rng(sim::replication_key(opts.seed, day.date, sim::Purpose::kResample, 0));
    const DayScenario resampled = resample_arrivals(day, rng);
    sim::ReplicateOptions ro;
    ro.reps = opts.reps;
    ro.seed = opts.seed;
    ro.purpose = sim::Purpose::kNoiseResampled;
    ro.sim = opts.sim;
    ro.asa_basis = opts.asa_basis;
    const auto r = sim::replicate(resampled, cfg, params, ro);
    for (Metric m : kAllMetrics) {
      ns.single[idx(m)] = s.value(m, opts.asa_basis);
      ns.resampled[idx(m)] = r.of(m).mean;
    }
  });
  for (Metric m : kAllMetrics) {
    std::vector<double> d;
    for (const auto& ns : out.days) d.push_back(ns.difference()[idx(m)]);
    out.stats[idx(m)] = difference_stats(d);
  }
  return out;
}

inline std::vector<DayComparison> compare_days(const std::vector<DayScenario>& days,
                                               const std::vector<sim::ReplicationResult>& results) {
  std::vector<DayComparison> out;
  for (std::size_t i = 0; i < days.size(); ++i) {
    if (!days[i].actual) throw DataError("scenario " + days[i].date.iso() + " lacks field 'actual'");
    DayComparison c;
    c.day = days[i].date;
    c.actual = *days[i].actual;
    c.sim = results[i].summary;
    c.reps = results[i].runs.size();
    out.push_back(c);
  }
  return out;
}

struct ModelReport {
  models::ModelPreset model;
  std::vector<DayComparison> days;
  ValidationReport report;
  std::optional<NoiseStats> noise;
  std::array<std::optional<ErrorDecomposition>, 3> decomposition{};
};

inline std::array<std::optional<ErrorDecomposition>, 3> decompose(const std::vector<DayComparison>& days,
                                                                   const NoiseStats& noise) {
  std::array<std::optional<ErrorDecomposition>, 3> out{};
  for (Metric m : kAllMetrics) {
    std::vector<double> measured;
    for (const auto& d : days) measured.push_back(d.of(m).mean - d.actual_value(m));
    ErrorDecomposition e;
    e.noise = noise.stats[idx(m)];
    e.measured = difference_stats(measured);
    e.corrected = corrected_model_error(e.measured.mean, e.measured.std, e.noise.mean, e.noise.std);
    out[idx(m)] = e;
  }
  return out;
}

struct ValidateOptions {
  RunOptions run;
  bool decompose = true;
};

inline std::vector<ModelReport> validate_models(const std::vector<DayScenario>& days,
                                                const std::vector<models::ModelPreset>& presets,
                                                const sim::ModelParameters& params, const ValidateOptions& opts) {
  std::vector<ModelReport> out;
  for (const auto& p : presets) {
    ModelReport r;
    r.model = p;
    r.days = compare_days(days, replicate_days(days, p.config, params, opts.run));
    r.report = make_report(r.days);
    if (opts.decompose) {
      r.noise = noise_cheating_stats(days, p.config, params, opts.run);
      r.decomposition = decompose(r.days, *r.noise);
    }
    out.push_back(std::move(r));
  }
  return out;
}

inline Json to_json(const DifferenceStats& s) { return Json{{"mean", s.mean}, {"std", s.std}, {"mae", s.mae}}; }

inline Json to_json(const ErrorDecomposition& e) {
  return Json{{"noise", to_json(e.noise)},
              {"measured", to_json(e.measured)},
              {"mu", e.corrected.mu},
              {"sigma", e.corrected.sigma},
              {"corrected_mae", e.corrected.corrected_mae},
              {"variance_clamped", e.corrected.clamped}};
}

inline Json to_json(const ModelReport& r) {
  Json j;
  j["model"] = r.model.name;
  j["config"] = sim::to_json(r.model.config);
  j["days"] = r.days.size();
  Json metrics;
  for (Metric m : kAllMetrics) {
    const auto& mr = r.report.of(m);
    Json mj{{"mae", mr.mae},
            {"mean_error", mr.mean_error},
            {"i_alpha", mr.i_alpha},
            {"above_median", mr.above_median},
            {"variability", mr.variability}};
    if (r.decomposition[idx(m)]) mj["decomposition"] = to_json(*r.decomposition[idx(m)]);
    metrics[std::string(metric_name(m))] = mj;
  }
  j["metrics"] = metrics;
  j["warnings"] = r.report.warnings;
  return j;
}

}  // namespace ccsim::validate
