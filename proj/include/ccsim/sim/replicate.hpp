#pragma once

// Independent replications of one day and a small index-parallel runner.
// Replication r of day d under seed s always uses the key
// derive_seed(s, {d, purpose, r}), so results do not depend on the number of
// threads or on how many replications are requested.

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "ccsim/core/rng.hpp"
#include "ccsim/core/stats.hpp"
#include "ccsim/scenario.hpp"
#include "ccsim/sim/day_simulator.hpp"

namespace ccsim::sim {

// Second key of the replication path; keeps the seed families of different
// experiments apart.
enum class Purpose : std::uint64_t {
  kReplicate = 0,
  kNoiseSingle = 1,
  kNoiseResampled = 2,
  kResample = 3,
  kReality = 4,
};

inline std::uint64_t replication_key(std::uint64_t seed, const CivilDate& date, Purpose purpose, std::uint64_t rep) {
  return derive_seed(seed, {static_cast<std::uint64_t>(date.days_since_epoch()), static_cast<std::uint64_t>(purpose), rep});
}

inline unsigned default_threads() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// Calls body(worker, i) for i in [0, n) on up to `threads` workers. Indices
// are handed out dynamically; the first exception stops further work and is
// rethrown on the calling thread.
inline void parallel_for(std::size_t n, unsigned threads, const std::function<void(unsigned, std::size_t)>& body) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) body(0, i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&](unsigned w) {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) return;
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(w, i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
        return;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;
  double q025 = 0.0;
  double q50 = 0.0;
  double q975 = 0.0;
};

inline MetricSummary summarize(std::vector<double> values) {
  MetricSummary s;
  if (values.empty()) return s;
  s.mean = stats::mean(values);
  s.std = stats::sample_std(values);
  std::sort(values.begin(), values.end());
  s.q025 = stats::quantile_sorted(values, 0.025);
  s.q50 = stats::quantile_sorted(values, 0.5);
  s.q975 = stats::quantile_sorted(values, 0.975);
  return s;
}

inline Json to_json(const MetricSummary& s) {
  return Json{{"mean", s.mean}, {"std", s.std}, {"q025", s.q025}, {"q50", s.q50}, {"q975", s.q975}};
}

struct ReplicationResult {
  std::vector<DayMetrics> runs;
  std::array<MetricSummary, 3> summary{};  // indexed by Metric
  double offered_mean = 0.0;
  std::vector<std::string> warnings;

  const MetricSummary& of(Metric m) const { return summary[static_cast<std::size_t>(m)]; }
};

inline ReplicationResult summarize_runs(std::vector<DayMetrics> runs, AsaBasis basis = AsaBasis::kAnsweredCalls) {
  ReplicationResult r;
  for (Metric m : kAllMetrics) {
    std::vector<double> v;
    v.reserve(runs.size());
    for (const auto& d : runs) v.push_back(d.value(m, basis));
    r.summary[static_cast<std::size_t>(m)] = summarize(std::move(v));
  }
  double offered = 0.0;
  for (const auto& d : runs) offered += static_cast<double>(d.offered);
  r.offered_mean = runs.empty() ? 0.0 : offered / static_cast<double>(runs.size());
  r.runs = std::move(runs);
  return r;
}

struct ReplicateOptions {
  std::size_t reps = 1000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  Purpose purpose = Purpose::kReplicate;
  SimOptions sim;
  AsaBasis asa_basis = AsaBasis::kAnsweredCalls;
};

inline ReplicationResult replicate(const DayScenario& day, const ModelConfig& cfg, const ModelParameters& params,
                                   const ReplicateOptions& opts) {
  if (opts.reps == 0) throw ConfigError("replicate: reps must be at least 1");
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(opts.reps)));
  std::vector<std::unique_ptr<DaySimulator>> sims;
  for (unsigned w = 0; w < threads; ++w) sims.push_back(std::make_unique<DaySimulator>(day, cfg, params, opts.sim));
  std::vector<DayMetrics> runs(opts.reps);
  parallel_for(opts.reps, threads, [&](unsigned w, std::size_t r) {
    runs[r] = sims[w]->run(replication_key(opts.seed, day.date, opts.purpose, r));
  });
  auto result = summarize_runs(std::move(runs), opts.asa_basis);
  result.warnings = sims.front()->warnings();
  return result;
}

inline Json to_json(const ReplicationResult& r) {
  Json j;
  j["reps"] = r.runs.size();
  j["offered_mean"] = r.offered_mean;
  Json s;
  for (Metric m : kAllMetrics) s[std::string(metric_name(m))] = to_json(r.of(m));
  j["summary"] = s;
  return j;
}

}  // namespace ccsim::sim
