#pragma once

#include <cmath>
#include <span>

#include "ccsim/core/error.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::estimators {

struct LognormalFit {
  double mu_log = 0.0;
  double sigma_log = 0.0;
  double min_duration_filter = 15.0;
  std::size_t used = 0;      // durations kept by the filter
  std::size_t filtered = 0;  // durations below the filter
};

// Moments of log(duration) over durations >= min_duration (sample standard
// deviation). Short calls are mostly dropped connections and are excluded.
inline LognormalFit fit_lognormal(std::span<const double> durations, double min_duration = 15.0) {
  LognormalFit fit;
  fit.min_duration_filter = min_duration;
  double sum = 0.0;
  for (double d : durations) {
    if (d < min_duration || d <= 0.0) {
      ++fit.filtered;
      continue;
    }
    sum += std::log(d);
    ++fit.used;
  }
  if (fit.used < 2) throw DataError("fit_lognormal: fewer than two durations survive the filter");
  fit.mu_log = sum / static_cast<double>(fit.used);
  double ss = 0.0;
  for (double d : durations) {
    if (d < min_duration || d <= 0.0) continue;
    const double e = std::log(d) - fit.mu_log;
    ss += e * e;
  }
  fit.sigma_log = std::sqrt(ss / static_cast<double>(fit.used - 1));
  if (!(fit.sigma_log > 1e-12)) throw DataError("fit_lognormal: degenerate sample (zero spread)");
  return fit;
}

inline Json to_json(const LognormalFit& f) {
  return Json{{"mu_log", f.mu_log},
              {"sigma_log", f.sigma_log},
              {"min_duration_filter", f.min_duration_filter},
              {"used", f.used},
              {"filtered", f.filtered}};
}

}  // namespace ccsim::estimators
