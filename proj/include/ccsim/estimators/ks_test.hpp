#pragma once

// One-sample Kolmogorov-Smirnov tests of arrival uniformity inside planning
// intervals, the piecewise-constant-rate Poisson hypothesis.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "ccsim/core/rng.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::estimators {

// D_n = sup |F_n(u) - u| for values in [0, 1].
inline double ks_statistic_uniform(std::vector<double> u) {
  std::sort(u.begin(), u.end());
  const double n = static_cast<double>(u.size());
  double d = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max({d, hi - u[i], u[i] - lo});
  }
  return d;
}

namespace detail {

// Square matrix with a decimal exponent carried separately, so that H^n can be
// formed for n in the hundreds without overflow.
struct ScaledMatrix {
  std::vector<double> a;
  int exponent = 0;
};

inline std::vector<double> mat_mul(const std::vector<double>& x, const std::vector<double>& y, std::size_t m) {
  std::vector<double> out(m * m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      const double xik = x[i * m + k];
      if (xik == 0.0) continue;
      for (std::size_t j = 0; j < m; ++j) out[i * m + j] += xik * y[k * m + j];
    }
  }
  return out;
}

inline ScaledMatrix mat_pow(const std::vector<double>& base, std::size_t m, std::size_t n) {
  if (n == 1) return ScaledMatrix{base, 0};
  ScaledMatrix half = mat_pow(base, m, n / 2);
  ScaledMatrix out{mat_mul(half.a, half.a, m), 2 * half.exponent};
  if (n % 2 == 1) out.a = mat_mul(base, out.a, m);
  if (out.a[(m / 2) * m + m / 2] > 1e140) {
    for (double& v : out.a) v *= 1e-140;
    out.exponent += 140;
  }
  return out;
}

}  // namespace detail

// Exact P(D_n < d) (Marsaglia, Tsang & Wang 2003, without their large-s shortcut).
inline double kolmogorov_cdf_exact(std::size_t n, double d) {
  if (d <= 0.5 / static_cast<double>(n)) return 0.0;
  if (d >= 1.0) return 1.0;
  const double nd = static_cast<double>(n) * d;
  const auto k = static_cast<std::size_t>(nd) + 1;
  const std::size_t m = 2 * k - 1;
  const double h = static_cast<double>(k) - nd;
  std::vector<double> hm(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) hm[i * m + j] = (i + 1 >= j) ? 1.0 : 0.0;
  }
  for (std::size_t i = 0; i < m; ++i) {
    hm[i * m] -= std::pow(h, static_cast<double>(i + 1));
    hm[(m - 1) * m + i] -= std::pow(h, static_cast<double>(m - i));
  }
  if (2.0 * h - 1.0 > 0.0) hm[(m - 1) * m] += std::pow(2.0 * h - 1.0, static_cast<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i + 1 > j) {
        for (std::size_t g = 1; g <= i + 1 - j; ++g) hm[i * m + j] /= static_cast<double>(g);
      }
    }
  }
  auto q = detail::mat_pow(hm, m, n);
  double s = q.a[(k - 1) * m + k - 1];
  int e = q.exponent;
  for (std::size_t i = 1; i <= n; ++i) {
    s = s * static_cast<double>(i) / static_cast<double>(n);
    if (s < 1e-140) {
      s *= 1e140;
      e -= 140;
    }
  }
  return std::clamp(s * std::pow(10.0, e), 0.0, 1.0);
}

// Limiting survival function P(K > x) of the Kolmogorov distribution.
inline double kolmogorov_sf_limit(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 1.18) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double sum = 0.0;
    for (int j = 1; j <= 8; ++j) {
      const double k = 2.0 * j - 1.0;
      sum += std::exp(-k * k * pi2 / (8.0 * x * x));
    }
    return 1.0 - std::sqrt(2.0 * std::numbers::pi) / x * sum;
  }
  double sum = 0.0;
  for (int j = 1; j <= 100; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += (j % 2 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

inline constexpr std::size_t kExactKsLimit = 35;

// Two-sided p-value P(D_n >= d): exact for n <= 35, otherwise the limiting
// distribution with Stephens' small-sample argument (sqrt(n) + 0.12 + 0.11/sqrt(n)) d.
inline double ks_p_value(std::size_t n, double d) {
  if (n == 0) return 1.0;
  if (n <= kExactKsLimit) return std::clamp(1.0 - kolmogorov_cdf_exact(n, d), 0.0, 1.0);
  const double rn = std::sqrt(static_cast<double>(n));
  return kolmogorov_sf_limit((rn + 0.12 + 0.11 / rn) * d);
}

struct NhppTestResult {
  double start = 0.0;  // interval bounds, seconds after opening
  double end = 0.0;
  std::size_t n = 0;
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t k = 1;  // number of tested intervals sharing the family-wise level
  double per_test_level = 0.05;
  bool rejected = false;
  bool skipped = false;  // fewer than kMinKsSample arrivals
};

inline constexpr std::size_t kMinKsSample = 5;

inline double per_test_level(std::size_t k, double family_confidence = 0.95) {
  return 1.0 - std::pow(family_confidence, 1.0 / static_cast<double>(std::max<std::size_t>(k, 1)));
}

// Tests offsets (seconds after opening) that fall in [start, end) against a
// uniform law on that interval. Arrival order is kept; no Lewis transform.
inline NhppTestResult ks_uniformity_test(std::span<const double> offsets, double start, double end, std::size_t k = 1) {
  NhppTestResult r;
  r.start = start;
  r.end = end;
  r.k = std::max<std::size_t>(k, 1);
  r.per_test_level = per_test_level(r.k);
  std::vector<double> u;
  for (double t : offsets) {
    if (t >= start && t < end) u.push_back((t - start) / (end - start));
  }
  r.n = u.size();
  if (r.n < kMinKsSample) {
    r.skipped = true;
    return r;
  }
  r.statistic = ks_statistic_uniform(std::move(u));
  r.p_value = ks_p_value(r.n, r.statistic);
  r.rejected = r.p_value < r.per_test_level;
  return r;
}

// Same test on already-normalised offsets in [0, 1) pooled over many intervals.
inline NhppTestResult ks_summed_test(std::span<const double> normalized) {
  NhppTestResult r;
  r.start = 0.0;
  r.end = 1.0;
  r.n = normalized.size();
  r.per_test_level = per_test_level(1);
  if (r.n < kMinKsSample) {
    r.skipped = true;
    return r;
  }
  r.statistic = ks_statistic_uniform({normalized.begin(), normalized.end()});
  r.p_value = ks_p_value(r.n, r.statistic);
  r.rejected = r.p_value < r.per_test_level;
  return r;
}

struct NhppDayTable {
  double interval_seconds = 0.0;
  std::vector<NhppTestResult> intervals;  // every interval; skipped ones flagged
  NhppTestResult summed;
  std::size_t rejections = 0;
};

// Per-interval tests at level 1 - 0.95^(1/k), k = intervals with at least
// kMinKsSample arrivals, plus the pooled test over all arrivals of the day.
// With a jitter stream, each offset is moved uniformly within its second first.
inline NhppDayTable nhpp_day_tests(std::span<const double> offsets, double interval_seconds, double horizon,
                                   RandomStream* jitter = nullptr) {
  std::vector<double> t(offsets.begin(), offsets.end());
  if (jitter) {
    for (double& x : t) x = std::floor(x) + jitter->uniform();
  }
  NhppDayTable table;
  table.interval_seconds = interval_seconds;
  const auto count = static_cast<std::size_t>(std::ceil(horizon / interval_seconds - 1e-9));
  std::vector<std::vector<double>> per(count);
  std::vector<double> pooled;
  for (double x : t) {
    if (x < 0.0 || x >= horizon) continue;
    const auto i = std::min(static_cast<std::size_t>(x / interval_seconds), count - 1);
    per[i].push_back(x);
    pooled.push_back((x - static_cast<double>(i) * interval_seconds) / interval_seconds);
  }
  std::size_t k = 0;
  for (const auto& p : per) k += p.size() >= kMinKsSample;
  for (std::size_t i = 0; i < count; ++i) {
    const double lo = static_cast<double>(i) * interval_seconds;
    table.intervals.push_back(ks_uniformity_test(per[i], lo, lo + interval_seconds, k));
    table.rejections += table.intervals.back().rejected;
  }
  table.summed = ks_summed_test(pooled);
  return table;
}

}  // namespace ccsim::estimators
