#pragma once

// Stationary M/M/s+M quantities from a truncated birth-death chain. Used only
// as a test oracle; shares no code with the simulator.

#include <cmath>
#include <vector>

namespace oracle {

struct ErlangA {
  double p_abandon = 0.0;         // fraction of arrivals that abandon
  double mean_wait_served = 0.0;  // E[W | served]
  double p_served_within = 0.0;   // P(served and W <= tta), only for tta = 0 exact
  double mean_queue = 0.0;
};

// lambda, mu, theta are rates per second.
inline ErlangA erlang_a(double lambda, double mu, double theta, int s, int truncate = 2000) {
  std::vector<double> p(static_cast<std::size_t>(truncate) + 1);
  p[0] = 1.0;
  for (int n = 1; n <= truncate; ++n) {
    const double death = std::min(n, s) * mu + std::max(n - s, 0) * theta;
    p[static_cast<std::size_t>(n)] = p[static_cast<std::size_t>(n - 1)] * lambda / death;
  }
  double total = 0.0;
  for (double x : p) total += x;
  for (double& x : p) x /= total;

  ErlangA out;
  for (int n = s; n <= truncate; ++n) out.mean_queue += (n - s) * p[static_cast<std::size_t>(n)];

  // Tagged arrival finding n in system (PASTA). With m = n - s callers ahead,
  // stage i (i ahead) ends at rate r_i = s*mu + i*theta + theta.
  double p_served = 0.0;
  double wait_sum = 0.0;
  for (int n = 0; n <= truncate; ++n) {
    const double pn = p[static_cast<std::size_t>(n)];
    if (n < s) {
      p_served += pn;
      continue;
    }
    const int m = n - s;
    double ps = 1.0;
    double ew = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double r = s * mu + i * theta + theta;
      ps *= (s * mu + i * theta) / r;
      ew += 1.0 / r;
    }
    p_served += pn * ps;
    wait_sum += pn * ps * ew;
  }
  out.p_abandon = 1.0 - p_served;
  out.mean_wait_served = wait_sum / p_served;
  return out;
}

}  // namespace oracle
