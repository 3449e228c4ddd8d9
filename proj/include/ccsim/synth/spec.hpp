#pragma once

// SyntheticSpec: the knobs of the agent-level "reality" generator.
//
// {
//   "n_days": 20, "start_date": "2014-01-06", "opening_time": "08:00",
//   "interval_minutes": 30, "interval_count": 24,
//   "day_volume_sd": 0.0, "aht_day_variation": 0.15,
//   "skills": [{"name": "S1", "rates": [..] | "rate": 40,
//               "ht": {"mu_log": 5.3, "sigma_log": 0.7},
//               "patience": {"kind": "exp", "mean": 300}
//                         | {"kind": "mixture", "weights": [..], "means": [..]}}],
//   "groups": [{"skills": ["S1"], "shifts": [{"start": "08:00", "end": "20:00", "agents": 12}]}],
//   "breaks": {"rate_per_hour": 0.3, "durations_minutes": [5, 10, 15], "weights": [0.5, 0.3, 0.2],
//              "jitter_seconds": 30, "paid": true},
//   "learning": {"alpha_sd": 0.1, "gamma_max": 0.01},
//   "wrapup": {"mean": 6, "zero_fraction": 0.4}
// }

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "ccsim/core/error.hpp"
#include "ccsim/core/time.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::synth {

struct PatienceSpec {
  std::vector<double> weights{1.0};  // exponential mixture
  std::vector<double> means{300.0};

  double mean() const {
    double m = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) m += weights[i] * means[i];
    return m;
  }
};

struct SkillSpec {
  std::string name;
  std::vector<double> rates;  // expected arrivals per interval
  double mu_log = 5.3;
  double sigma_log = 0.7;
  PatienceSpec patience;
};

struct ShiftSpec {
  std::int64_t start = 8 * 3600;  // seconds after midnight
  std::int64_t end = 20 * 3600;
  int agents = 0;
};

struct GroupSpec {
  std::vector<std::string> skills;
  std::vector<ShiftSpec> shifts;
};

struct BreakSpec {
  double rate_per_hour = 0.0;
  std::vector<double> durations_minutes{5, 10, 15};
  std::vector<double> weights{0.5, 0.3, 0.2};
  double jitter_seconds = 30.0;
  bool paid = true;
};

struct LearningSpec {
  double alpha_sd = 0.0;   // log-sd of the per-agent speed factor
  double gamma_max = 0.0;  // per-agent gamma ~ U(0, gamma_max) per day
};

struct WrapupSpec {
  double mean = 0.0;
  double zero_fraction = 0.0;
};

struct SyntheticSpec {
  std::size_t n_days = 1;
  CivilDate start_date{2014, 1, 6};
  std::int64_t opening_seconds = 8 * 3600;
  std::int64_t interval_seconds = 1800;
  std::size_t interval_count = 24;
  double day_volume_sd = 0.0;
  double aht_day_variation = 0.0;
  std::vector<SkillSpec> skills;
  std::vector<GroupSpec> groups;
  BreakSpec breaks;
  LearningSpec learning;
  WrapupSpec wrapup;

  std::int64_t closing_seconds() const { return opening_seconds + interval_seconds * static_cast<std::int64_t>(interval_count); }
};

namespace detail {

inline std::int64_t clock_of(const Json& j, const char* key, std::int64_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto s = parse_clock(j.at(key).get<std::string>());
  if (!s) throw ConfigError(std::string("synthetic spec: '") + key + "' must be HH:MM[:SS]");
  return *s;
}

inline void check_weights(const std::vector<double>& w, std::size_t n, const std::string& what) {
  if (w.size() != n || n == 0) throw ConfigError("synthetic spec: " + what + " weights must match its components");
  double s = 0.0;
  for (double x : w) {
    if (!(x >= 0.0)) throw ConfigError("synthetic spec: negative weight in " + what);
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-9) throw ConfigError("synthetic spec: " + what + " weights must sum to 1");
}

}  // namespace detail

inline void validate(const SyntheticSpec& s) {
  auto fail = [](const std::string& m) { throw ConfigError("synthetic spec: " + m); };
  if (s.n_days == 0) fail("n_days must be positive");
  if (s.interval_seconds <= 0 || s.interval_count == 0) fail("interval layout must be positive");
  if (s.skills.empty()) fail("no skills");
  if (s.day_volume_sd < 0.0) fail("day_volume_sd must be >= 0");
  if (s.aht_day_variation < 0.0 || s.aht_day_variation >= 1.0) fail("aht_day_variation must be in [0, 1)");
  for (const auto& k : s.skills) {
    if (k.rates.size() != s.interval_count) fail("skill " + k.name + ": rates need one entry per interval");
    for (double r : k.rates) {
      if (!(r >= 0.0)) fail("skill " + k.name + ": rates must be >= 0");
    }
    if (!(k.sigma_log >= 0.0)) fail("skill " + k.name + ": sigma_log must be >= 0");
    detail::check_weights(k.patience.weights, k.patience.means.size(), "patience of skill " + k.name);
    for (double m : k.patience.means) {
      if (!(m > 0.0)) fail("skill " + k.name + ": patience means must be positive");
    }
  }
  for (const auto& g : s.groups) {
    if (g.skills.empty()) fail("group with no skills");
    for (const auto& name : g.skills) {
      bool found = false;
      for (const auto& k : s.skills) found = found || k.name == name;
      if (!found) fail("group references unknown skill '" + name + "'");
    }
    for (const auto& sh : g.shifts) {
      if (sh.agents < 0 || sh.end <= sh.start) fail("shifts need agents >= 0 and end after start");
    }
  }
  if (s.breaks.rate_per_hour < 0.0) fail("breaks.rate_per_hour must be >= 0");
  detail::check_weights(s.breaks.weights, s.breaks.durations_minutes.size(), "break duration");
  if (s.learning.alpha_sd < 0.0 || s.learning.gamma_max < 0.0) fail("learning parameters must be >= 0");
  if (s.wrapup.mean < 0.0 || s.wrapup.zero_fraction < 0.0 || s.wrapup.zero_fraction >= 1.0) {
    fail("wrapup needs mean >= 0 and zero_fraction in [0, 1)");
  }
}

inline SyntheticSpec spec_from_json(const Json& j) {
  SyntheticSpec s;
  try {
    s.n_days = j.value("n_days", std::size_t{1});
    if (j.contains("start_date")) {
      const auto d = CivilDate::parse_iso(j.at("start_date").get<std::string>());
      if (!d) throw ConfigError("synthetic spec: start_date must be YYYY-MM-DD");
      s.start_date = *d;
    }
    s.opening_seconds = detail::clock_of(j, "opening_time", s.opening_seconds);
    s.interval_seconds = j.value("interval_minutes", std::int64_t{30}) * 60;
    s.interval_count = j.value("interval_count", std::size_t{24});
    s.day_volume_sd = j.value("day_volume_sd", 0.0);
    s.aht_day_variation = j.value("aht_day_variation", 0.0);
    for (const auto& kj : j.at("skills")) {
      SkillSpec k;
      k.name = kj.at("name").get<std::string>();
      if (kj.contains("rates")) k.rates = kj.at("rates").get<std::vector<double>>();
      else k.rates.assign(s.interval_count, kj.at("rate").get<double>());
      if (kj.contains("ht")) {
        k.mu_log = kj["ht"].at("mu_log").get<double>();
        k.sigma_log = kj["ht"].at("sigma_log").get<double>();
      }
      if (kj.contains("patience")) {
        const auto& pj = kj["patience"];
        const auto kind = pj.value("kind", std::string("exp"));
        if (kind == "exp") {
          k.patience = PatienceSpec{{1.0}, {pj.at("mean").get<double>()}};
        } else if (kind == "mixture") {
          k.patience = PatienceSpec{pj.at("weights").get<std::vector<double>>(), pj.at("means").get<std::vector<double>>()};
        } else {
          throw ConfigError("synthetic spec: patience kind must be 'exp' or 'mixture'");
        }
      }
      s.skills.push_back(std::move(k));
    }
    if (j.contains("groups")) {
      for (const auto& gj : j.at("groups")) {
        GroupSpec g;
        g.skills = gj.at("skills").get<std::vector<std::string>>();
        for (const auto& sj : gj.at("shifts")) {
          ShiftSpec sh;
          sh.start = detail::clock_of(sj, "start", s.opening_seconds);
          sh.end = detail::clock_of(sj, "end", s.closing_seconds());
          sh.agents = sj.at("agents").get<int>();
          g.shifts.push_back(sh);
        }
        s.groups.push_back(std::move(g));
      }
    }
    if (j.contains("breaks")) {
      const auto& bj = j["breaks"];
      s.breaks.rate_per_hour = bj.value("rate_per_hour", 0.0);
      if (bj.contains("durations_minutes")) s.breaks.durations_minutes = bj["durations_minutes"].get<std::vector<double>>();
      if (bj.contains("weights")) s.breaks.weights = bj["weights"].get<std::vector<double>>();
      s.breaks.jitter_seconds = bj.value("jitter_seconds", s.breaks.jitter_seconds);
      s.breaks.paid = bj.value("paid", true);
    }
    if (j.contains("learning")) {
      s.learning.alpha_sd = j["learning"].value("alpha_sd", 0.0);
      s.learning.gamma_max = j["learning"].value("gamma_max", 0.0);
    }
    if (j.contains("wrapup")) {
      s.wrapup.mean = j["wrapup"].value("mean", 0.0);
      s.wrapup.zero_fraction = j["wrapup"].value("zero_fraction", 0.0);
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("synthetic spec: ") + e.what());
  }
  validate(s);
  return s;
}

inline std::string format_clock(std::int64_t s) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02d:%02d:%02d", static_cast<int>(s / 3600), static_cast<int>(s / 60 % 60),
                static_cast<int>(s % 60));
  return buf;
}

inline Json to_json(const SyntheticSpec& s) {
  Json j;
  j["n_days"] = s.n_days;
  j["start_date"] = s.start_date.iso();
  j["opening_time"] = format_clock(s.opening_seconds);
  j["interval_minutes"] = s.interval_seconds / 60;
  j["interval_count"] = s.interval_count;
  j["day_volume_sd"] = s.day_volume_sd;
  j["aht_day_variation"] = s.aht_day_variation;
  Json skills = Json::array();
  for (const auto& k : s.skills) {
    skills.push_back({{"name", k.name},
                      {"rates", k.rates},
                      {"ht", {{"mu_log", k.mu_log}, {"sigma_log", k.sigma_log}}},
                      {"patience", {{"kind", "mixture"}, {"weights", k.patience.weights}, {"means", k.patience.means}}}});
  }
  j["skills"] = skills;
  Json groups = Json::array();
  for (const auto& g : s.groups) {
    Json shifts = Json::array();
    for (const auto& sh : g.shifts) {
      shifts.push_back({{"start", format_clock(sh.start)}, {"end", format_clock(sh.end)}, {"agents", sh.agents}});
    }
    groups.push_back({{"skills", g.skills}, {"shifts", shifts}});
  }
  j["groups"] = groups;
  j["breaks"] = {{"rate_per_hour", s.breaks.rate_per_hour},
                 {"durations_minutes", s.breaks.durations_minutes},
                 {"weights", s.breaks.weights},
                 {"jitter_seconds", s.breaks.jitter_seconds},
                 {"paid", s.breaks.paid}};
  j["learning"] = {{"alpha_sd", s.learning.alpha_sd}, {"gamma_max", s.learning.gamma_max}};
  j["wrapup"] = {{"mean", s.wrapup.mean}, {"zero_fraction", s.wrapup.zero_fraction}};
  return j;
}

}  // namespace ccsim::synth
