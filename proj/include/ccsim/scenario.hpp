#pragma once

// Day-level data shared by ingest, sim and validate: the per-day scenario,
// agent groups, day metrics, and their JSON form.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccsim/core/error.hpp"
#include "ccsim/core/time.hpp"
#include "json.hpp"

namespace ccsim {

using Json = nlohmann::ordered_json;

struct PatienceObservation {
  double duration = 0.0;
  bool censored = false;  // answered before the caller's patience ran out
};

struct AgentGroup {
  std::vector<std::size_t> skills;  // indices into DayScenario::skills, ascending
};

enum class Metric : std::uint8_t { kSl, kAb, kAsa };
inline constexpr std::array<Metric, 3> kAllMetrics = {Metric::kSl, Metric::kAb, Metric::kAsa};

inline std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::kSl: return "SL";
    case Metric::kAb: return "Ab";
    case Metric::kAsa: return "ASA";
  }
  return "?";
}

enum class AsaBasis : std::uint8_t { kAnsweredCalls, kAllCalls };

struct DayMetrics {
  std::int64_t offered = 0;
  std::int64_t answered_within_tta = 0;
  std::int64_t answered_late = 0;
  std::int64_t abandoned = 0;
  std::int64_t unresolved = 0;  // still queued when the day ended
  double wait_answered = 0.0;   // summed waits of answered calls
  double wait_abandoned = 0.0;  // summed time-to-abandon

  std::int64_t answered() const noexcept { return answered_within_tta + answered_late; }

  double sl() const noexcept {
    return offered ? static_cast<double>(answered_within_tta) / static_cast<double>(offered) : 0.0;
  }
  double ab() const noexcept {
    return offered ? static_cast<double>(abandoned) / static_cast<double>(offered) : 0.0;
  }
  // Mean wait of answered calls; 0 when nothing was answered.
  double asa(AsaBasis basis = AsaBasis::kAnsweredCalls) const noexcept {
    if (basis == AsaBasis::kAllCalls) {
      const auto n = answered() + abandoned;
      return n ? (wait_answered + wait_abandoned) / static_cast<double>(n) : 0.0;
    }
    return answered() ? wait_answered / static_cast<double>(answered()) : 0.0;
  }

  double value(Metric m, AsaBasis basis = AsaBasis::kAnsweredCalls) const noexcept {
    switch (m) {
      case Metric::kSl: return sl();
      case Metric::kAb: return ab();
      case Metric::kAsa: return asa(basis);
    }
    return 0.0;
  }

  friend bool operator==(const DayMetrics&, const DayMetrics&) = default;
};

struct DayScenario {
  CivilDate date;
  std::int64_t opening_seconds = 8 * 3600;
  std::int64_t interval_seconds = 1800;
  std::size_t interval_count = 24;
  std::vector<std::string> skills;
  std::vector<AgentGroup> groups;
  std::vector<std::vector<double>> arrivals_exact;  // [skill] seconds after opening, ascending
  std::vector<std::vector<int>> arrival_counts;     // [skill][interval]
  std::vector<std::vector<int>> staffing;           // [group][interval], breaks subtracted
  std::vector<std::vector<int>> staffing_no_breaks; // [group][interval]
  std::vector<std::vector<double>> ht_samples_day;  // [skill]
  std::vector<double> ht_mean_day;                  // [skill], 0 when no calls
  std::vector<std::optional<double>> ht_fitted_day; // [skill], learning-curve AHT fit
  double wrapup_mean = 0.0;
  std::vector<std::vector<PatienceObservation>> patience_observations;  // [skill]
  std::optional<DayMetrics> actual;
  std::int64_t clamped_arrivals = 0;  // arrivals outside opening hours moved to a boundary interval

  double horizon() const noexcept { return static_cast<double>(interval_seconds) * static_cast<double>(interval_count); }

  std::int64_t total_arrivals() const noexcept {
    std::int64_t n = 0;
    for (const auto& row : arrival_counts) {
      for (int c : row) n += c;
    }
    return n;
  }
};

// Interval index for an offset from opening; offsets outside the day map to the boundary intervals.
inline std::size_t interval_of(double offset, std::int64_t interval_seconds, std::size_t interval_count) noexcept {
  if (!(offset > 0.0)) return 0;
  const auto i = static_cast<std::size_t>(offset / static_cast<double>(interval_seconds));
  return i >= interval_count ? interval_count - 1 : i;
}

// Shape and invariant checks; throws DataError naming the offending field.
inline void check_scenario(const DayScenario& s) {
  const std::size_t ns = s.skills.size();
  auto fail = [&](const std::string& what) { throw DataError("scenario " + s.date.iso() + ": " + what); };
  if (ns == 0) fail("no skills");
  if (s.interval_seconds <= 0 || s.interval_count == 0) fail("bad interval layout");
  if (s.arrival_counts.size() != ns) fail("field 'arrival_counts' must have one row per skill");
  for (const auto& row : s.arrival_counts) {
    if (row.size() != s.interval_count) fail("field 'arrival_counts' rows must have interval_count entries");
    for (int c : row) {
      if (c < 0) fail("negative arrival count");
    }
  }
  for (const auto& g : s.groups) {
    if (g.skills.empty()) fail("agent group with empty skill set");
    for (auto k : g.skills) {
      if (k >= ns) fail("agent group references unknown skill");
    }
  }
  auto check_staffing = [&](const std::vector<std::vector<int>>& st, const char* name) {
    if (st.empty()) return;
    if (st.size() != s.groups.size()) fail(std::string("field '") + name + "' must have one row per group");
    for (const auto& row : st) {
      if (row.size() != s.interval_count) fail(std::string("field '") + name + "' rows must have interval_count entries");
      for (int c : row) {
        if (c < 0) fail(std::string("negative count in '") + name + "'");
      }
    }
  };
  check_staffing(s.staffing, "staffing");
  check_staffing(s.staffing_no_breaks, "staffing_no_breaks");
  if (!s.arrivals_exact.empty()) {
    if (s.arrivals_exact.size() != ns) fail("field 'arrivals_exact' must have one list per skill");
    for (std::size_t k = 0; k < ns; ++k) {
      std::vector<int> recount(s.interval_count, 0);
      for (double t : s.arrivals_exact[k]) ++recount[interval_of(t, s.interval_seconds, s.interval_count)];
      if (recount != s.arrival_counts[k]) fail("field 'arrivals_exact' disagrees with 'arrival_counts'");
    }
  }
}

inline Json to_json(const DayMetrics& m) {
  Json j;
  j["offered"] = m.offered;
  j["answered_within_tta"] = m.answered_within_tta;
  j["answered_late"] = m.answered_late;
  j["abandoned"] = m.abandoned;
  j["unresolved"] = m.unresolved;
  j["wait_answered"] = m.wait_answered;
  j["wait_abandoned"] = m.wait_abandoned;
  j["sl"] = m.sl();
  j["ab"] = m.ab();
  j["asa"] = m.asa();
  return j;
}

inline DayMetrics day_metrics_from_json(const Json& j) {
  DayMetrics m;
  m.offered = j.at("offered").get<std::int64_t>();
  m.answered_within_tta = j.at("answered_within_tta").get<std::int64_t>();
  m.answered_late = j.value("answered_late", std::int64_t{0});
  m.abandoned = j.at("abandoned").get<std::int64_t>();
  m.unresolved = j.value("unresolved", std::int64_t{0});
  m.wait_answered = j.value("wait_answered", 0.0);
  m.wait_abandoned = j.value("wait_abandoned", 0.0);
  return m;
}

// Canonical field order; every array is indexed [skill] or [group] then [interval].
inline Json to_json(const DayScenario& s) {
  Json j;
  j["date"] = s.date.iso();
  j["opening_seconds"] = s.opening_seconds;
  j["interval_seconds"] = s.interval_seconds;
  j["interval_count"] = s.interval_count;
  j["skills"] = s.skills;
  Json groups = Json::array();
  for (const auto& g : s.groups) groups.push_back(Json{{"skills", g.skills}});
  j["groups"] = groups;
  j["arrivals_exact"] = s.arrivals_exact;
  j["arrival_counts"] = s.arrival_counts;
  j["staffing"] = s.staffing;
  j["staffing_no_breaks"] = s.staffing_no_breaks;
  j["ht_samples_day"] = s.ht_samples_day;
  j["ht_mean_day"] = s.ht_mean_day;
  Json fitted = Json::array();
  for (const auto& f : s.ht_fitted_day) fitted.push_back(f ? Json(*f) : Json(nullptr));
  j["ht_fitted_day"] = fitted;
  j["wrapup_mean"] = s.wrapup_mean;
  Json patience = Json::array();
  for (const auto& obs : s.patience_observations) {
    Json durations = Json::array();
    Json censored = Json::array();
    for (const auto& o : obs) {
      durations.push_back(o.duration);
      censored.push_back(o.censored);
    }
    patience.push_back(Json{{"duration", durations}, {"censored", censored}});
  }
  j["patience_observations"] = patience;
  j["actual"] = s.actual ? to_json(*s.actual) : Json(nullptr);
  j["clamped_arrivals"] = s.clamped_arrivals;
  return j;
}

inline DayScenario scenario_from_json(const Json& j) {
  DayScenario s;
  auto need = [&](const char* key) -> const Json& {
    if (!j.contains(key)) throw DataError(std::string("scenario missing field '") + key + "'");
    return j.at(key);
  };
  const auto date = CivilDate::parse_iso(need("date").get<std::string>());
  if (!date) throw DataError("scenario field 'date' is not YYYY-MM-DD");
  s.date = *date;
  s.opening_seconds = need("opening_seconds").get<std::int64_t>();
  s.interval_seconds = need("interval_seconds").get<std::int64_t>();
  s.interval_count = need("interval_count").get<std::size_t>();
  s.skills = need("skills").get<std::vector<std::string>>();
  for (const auto& g : need("groups")) s.groups.push_back(AgentGroup{g.at("skills").get<std::vector<std::size_t>>()});
  s.arrival_counts = need("arrival_counts").get<std::vector<std::vector<int>>>();
  if (j.contains("arrivals_exact")) s.arrivals_exact = j["arrivals_exact"].get<std::vector<std::vector<double>>>();
  if (j.contains("staffing")) s.staffing = j["staffing"].get<std::vector<std::vector<int>>>();
  if (j.contains("staffing_no_breaks")) s.staffing_no_breaks = j["staffing_no_breaks"].get<std::vector<std::vector<int>>>();
  if (j.contains("ht_samples_day")) s.ht_samples_day = j["ht_samples_day"].get<std::vector<std::vector<double>>>();
  if (j.contains("ht_mean_day")) s.ht_mean_day = j["ht_mean_day"].get<std::vector<double>>();
  if (j.contains("ht_fitted_day")) {
    for (const auto& f : j["ht_fitted_day"]) {
      s.ht_fitted_day.push_back(f.is_null() ? std::nullopt : std::optional<double>(f.get<double>()));
    }
  }
  s.wrapup_mean = j.value("wrapup_mean", 0.0);
  if (j.contains("patience_observations")) {
    for (const auto& p : j["patience_observations"]) {
      const auto d = p.at("duration").get<std::vector<double>>();
      const auto c = p.at("censored").get<std::vector<bool>>();
      if (d.size() != c.size()) throw DataError("patience_observations: duration/censored length mismatch");
      std::vector<PatienceObservation> obs;
      for (std::size_t i = 0; i < d.size(); ++i) obs.push_back({d[i], c[i]});
      s.patience_observations.push_back(std::move(obs));
    }
  }
  if (j.contains("actual") && !j["actual"].is_null()) s.actual = day_metrics_from_json(j["actual"]);
  s.clamped_arrivals = j.value("clamped_arrivals", std::int64_t{0});
  check_scenario(s);
  return s;
}

}  // namespace ccsim
