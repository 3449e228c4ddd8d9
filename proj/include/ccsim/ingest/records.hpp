#pragma once

// Raw call-log and activity-log rows, the ingest configuration, and the two
// delimited-text parsers.

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccsim/core/csv.hpp"
#include "ccsim/core/error.hpp"
#include "ccsim/core/time.hpp"
#include "json.hpp"

namespace ccsim::ingest {

enum class Activity : std::uint8_t {
  kTakingCalls,
  kWrapUp,
  kBreakPaid,
  kBreakUnpaid,
  kLoggingIn,
  kMeeting,
  kOther,
};

inline constexpr std::array<std::string_view, 7> kActivityNames = {
    "taking_calls", "wrap_up", "break_paid", "break_unpaid", "logging_in", "meeting", "other"};

inline std::string_view to_string(Activity a) { return kActivityNames[static_cast<std::size_t>(a)]; }

inline std::optional<Activity> activity_from_name(std::string_view name) {
  const std::string key = csv::normalize_key(name);
  for (std::size_t i = 0; i < kActivityNames.size(); ++i) {
    if (csv::normalize_key(kActivityNames[i]) == key) return static_cast<Activity>(i);
  }
  return std::nullopt;
}

struct CallRecord {
  Timestamp arrival;
  std::string skill;
  std::optional<std::string> agent;  // absent for abandoned calls
  std::optional<Timestamp> answered;
  Timestamp departure;

  bool is_answered() const noexcept { return answered.has_value(); }
  // Queue time: until answer for answered calls, until hang-up otherwise.
  double wait_seconds() const noexcept {
    return static_cast<double>((answered ? *answered : departure).epoch_seconds - arrival.epoch_seconds);
  }
  double handling_seconds() const noexcept {
    return answered ? static_cast<double>(departure.epoch_seconds - answered->epoch_seconds) : 0.0;
  }
};

struct ActivityRecord {
  Activity activity = Activity::kOther;
  Timestamp start;
  Timestamp end;
  std::string agent;

  double duration_seconds() const noexcept {
    return static_cast<double>(end.epoch_seconds - start.epoch_seconds);
  }
};

struct RowReject {
  std::size_t line = 0;  // 1-based line number in the input, header is line 1
  std::string reason;
  std::string text;
};

template <typename Record>
struct ParseResult {
  std::vector<Record> records;
  std::vector<RowReject> rejects;
  std::size_t unknown_activity_rows = 0;  // activity log only
  std::size_t input_rows = 0;
};

struct IngestConfig {
  char delimiter = ',';
  std::string timestamp_format = "%m/%d/%Y %H:%M:%S";
  std::int64_t opening_seconds = 8 * 3600;  // seconds after midnight
  std::int64_t interval_seconds = 1800;
  std::size_t interval_count = 24;
  // Keys are compared after csv::normalize_key.
  std::map<std::string, Activity> activity_map = default_activity_map();
  // Selected skills in routing order; empty selects every skill seen in the call log.
  std::vector<std::string> skills;
  // Explicit skill sets; agents not listed get the skills they answered in the call log.
  std::map<std::string, std::vector<std::string>> agent_skills;
  bool pooled_staffing = false;
  bool subtract_unpaid_breaks = true;
  double time_to_answer = 60.0;
  double min_lognormal_duration = 15.0;
  std::vector<std::int64_t> nhpp_interval_seconds = {900, 1800, 3600};

  std::int64_t closing_seconds() const noexcept {
    return opening_seconds + interval_seconds * static_cast<std::int64_t>(interval_count);
  }

  static std::map<std::string, Activity> default_activity_map() {
    return {
        {"takingcalls", Activity::kTakingCalls}, {"available", Activity::kTakingCalls},
        {"wrapup", Activity::kWrapUp},           {"16", Activity::kWrapUp},
        {"break", Activity::kBreakPaid},         {"paidbreak", Activity::kBreakPaid},
        {"breakpaid", Activity::kBreakPaid},     {"unpaidbreak", Activity::kBreakUnpaid},
        {"breakunpaid", Activity::kBreakUnpaid}, {"lunch", Activity::kBreakUnpaid},
        {"loggingin", Activity::kLoggingIn},     {"meeting", Activity::kMeeting},
        {"other", Activity::kOther},
    };
  }

  Activity map_activity(std::string_view name, bool* known = nullptr) const {
    const auto it = activity_map.find(csv::normalize_key(name));
    if (known) *known = it != activity_map.end();
    return it == activity_map.end() ? Activity::kOther : it->second;
  }
};

inline void from_json(const nlohmann::json& j, IngestConfig& c) {
  if (j.contains("delimiter")) {
    const auto d = j.at("delimiter").get<std::string>();
    if (d.size() != 1 && d != "\\t") throw ConfigError("delimiter must be a single character");
    c.delimiter = d == "\\t" ? '\t' : d[0];
  }
  if (j.contains("timestamp_format")) c.timestamp_format = j.at("timestamp_format").get<std::string>();
  if (j.contains("opening_time")) {
    const auto s = parse_clock(j.at("opening_time").get<std::string>());
    if (!s) throw ConfigError("opening_time must be HH:MM[:SS]");
    c.opening_seconds = *s;
  }
  if (j.contains("interval_minutes")) c.interval_seconds = j.at("interval_minutes").get<std::int64_t>() * 60;
  if (j.contains("interval_count")) c.interval_count = j.at("interval_count").get<std::size_t>();
  if (j.contains("activity_map")) {
    for (const auto& [name, value] : j.at("activity_map").items()) {
      const auto a = activity_from_name(value.get<std::string>());
      if (!a) throw ConfigError("activity_map: unknown activity '" + value.get<std::string>() + "'");
      c.activity_map[csv::normalize_key(name)] = *a;
    }
  }
  if (j.contains("skills")) c.skills = j.at("skills").get<std::vector<std::string>>();
  if (j.contains("agent_skills")) {
    c.agent_skills = j.at("agent_skills").get<std::map<std::string, std::vector<std::string>>>();
  }
  if (j.contains("pooled_staffing")) c.pooled_staffing = j.at("pooled_staffing").get<bool>();
  if (j.contains("subtract_unpaid_breaks")) c.subtract_unpaid_breaks = j.at("subtract_unpaid_breaks").get<bool>();
  if (j.contains("time_to_answer")) c.time_to_answer = j.at("time_to_answer").get<double>();
  if (j.contains("min_lognormal_duration")) c.min_lognormal_duration = j.at("min_lognormal_duration").get<double>();
  if (j.contains("nhpp_interval_minutes")) {
    c.nhpp_interval_seconds.clear();
    for (auto m : j.at("nhpp_interval_minutes").get<std::vector<std::int64_t>>()) c.nhpp_interval_seconds.push_back(m * 60);
  }
  if (c.interval_seconds <= 0 || c.interval_count == 0) throw ConfigError("interval length and count must be positive");
}

namespace detail {

struct HeaderLayout {
  std::vector<std::size_t> columns;  // position of each required column
  std::size_t width = 0;
};

inline HeaderLayout locate_columns(const std::vector<std::string>& header,
                                   const std::vector<std::vector<std::string_view>>& aliases,
                                   std::string_view what) {
  HeaderLayout layout;
  layout.width = header.size();
  for (const auto& names : aliases) {
    std::optional<std::size_t> found;
    for (std::size_t i = 0; i < header.size() && !found; ++i) {
      const std::string key = csv::normalize_key(header[i]);
      for (auto n : names) {
        if (key == n) {
          found = i;
          break;
        }
      }
    }
    if (!found) {
      throw DataError(std::string(what) + ": header lacks a '" + std::string(names.front()) + "' column");
    }
    layout.columns.push_back(*found);
  }
  return layout;
}

// Reads the first non-blank line as header; calls on_row(line_no, text, fields) for each data row.
template <typename OnRow>
HeaderLayout scan_table(std::istream& in, char delimiter, const std::vector<std::vector<std::string_view>>& aliases,
                        std::string_view what, OnRow&& on_row) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<HeaderLayout> layout;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split_line(line, delimiter);
    if (!layout) {
      layout = locate_columns(fields, aliases, what);
      continue;
    }
    on_row(line_no, line, fields, *layout);
  }
  if (!layout) throw DataError(std::string(what) + ": missing header line");
  return *layout;
}

}  // namespace detail

// Parses a call log with columns "Call Arrival Time, Skill ID, Agent ID,
// Answered time, Call Departure Time" (any order, matched case- and
// space-insensitively). Rows violating arrival <= answered <= departure are
// returned as rejects; so are rows with unparseable fields.
inline ParseResult<CallRecord> parse_call_log(std::istream& in, const IngestConfig& cfg) {
  ParseResult<CallRecord> out;
  static const std::vector<std::vector<std::string_view>> kAliases = {
      {"callarrivaltime", "arrivaltime"},
      {"skillid", "skill"},
      {"agentid", "agent"},
      {"answeredtime", "answertime"},
      {"calldeparturetime", "departuretime"},
  };
  detail::scan_table(in, cfg.delimiter, kAliases, "call log",
                     [&](std::size_t line_no, const std::string& text, const std::vector<std::string>& f,
                         const detail::HeaderLayout& layout) {
                       ++out.input_rows;
                       auto reject = [&](std::string reason) {
                         out.rejects.push_back(RowReject{line_no, std::move(reason), text});
                       };
                       if (f.size() != layout.width) return reject("expected " + std::to_string(layout.width) + " fields");
                       const auto& c = layout.columns;
                       const auto arrival = parse_timestamp(f[c[0]], cfg.timestamp_format);
                       const auto departure = parse_timestamp(f[c[4]], cfg.timestamp_format);
                       if (!arrival) return reject("unparseable arrival time");
                       if (!departure) return reject("unparseable departure time");
                       if (f[c[1]].empty()) return reject("empty skill");
                       CallRecord rec;
                       rec.arrival = *arrival;
                       rec.departure = *departure;
                       rec.skill = f[c[1]];
                       if (!f[c[2]].empty()) rec.agent = f[c[2]];
                       if (!f[c[3]].empty()) {
                         const auto answered = parse_timestamp(f[c[3]], cfg.timestamp_format);
                         if (!answered) return reject("unparseable answered time");
                         rec.answered = *answered;
                       }
                       if (rec.departure < rec.arrival) return reject("departure before arrival");
                       if (rec.answered) {
                         if (*rec.answered < rec.arrival) return reject("answered before arrival");
                         if (rec.departure < *rec.answered) return reject("answered after departure");
                         if (!rec.agent) return reject("answered call without agent");
                       } else if (rec.agent) {
                         return reject("agent without answered time");
                       }
                       out.records.push_back(std::move(rec));
                     });
  return out;
}

// Parses an activity log with columns "Activity, Start time, End time, Agent ID".
// Records come back sorted by (agent, start). A record overlapping the previous
// accepted record of the same agent is rejected.
inline ParseResult<ActivityRecord> parse_activity_log(std::istream& in, const IngestConfig& cfg) {
  ParseResult<ActivityRecord> out;
  static const std::vector<std::vector<std::string_view>> kAliases = {
      {"activity", "activityid", "activityname"},
      {"starttime", "start"},
      {"endtime", "end"},
      {"agentid", "agent"},
  };
  struct Pending {
    ActivityRecord rec;
    std::size_t line;
    std::string text;
  };
  std::vector<Pending> pending;
  detail::scan_table(in, cfg.delimiter, kAliases, "activity log",
                     [&](std::size_t line_no, const std::string& text, const std::vector<std::string>& f,
                         const detail::HeaderLayout& layout) {
                       ++out.input_rows;
                       auto reject = [&](std::string reason) {
                         out.rejects.push_back(RowReject{line_no, std::move(reason), text});
                       };
                       if (f.size() != layout.width) return reject("expected " + std::to_string(layout.width) + " fields");
                       const auto& c = layout.columns;
                       const auto start = parse_timestamp(f[c[1]], cfg.timestamp_format);
                       const auto end = parse_timestamp(f[c[2]], cfg.timestamp_format);
                       if (!start) return reject("unparseable start time");
                       if (!end) return reject("unparseable end time");
                       if (f[c[3]].empty()) return reject("empty agent");
                       if (*end < *start) return reject("end before start");
                       bool known = false;
                       ActivityRecord rec{cfg.map_activity(f[c[0]], &known), *start, *end, f[c[3]]};
                       if (!known) ++out.unknown_activity_rows;
                       pending.push_back(Pending{std::move(rec), line_no, text});
                     });
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    if (a.rec.agent != b.rec.agent) return a.rec.agent < b.rec.agent;
    return a.rec.start < b.rec.start;
  });
  for (auto& p : pending) {
    if (!out.records.empty() && out.records.back().agent == p.rec.agent && p.rec.start < out.records.back().end) {
      out.rejects.push_back(RowReject{p.line, "overlaps previous interval of agent " + p.rec.agent, p.text});
      continue;
    }
    out.records.push_back(std::move(p.rec));
  }
  std::sort(out.rejects.begin(), out.rejects.end(),
            [](const RowReject& a, const RowReject& b) { return a.line < b.line; });
  return out;
}

}  // namespace ccsim::ingest
