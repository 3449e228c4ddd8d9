#pragma once

// Agent-level day generator producing call and activity logs in the ingest
// formats. Individual agents work shifts, take breaks when idle, handle calls
// under LIA-LWC routing and do after-call wrap-up. All times are whole seconds.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <ostream>
#include <queue>
#include <string>
#include <vector>

#include "ccsim/core/csv.hpp"
#include "ccsim/core/rng.hpp"
#include "ccsim/ingest/records.hpp"
#include "ccsim/synth/spec.hpp"

namespace ccsim::synth {

using ingest::Activity;
using ingest::ActivityRecord;
using ingest::CallRecord;

struct AgentTruth {
  std::string id;
  std::size_t group = 0;
  double speed = 1.0;  // alpha factor
  double gamma = 0.0;
};

struct DayTruth {
  CivilDate date;
  double volume_factor = 1.0;
  std::vector<double> aht_factor;            // [skill]
  std::vector<std::vector<int>> arrivals;    // [skill][interval]
  std::vector<double> true_aht;             // [skill] mean HT of the day at speed 1
};

struct RealityLogs {
  std::vector<CallRecord> calls;
  std::vector<ActivityRecord> activities;
  std::vector<AgentTruth> agents;
  std::vector<DayTruth> days;
};

namespace detail {

enum class Ev : std::uint8_t { kShiftStart, kBreakEnd, kWrapEnd, kServiceEnd, kShiftEnd, kBreakDue, kArrival, kAbandon };

struct Event {
  std::int64_t time;
  Ev kind;
  std::uint64_t seq;
  std::size_t who;  // agent or call index
  bool operator>(const Event& o) const {
    if (time != o.time) return time > o.time;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

enum class State : std::uint8_t { kOff, kIdle, kBusy, kWrap, kBreak };

struct AgentState {
  State state = State::kOff;
  std::int64_t idle_since = 0;
  std::int64_t segment_start = 0;
  int pending_breaks = 0;
  bool leaving = false;
  std::size_t call = 0;
  std::vector<std::int64_t> break_lengths;  // in due order
  std::size_t next_break = 0;
};

struct CallState {
  std::int64_t arrival = 0;
  std::size_t skill = 0;
  std::int64_t patience = 0;
  bool waiting = true;
  std::optional<std::size_t> agent;
  std::int64_t answered = 0;
  std::int64_t departure = 0;
};

inline std::int64_t whole_seconds(double x, std::int64_t min) {
  return std::max(min, static_cast<std::int64_t>(std::llround(x)));
}

}  // namespace detail

class RealityGenerator {
 public:
  RealityGenerator(SyntheticSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
    validate(spec_);
    RandomStream rng(derive_seed(seed_, {static_cast<std::uint64_t>(Stream::kReality), 0}));
    for (std::size_t g = 0; g < spec_.groups.size(); ++g) {
      int n = 0;
      for (const auto& sh : spec_.groups[g].shifts) {
        for (int a = 0; a < sh.agents; ++a, ++n) {
          AgentTruth t;
          t.id = "G" + std::to_string(g + 1) + "A" + std::to_string(n + 1);
          t.group = g;
          t.speed = spec_.learning.alpha_sd > 0.0 ? rng.lognormal(0.0, spec_.learning.alpha_sd) : 1.0;
          t.gamma = spec_.learning.gamma_max > 0.0 ? rng.uniform(0.0, spec_.learning.gamma_max) : 0.0;
          agents_.push_back(std::move(t));
          shift_of_.push_back(sh);
        }
      }
      std::vector<std::size_t> skills;
      for (const auto& name : spec_.groups[g].skills) skills.push_back(skill_index(name));
      std::sort(skills.begin(), skills.end());
      group_skills_.push_back(std::move(skills));
    }
  }

  const std::vector<AgentTruth>& agents() const noexcept { return agents_; }

  RealityLogs generate() {
    RealityLogs out;
    out.agents = agents_;
    for (std::size_t d = 0; d < spec_.n_days; ++d) simulate_day(d, out);
    std::sort(out.calls.begin(), out.calls.end(),
              [](const CallRecord& a, const CallRecord& b) { return a.arrival < b.arrival; });
    return out;
  }

 private:
  std::size_t skill_index(const std::string& name) const {
    for (std::size_t k = 0; k < spec_.skills.size(); ++k) {
      if (spec_.skills[k].name == name) return k;
    }
    throw ConfigError("unknown skill " + name);
  }

  void simulate_day(std::size_t day_index, RealityLogs& out) {
    using namespace detail;
    const CivilDate date = CivilDate::from_days(spec_.start_date.days_since_epoch() + static_cast<std::int64_t>(day_index));
    auto stream = [&](std::uint64_t s) {
      return RandomStream(derive_seed(seed_, {static_cast<std::uint64_t>(Stream::kReality), 1 + day_index, s}));
    };
    RandomStream day_rng = stream(0), arrivals_rng = stream(1), duration_rng = stream(2), break_rng = stream(3);
    const std::size_t ns = spec_.skills.size();
    DayTruth truth;
    truth.date = date;
    truth.volume_factor = spec_.day_volume_sd > 0.0
                              ? day_rng.lognormal(-0.5 * spec_.day_volume_sd * spec_.day_volume_sd, spec_.day_volume_sd)
                              : 1.0;
    for (std::size_t k = 0; k < ns; ++k) {
      const double v = spec_.aht_day_variation;
      truth.aht_factor.push_back(v > 0.0 ? day_rng.uniform(1.0 - v, 1.0 + v) : 1.0);
      const auto& sk = spec_.skills[k];
      truth.true_aht.push_back(truth.aht_factor[k] * std::exp(sk.mu_log + 0.5 * sk.sigma_log * sk.sigma_log));
    }

    std::vector<CallState> calls;
    const std::int64_t open = spec_.opening_seconds;
    truth.arrivals.assign(ns, std::vector<int>(spec_.interval_count, 0));
    for (std::size_t k = 0; k < ns; ++k) {
      for (std::size_t i = 0; i < spec_.interval_count; ++i) {
        const auto n = arrivals_rng.poisson(spec_.skills[k].rates[i] * truth.volume_factor);
        truth.arrivals[k][i] = static_cast<int>(n);
        const auto lo = static_cast<std::int64_t>(i) * spec_.interval_seconds;
        for (std::int64_t j = 0; j < n; ++j) {
          CallState c;
          c.arrival = lo + static_cast<std::int64_t>(arrivals_rng.uniform() * static_cast<double>(spec_.interval_seconds));
          c.skill = k;
          calls.push_back(c);
        }
      }
    }
    std::stable_sort(calls.begin(), calls.end(), [](const CallState& a, const CallState& b) {
      return a.arrival < b.arrival || (a.arrival == b.arrival && a.skill < b.skill);
    });
    for (auto& c : calls) {
      const auto& p = spec_.skills[c.skill].patience;
      std::size_t comp = 0;
      double u = duration_rng.uniform();
      while (comp + 1 < p.weights.size() && u >= p.weights[comp]) u -= p.weights[comp++];
      c.patience = whole_seconds(duration_rng.exponential(p.means[comp]), 1);
    }

    std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
    std::uint64_t seq = 0;
    auto push = [&](std::int64_t t, Ev kind, std::size_t who) { events.push(Event{t, kind, seq++, who}); };

    std::vector<AgentState> agents(agents_.size());
    for (std::size_t a = 0; a < agents_.size(); ++a) {
      const auto& sh = shift_of_[a];
      const std::int64_t start = sh.start - open, end = sh.end - open;
      push(start, Ev::kShiftStart, a);
      push(end, Ev::kShiftEnd, a);
      const double hours = static_cast<double>(end - start) / 3600.0;
      const auto n = break_rng.poisson(spec_.breaks.rate_per_hour * hours);
      std::vector<std::int64_t> due;
      for (std::int64_t b = 0; b < n; ++b) {
        due.push_back(start + static_cast<std::int64_t>(break_rng.uniform() * static_cast<double>(end - start)));
      }
      std::sort(due.begin(), due.end());
      for (auto t : due) {
        push(t, Ev::kBreakDue, a);
        std::size_t comp = 0;
        double u = break_rng.uniform();
        while (comp + 1 < spec_.breaks.weights.size() && u >= spec_.breaks.weights[comp]) u -= spec_.breaks.weights[comp++];
        const double secs = spec_.breaks.durations_minutes[comp] * 60.0 + break_rng.normal(0.0, spec_.breaks.jitter_seconds);
        agents[a].break_lengths.push_back(whole_seconds(secs, 60));
      }
    }
    for (std::size_t c = 0; c < calls.size(); ++c) push(calls[c].arrival, Ev::kArrival, c);

    std::vector<std::deque<std::size_t>> queues(ns);
    auto ts = [&](std::int64_t t) { return Timestamp::from_parts(date, open + t); };
    auto record = [&](Activity kind, std::int64_t s, std::int64_t e, std::size_t a) {
      out.activities.push_back(ActivityRecord{kind, ts(s), ts(e), agents_[a].id});
    };
    auto close_segment = [&](std::size_t a, std::int64_t now) {
      if (now > agents[a].segment_start) record(Activity::kTakingCalls, agents[a].segment_start, now, a);
      agents[a].segment_start = now;
    };
    auto handling_time = [&](std::size_t a, std::size_t k) {
      const auto& sk = spec_.skills[k];
      const auto& at = agents_[a];
      const double learn = at.speed * std::exp(-at.gamma * static_cast<double>(day_index));
      return whole_seconds(duration_rng.lognormal(sk.mu_log, sk.sigma_log) * truth.aht_factor[k] * learn, 1);
    };
    auto start_service = [&](std::size_t a, std::size_t c, std::int64_t now) {
      auto& ag = agents[a];
      auto& call = calls[c];
      call.waiting = false;
      call.agent = a;
      call.answered = now;
      call.departure = now + handling_time(a, call.skill);
      ag.state = State::kBusy;
      ag.call = c;
      push(call.departure, Ev::kServiceEnd, a);
    };
    // Longest waiting call across the agent's skills; ties to the lower skill.
    auto next_call = [&](std::size_t a) -> std::optional<std::size_t> {
      std::optional<std::size_t> best;
      for (auto k : group_skills_[agents_[a].group]) {
        auto& q = queues[k];
        while (!q.empty() && !calls[q.front()].waiting) q.pop_front();
        if (!q.empty() && (!best || calls[q.front()].arrival < calls[*best].arrival)) best = q.front();
      }
      return best;
    };
    auto start_break = [&](std::size_t a, std::int64_t now) {
      auto& ag = agents[a];
      close_segment(a, now);
      const auto len = ag.break_lengths[ag.next_break++];
      record(spec_.breaks.paid ? Activity::kBreakPaid : Activity::kBreakUnpaid, now, now + len, a);
      ag.state = State::kBreak;
      ag.segment_start = now + len;
      push(now + len, Ev::kBreakEnd, a);
    };
    auto become_available = [&](std::size_t a, std::int64_t now) {
      auto& ag = agents[a];
      if (ag.leaving) {
        close_segment(a, now);
        ag.state = State::kOff;
        return;
      }
      if (ag.pending_breaks > 0) {
        --ag.pending_breaks;
        start_break(a, now);
        return;
      }
      if (auto c = next_call(a)) {
        start_service(a, *c, now);
        return;
      }
      ag.state = State::kIdle;
      ag.idle_since = now;
    };

    while (!events.empty()) {
      const Event e = events.top();
      events.pop();
      const std::int64_t now = e.time;
      switch (e.kind) {
        case Ev::kShiftStart:
          agents[e.who].segment_start = now;
          become_available(e.who, now);
          break;
        case Ev::kShiftEnd: {
          auto& ag = agents[e.who];
          if (ag.state == State::kIdle) {
            close_segment(e.who, now);
            ag.state = State::kOff;
          } else if (ag.state != State::kOff) {
            ag.leaving = true;
          }
          break;
        }
        case Ev::kBreakDue: {
          auto& ag = agents[e.who];
          if (ag.state == State::kIdle) start_break(e.who, now);
          else if (ag.state != State::kOff && !ag.leaving) ++ag.pending_breaks;
          else ++ag.next_break;  // skipped
          break;
        }
        case Ev::kBreakEnd: become_available(e.who, now); break;
        case Ev::kArrival: {
          auto& call = calls[e.who];
          std::optional<std::size_t> best;
          for (std::size_t a = 0; a < agents.size(); ++a) {
            if (agents[a].state != State::kIdle) continue;
            const auto& gs = group_skills_[agents_[a].group];
            if (!std::binary_search(gs.begin(), gs.end(), call.skill)) continue;
            if (!best || agents[a].idle_since < agents[*best].idle_since) best = a;
          }
          if (best) {
            start_service(*best, e.who, now);
          } else {
            queues[call.skill].push_back(e.who);
            push(now + call.patience, Ev::kAbandon, e.who);
          }
          break;
        }
        case Ev::kAbandon: {
          auto& call = calls[e.who];
          if (call.waiting) {
            call.waiting = false;
            call.departure = now;
          }
          break;
        }
        case Ev::kServiceEnd: {
          const std::size_t a = e.who;
          close_segment(a, now);
          std::int64_t w = 0;
          if (spec_.wrapup.mean > 0.0 && duration_rng.uniform() >= spec_.wrapup.zero_fraction) {
            w = whole_seconds(duration_rng.exponential(spec_.wrapup.mean / (1.0 - spec_.wrapup.zero_fraction)), 0);
          }
          record(Activity::kWrapUp, now, now + w, a);
          agents[a].state = State::kWrap;
          agents[a].segment_start = now + w;
          push(now + w, Ev::kWrapEnd, a);
          break;
        }
        case Ev::kWrapEnd: become_available(e.who, now); break;
      }
    }

    for (const auto& c : calls) {
      CallRecord r;
      r.arrival = ts(c.arrival);
      r.skill = spec_.skills[c.skill].name;
      if (c.agent) {
        r.agent = agents_[*c.agent].id;
        r.answered = ts(c.answered);
      }
      r.departure = ts(c.departure);
      out.calls.push_back(std::move(r));
    }
    out.days.push_back(std::move(truth));
  }

  SyntheticSpec spec_;
  std::uint64_t seed_;
  std::vector<AgentTruth> agents_;
  std::vector<ShiftSpec> shift_of_;
  std::vector<std::vector<std::size_t>> group_skills_;
};

inline RealityLogs generate_reality(const SyntheticSpec& spec, std::uint64_t seed) {
  return RealityGenerator(spec, seed).generate();
}

inline constexpr const char* kLogTimestampFormat = "%m/%d/%Y %H:%M:%S";

inline void write_call_log(std::ostream& out, const std::vector<CallRecord>& calls) {
  out << "Call Arrival Time,Skill ID,Agent ID,Answered time,Call Departure Time\n";
  for (const auto& c : calls) {
    out << format_timestamp(c.arrival, kLogTimestampFormat) << ',' << csv::escape(c.skill) << ','
        << (c.agent ? csv::escape(*c.agent) : std::string()) << ','
        << (c.answered ? format_timestamp(*c.answered, kLogTimestampFormat) : std::string()) << ','
        << format_timestamp(c.departure, kLogTimestampFormat) << '\n';
  }
}

inline std::string_view log_name(Activity a) {
  switch (a) {
    case Activity::kTakingCalls: return "Taking calls";
    case Activity::kWrapUp: return "Wrap up";
    case Activity::kBreakPaid: return "Paid break";
    case Activity::kBreakUnpaid: return "Unpaid break";
    case Activity::kLoggingIn: return "Logging in";
    case Activity::kMeeting: return "Meeting";
    case Activity::kOther: break;
  }
  return "Other";
}

inline void write_activity_log(std::ostream& out, const std::vector<ActivityRecord>& activities) {
  out << "Activity,Start time,End time,Agent ID\n";
  for (const auto& a : activities) {
    out << log_name(a.activity) << ',' << format_timestamp(a.start, kLogTimestampFormat) << ','
        << format_timestamp(a.end, kLogTimestampFormat) << ',' << csv::escape(a.agent) << '\n';
  }
}

// Ingest configuration matching the generated logs.
inline Json ingest_config_for(const SyntheticSpec& spec) {
  Json j;
  j["opening_time"] = format_clock(spec.opening_seconds);
  j["interval_minutes"] = spec.interval_seconds / 60;
  j["interval_count"] = spec.interval_count;
  Json skills = Json::array();
  for (const auto& k : spec.skills) skills.push_back(k.name);
  j["skills"] = skills;
  return j;
}

inline Json ground_truth(const SyntheticSpec& spec, std::uint64_t seed, const RealityLogs& logs) {
  Json j;
  j["seed"] = seed;
  j["spec"] = to_json(spec);
  Json agents = Json::array();
  for (const auto& a : logs.agents) {
    agents.push_back({{"id", a.id}, {"group", a.group}, {"speed", a.speed}, {"gamma", a.gamma}});
  }
  j["agents"] = agents;
  Json days = Json::array();
  for (const auto& d : logs.days) {
    days.push_back({{"date", d.date.iso()},
                    {"volume_factor", d.volume_factor},
                    {"aht_factor", d.aht_factor},
                    {"true_aht", d.true_aht},
                    {"arrival_counts", d.arrivals}});
  }
  j["days"] = days;
  return j;
}

}  // namespace ccsim::synth
