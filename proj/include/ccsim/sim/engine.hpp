#pragma once

// Event-driven multi-skill queue with Longest Idle Agent / Longest Waiting
// Call routing, abandonment and time-varying group staffing.
//
// Event order at equal times: staffing change, arrival, service end,
// abandonment, close; then insertion order. Idle agents are chosen by
// (idle since, agent index); waiting calls by (arrival time, skill index).
// A staffing decrease sends idle agents home first (highest index first);
// busy agents finish their call and leave afterwards. After closing, no
// arrivals occur and the last staffing level keeps serving the queue.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "ccsim/core/rng.hpp"
#include "ccsim/scenario.hpp"

namespace ccsim::sim {

struct CallSpec {
  double arrival = 0.0;
  std::uint32_t skill = 0;
  double patience = kInfinity;
  double handling = 0.0;
  double wrapup = 0.0;
};

struct StaffingChange {
  double time = 0.0;
  std::uint32_t group = 0;
  int count = 0;
};

struct EngineSetup {
  std::size_t skill_count = 0;
  std::vector<std::vector<std::uint32_t>> group_skills;
  std::vector<StaffingChange> staffing;  // ascending time; equal times keep their order
  double closing_time = 0.0;
  double time_to_answer = 60.0;
};

enum class EventKind : std::uint8_t { kStaffingChange = 0, kArrival = 1, kServiceEnd = 2, kAbandonment = 3, kClose = 4 };

// Default hooks: service time comes from the call spec, nothing is observed.
struct NullHooks {
  double service_time(std::size_t /*call*/, std::size_t /*agent*/, const CallSpec& spec) {
    return spec.handling + spec.wrapup;
  }
  void on_answer(std::size_t /*call*/, std::size_t /*agent*/, double /*t*/) {}
  void on_service_end(std::size_t /*call*/, std::size_t /*agent*/, double /*t*/) {}
  void on_abandon(std::size_t /*call*/, double /*t*/) {}
  void on_agent_online(std::size_t /*agent*/, double /*t*/) {}
  void on_agent_offline(std::size_t /*agent*/, double /*t*/) {}
};

class Engine {
 public:
  explicit Engine(EngineSetup setup) : setup_(std::move(setup)) {
    std::vector<int> pool(setup_.group_skills.size(), 0);
    for (const auto& c : setup_.staffing) pool.at(c.group) = std::max(pool[c.group], c.count);
    group_first_.resize(pool.size() + 1, 0);
    for (std::size_t g = 0; g < pool.size(); ++g) {
      group_first_[g + 1] = group_first_[g] + static_cast<std::size_t>(pool[g]);
    }
    agents_.resize(group_first_.back());
    for (std::size_t g = 0; g < pool.size(); ++g) {
      for (std::size_t a = group_first_[g]; a < group_first_[g + 1]; ++a) agents_[a].group = static_cast<std::uint32_t>(g);
    }
    idle_.resize(setup_.skill_count);
    queues_.resize(setup_.skill_count);
    heads_.resize(setup_.skill_count);
    active_.resize(pool.size());
  }

  std::size_t agent_count() const noexcept { return agents_.size(); }
  std::uint32_t group_of(std::size_t agent) const { return agents_.at(agent).group; }
  const EngineSetup& setup() const noexcept { return setup_; }

  // Calls must be sorted by arrival time.
  template <typename Hooks = NullHooks>
  DayMetrics run(std::span<const CallSpec> calls, Hooks&& hooks = Hooks{}) {
    reset(calls.size());
    DayMetrics m;
    std::size_t next_call = 0;
    std::size_t next_change = 0;
    bool closed = false;
    const auto& changes = setup_.staffing;
    for (;;) {
      // Pick the earliest of: staffing stream, arrival stream, close, future-event heap.
      EventKind kind{};
      double t = kInfinity;
      bool have = false;
      auto consider = [&](double time, EventKind k) {
        if (!have || time < t || (time == t && k < kind)) {
          t = time;
          kind = k;
          have = true;
        }
      };
      if (next_change < changes.size()) consider(changes[next_change].time, EventKind::kStaffingChange);
      if (next_call < calls.size()) consider(calls[next_call].arrival, EventKind::kArrival);
      if (!events_.empty()) consider(events_.top().time, events_.top().kind);
      if (!closed) consider(setup_.closing_time, EventKind::kClose);
      if (!have) break;
      now_ = t;
      switch (kind) {
        case EventKind::kStaffingChange: {
          const auto& c = changes[next_change++];
          apply_staffing(c.group, c.count, calls, hooks, m);
          break;
        }
        case EventKind::kArrival: on_arrival(next_call++, calls, hooks, m); break;
        case EventKind::kServiceEnd: {
          const auto agent = events_.top().id;
          events_.pop();
          on_service_end(agent, calls, hooks, m);
          break;
        }
        case EventKind::kAbandonment: {
          const auto call = events_.top().id;
          events_.pop();
          if (state_[call] == CallState::kWaiting) {
            state_[call] = CallState::kAbandoned;
            ++m.abandoned;
            m.wait_abandoned += now_ - calls[call].arrival;
            hooks.on_abandon(call, now_);
          }
          break;
        }
        case EventKind::kClose: closed = true; break;
      }
    }
    for (auto s : state_) m.unresolved += s == CallState::kWaiting;
    return m;
  }

 private:
  enum class CallState : std::uint8_t { kPending, kWaiting, kInService, kDone, kAbandoned };
  enum class AgentState : std::uint8_t { kOffline, kIdle, kBusy };

  struct Agent {
    std::uint32_t group = 0;
    AgentState state = AgentState::kOffline;
    bool leaving = false;
    std::uint32_t call = 0;
    std::uint32_t stamp = 0;
  };

  struct Event {
    double time;
    EventKind kind;
    std::uint64_t seq;
    std::uint32_t id;
    friend bool operator>(const Event& a, const Event& b) {
      if (a.time != b.time) return a.time > b.time;
      if (a.kind != b.kind) return a.kind > b.kind;
      return a.seq > b.seq;
    }
  };

  struct IdleEntry {
    double since;
    std::uint32_t agent;
    std::uint32_t stamp;
    friend bool operator>(const IdleEntry& a, const IdleEntry& b) {
      if (a.since != b.since) return a.since > b.since;
      return a.agent > b.agent;
    }
  };

  using IdleHeap = std::priority_queue<IdleEntry, std::vector<IdleEntry>, std::greater<>>;

  void reset(std::size_t n_calls) {
    now_ = 0.0;
    seq_ = 0;
    events_ = decltype(events_){};
    state_.assign(n_calls, CallState::kPending);
    for (auto& a : agents_) a = Agent{a.group};
    for (auto& h : idle_) h = IdleHeap{};
    for (auto& q : queues_) q.clear();
    std::fill(heads_.begin(), heads_.end(), 0);
    std::fill(active_.begin(), active_.end(), 0);
  }

  void push_event(double time, EventKind kind, std::uint32_t id) { events_.push(Event{time, kind, seq_++, id}); }

  const std::vector<std::uint32_t>& skills_of(std::size_t agent) const { return setup_.group_skills[agents_[agent].group]; }

  template <typename Hooks>
  void start_service(std::size_t call, std::size_t agent, std::span<const CallSpec> calls, Hooks& hooks, DayMetrics& m) {
    state_[call] = CallState::kInService;
    const double wait = now_ - calls[call].arrival;
    if (wait <= setup_.time_to_answer) ++m.answered_within_tta;
    else ++m.answered_late;
    m.wait_answered += wait;
    Agent& a = agents_[agent];
    a.state = AgentState::kBusy;
    a.call = static_cast<std::uint32_t>(call);
    ++a.stamp;
    hooks.on_answer(call, agent, now_);
    push_event(now_ + hooks.service_time(call, agent, calls[call]), EventKind::kServiceEnd, static_cast<std::uint32_t>(agent));
  }

  // Longest-waiting call among the agent's skills; ties go to the lower skill index.
  template <typename Hooks>
  bool take_waiting_call(std::size_t agent, std::span<const CallSpec> calls, Hooks& hooks, DayMetrics& m) {
    std::size_t best_skill = 0;
    std::size_t best_call = 0;
    bool found = false;
    for (auto s : skills_of(agent)) {
      auto& q = queues_[s];
      auto& head = heads_[s];
      while (head < q.size() && state_[q[head]] != CallState::kWaiting) ++head;
      if (head == q.size()) continue;
      const std::size_t c = q[head];
      if (!found || calls[c].arrival < calls[best_call].arrival) {
        best_call = c;
        best_skill = s;
        found = true;
      }
    }
    if (!found) return false;
    ++heads_[best_skill];
    start_service(best_call, agent, calls, hooks, m);
    return true;
  }

  void make_idle(std::size_t agent) {
    Agent& a = agents_[agent];
    a.state = AgentState::kIdle;
    ++a.stamp;
    for (auto s : skills_of(agent)) idle_[s].push(IdleEntry{now_, static_cast<std::uint32_t>(agent), a.stamp});
  }

  template <typename Hooks>
  void on_arrival(std::size_t call, std::span<const CallSpec> calls, Hooks& hooks, DayMetrics& m) {
    ++m.offered;
    const auto s = calls[call].skill;
    auto& heap = idle_[s];
    while (!heap.empty()) {
      const IdleEntry e = heap.top();
      const Agent& a = agents_[e.agent];
      if (a.state != AgentState::kIdle || a.stamp != e.stamp) {
        heap.pop();
        continue;
      }
      heap.pop();
      start_service(call, e.agent, calls, hooks, m);
      return;
    }
    state_[call] = CallState::kWaiting;
    queues_[s].push_back(static_cast<std::uint32_t>(call));
    const double patience = calls[call].patience;
    if (patience < kInfinity) push_event(now_ + patience, EventKind::kAbandonment, static_cast<std::uint32_t>(call));
  }

  template <typename Hooks>
  void on_service_end(std::size_t agent, std::span<const CallSpec> calls, Hooks& hooks, DayMetrics& m) {
    Agent& a = agents_[agent];
    state_[a.call] = CallState::kDone;
    hooks.on_service_end(a.call, agent, now_);
    if (a.leaving) {
      a.leaving = false;
      a.state = AgentState::kOffline;
      ++a.stamp;
      hooks.on_agent_offline(agent, now_);
      return;
    }
    if (!take_waiting_call(agent, calls, hooks, m)) make_idle(agent);
  }

  template <typename Hooks>
  void apply_staffing(std::uint32_t group, int target, std::span<const CallSpec> calls, Hooks& hooks, DayMetrics& m) {
    int& active = active_[group];
    const std::size_t first = group_first_[group];
    const std::size_t last = group_first_[group + 1];
    if (target > active) {
      for (std::size_t a = first; a < last && active < target; ++a) {
        if (agents_[a].state == AgentState::kBusy && agents_[a].leaving) {
          agents_[a].leaving = false;
          ++active;
        }
      }
      for (std::size_t a = first; a < last && active < target; ++a) {
        if (agents_[a].state != AgentState::kOffline) continue;
        ++active;
        hooks.on_agent_online(a, now_);
        if (!take_waiting_call(a, calls, hooks, m)) make_idle(a);
      }
    } else if (target < active) {
      for (std::size_t a = last; a-- > first && active > target;) {
        if (agents_[a].state != AgentState::kIdle) continue;
        agents_[a].state = AgentState::kOffline;
        ++agents_[a].stamp;
        --active;
        hooks.on_agent_offline(a, now_);
      }
      for (std::size_t a = last; a-- > first && active > target;) {
        if (agents_[a].state == AgentState::kBusy && !agents_[a].leaving) {
          agents_[a].leaving = true;
          --active;
        }
      }
    }
  }

  EngineSetup setup_;
  std::vector<std::size_t> group_first_;
  std::vector<Agent> agents_;
  std::vector<IdleHeap> idle_;
  std::vector<std::vector<std::uint32_t>> queues_;
  std::vector<std::size_t> heads_;
  std::vector<int> active_;
  std::vector<CallState> state_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  double now_ = 0.0;
  std::uint64_t seq_ = 0;
};

}  // namespace ccsim::sim
