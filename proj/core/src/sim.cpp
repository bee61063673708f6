#include "leadsel/sim.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>

#include "leadsel/error.hpp"

namespace leadsel {

namespace {

constexpr std::uint64_t kArrivalStream = 1;
constexpr std::uint64_t kChannelStream = 2;
constexpr std::uint64_t kPhaseStream = 3;

// Simulation time is kept in integer microseconds so that schedules never
// drift and event timestamps print identically everywhere.
using Micros = std::int64_t;

Micros to_us(double seconds) { return std::llround(seconds * 1e6); }
double to_seconds(Micros us) { return static_cast<double>(us) / 1e6; }

struct Agent {
  VehicleId id{};
  NodeState node;
  Position position;
  bool participant = false;
  Micros next_tick = 0;
  Micros next_beacon = 0;
};

enum class ActionKind : int { beacon = 0, tick = 1 };

struct Action {
  Micros t = 0;
  ActionKind kind = ActionKind::beacon;
  std::uint32_t id = 0;
  std::size_t index = 0;

  // std::priority_queue is a max-heap; invert for earliest-first.
  bool operator<(const Action& o) const {
    if (t != o.t) return t > o.t;
    if (kind != o.kind) return kind > o.kind;
    return id > o.id;
  }
};

class Engine {
 public:
  Engine(const SimConfig& cfg, const EventSink& sink)
      : cfg_(cfg),
        sink_(sink),
        order_(order_for(cfg.order)),
        channel_rng_(derive_seed(cfg.seed, kChannelStream)),
        phase_rng_(derive_seed(cfg.seed, kPhaseStream)),
        tick_period_(to_us(cfg.protocol.t_p)),
        beacon_period_(to_us(cfg.bsm_period)) {
    result_.seed = cfg.seed;
    result_.variant = cfg.protocol.variant;
    result_.volume = cfg.volume;
    result_.dt = cfg.scenario.dt;
  }

  bool logging() const { return static_cast<bool>(sink_) || cfg_.record_events; }

  void emit(Event e) {
    if (sink_) sink_(e);
    if (cfg_.record_events) result_.events.push_back(std::move(e));
  }

  void add_agent(VehicleId id, const Position& pos, Micros now, std::string approach) {
    Agent a;
    a.id = id;
    a.position = pos;
    a.node = new_node(id, info_for(id, pos), to_seconds(now), cfg_.protocol);
    a.next_tick = now + static_cast<Micros>(phase_rng_.below(static_cast<std::uint64_t>(tick_period_)));
    a.next_beacon = now + static_cast<Micros>(phase_rng_.below(static_cast<std::uint64_t>(beacon_period_)));
    auto it = std::lower_bound(agents_.begin(), agents_.end(), id,
                               [](const Agent& x, VehicleId v) { return to_int(x.id) < to_int(v); });
    agents_.insert(it, std::move(a));
    if (logging()) emit({to_seconds(now), EventKind::spawn, id, SpawnDetail{pos, std::move(approach)}});
  }

  void remove_agent(VehicleId id) {
    std::erase_if(agents_, [&](const Agent& a) { return a.id == id; });
  }

  Agent* find(VehicleId id) {
    auto it = std::lower_bound(agents_.begin(), agents_.end(), id,
                               [](const Agent& x, VehicleId v) { return to_int(x.id) < to_int(v); });
    return it != agents_.end() && it->id == id ? &*it : nullptr;
  }

  std::vector<Agent>& agents() { return agents_; }

  static LeaderInfo info_for(VehicleId id, const Position& pos) {
    return LeaderInfo{id, pos, norm(pos)};
  }

  void place(Agent& a, const Position& pos, bool participant) {
    a.position = pos;
    a.participant = participant;
    update_own_info(a.node, info_for(a.id, pos));
  }

  void run_interval(Micros t0, Micros t1) {
    std::priority_queue<Action> queue;
    auto schedule = [&](std::size_t i) {
      const Agent& a = agents_[i];
      if (a.next_beacon < t1) queue.push({a.next_beacon, ActionKind::beacon, to_int(a.id), i});
      if (a.next_tick < t1) queue.push({a.next_tick, ActionKind::tick, to_int(a.id), i});
    };
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      // Schedules never lag behind the interval start.
      agents_[i].next_beacon = std::max(agents_[i].next_beacon, t0);
      agents_[i].next_tick = std::max(agents_[i].next_tick, t0);
      schedule(i);
    }
    while (!queue.empty()) {
      const Action act = queue.top();
      queue.pop();
      Agent& a = agents_[act.index];
      if (act.kind == ActionKind::beacon) {
        beacon(act.index, act.t);
        a.next_beacon += beacon_period_;
        if (a.next_beacon < t1) queue.push({a.next_beacon, ActionKind::beacon, act.id, act.index});
      } else {
        run_tick(act.index, act.t);
        a.next_tick += tick_period_;
        if (a.next_tick < t1) queue.push({a.next_tick, ActionKind::tick, act.id, act.index});
      }
    }
  }

  void snapshot(Micros t) {
    Snapshot snap;
    snap.t = to_seconds(t);
    for (const auto& a : agents_) {
      if (!a.participant) continue;
      snap.participants.push_back({a.id, a.node.believed_leader.id, a.node.is_self_leader});
    }
    result_.snapshots.push_back(std::move(snap));
  }

  RunResult take() { return std::move(result_); }

 private:
  std::vector<Receiver> receivers_except(std::size_t sender) const {
    std::vector<Receiver> out;
    out.reserve(agents_.size());
    for (std::size_t i = 0; i < agents_.size(); ++i) {
      if (i != sender) out.push_back({agents_[i].id, agents_[i].position});
    }
    return out;
  }

  void beacon(std::size_t index, Micros now) {
    ++result_.bsm_count;
    const auto receivers = receivers_except(index);
    const VehicleId from = agents_[index].id;
    for (VehicleId id : broadcast(agents_[index].position, receivers, cfg_.channel, channel_rng_)) {
      on_beacon(find(id)->node, from, to_seconds(now));
    }
  }

  void run_tick(std::size_t index, Micros now) {
    Agent& a = agents_[index];
    const double t = to_seconds(now);
    const VehicleId before = a.node.believed_leader.id;
    TickResult r = tick(a.node, t, order_, cfg_.protocol);
    if (logging()) {
      if (r.self_promoted) emit({t, EventKind::self_promote, a.id, {}});
      if (r.adopted) {
        emit({t, EventKind::adopt, a.id, AdoptDetail{*r.adopted, r.self_promoted ? a.id : before}});
      }
      if (r.mode_changed) emit({t, EventKind::mode_change, a.id, ModeDetail{*r.mode_changed}});
    }
    // Outside the participation radius a vehicle listens but stays silent.
    if (!a.participant) return;
    for (auto& msg : r.transmit) transmit(index, msg, now);
  }

  void transmit(std::size_t index, const LeaderMessage& msg, Micros now) {
    const double t = to_seconds(now);
    const VehicleId sender = agents_[index].id;
    ++result_.leader_msg_count;
    if (logging()) emit({t, EventKind::tx_leader_msg, sender, TxDetail{msg, msg.leader != sender}});
    const auto receivers = receivers_except(index);
    for (VehicleId id : broadcast(agents_[index].position, receivers, cfg_.channel, channel_rng_)) {
      if (logging()) emit({t, EventKind::rx_leader_msg, id, RxDetail{msg.leader, msg.seq, sender}});
      on_receive(find(id)->node, msg, t);
    }
  }

  const SimConfig& cfg_;
  const EventSink& sink_;
  OrderSpec order_;
  Rng channel_rng_;
  Rng phase_rng_;
  Micros tick_period_;
  Micros beacon_period_;
  std::vector<Agent> agents_;
  RunResult result_;
};

std::int64_t step_count(const SimConfig& cfg) {
  return static_cast<std::int64_t>(std::ceil(cfg.duration / cfg.scenario.dt - 1e-9));
}

}  // namespace

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::spawn: return "spawn";
    case EventKind::despawn: return "despawn";
    case EventKind::tx_leader_msg: return "tx_leader_msg";
    case EventKind::rx_leader_msg: return "rx_leader_msg";
    case EventKind::adopt: return "adopt";
    case EventKind::self_promote: return "self_promote";
    case EventKind::mode_change: return "mode_change";
    case EventKind::cross: return "cross";
  }
  return "unknown";
}

void SimConfig::validate() const {
  if (!(duration > 0.0)) throw ConfigError("duration must be positive");
  protocol.validate();
  channel.validate();
  scenario.validate();
  if (!(bsm_period > 0.0)) throw ConfigError("bsm_period must be positive");
  if (!(participation_radius > 0.0)) throw ConfigError("participation_radius must be positive");
  if (to_us(protocol.t_p) < 1 || to_us(bsm_period) < 1 || to_us(scenario.dt) < 1) {
    throw ConfigError("periods must be at least one microsecond");
  }
}

RunResult run(const SimConfig& cfg, const EventSink& sink) {
  cfg.validate();
  Engine engine(cfg, sink);
  const ScenarioConfig& sc = cfg.scenario;
  const Micros dt = to_us(sc.dt);
  const auto steps = step_count(cfg);

  Rng arrivals(derive_seed(cfg.seed, kArrivalStream));
  Traffic traffic;
  LightState light = light_at(0.0, sc);

  for (std::int64_t k = 0; k < steps; ++k) {
    const Micros t0 = k * dt;
    const double now = to_seconds(t0);
    if (k > 0) {
      const StepOutcome moved = step(traffic, light, sc, sc.dt);
      for (VehicleId id : moved.crossed) {
        engine.remove_agent(id);
        if (engine.logging()) engine.emit({now, EventKind::cross, id, {}});
      }
      for (VehicleId id : moved.removed) {
        if (engine.logging()) engine.emit({now, EventKind::despawn, id, {}});
      }
    }
    for (const VehicleState& v : spawn(traffic, arrivals, sc)) {
      engine.add_agent(v.id, position_of(v, sc), t0, to_string(v.approach));
    }

    // Both sequences ascend by id; crossed vehicles have no agent.
    auto vit = traffic.vehicles.begin();
    for (Agent& a : engine.agents()) {
      while (vit != traffic.vehicles.end() && to_int(vit->id) < to_int(a.id)) ++vit;
      const Position pos = position_of(*vit, sc);
      engine.place(a, pos, norm(pos) <= cfg.participation_radius);
    }

    engine.run_interval(t0, t0 + dt);
    engine.snapshot(t0 + dt);
  }
  return engine.take();
}

RunResult inject_static_topology(std::span<const StaticNode> nodes, const SimConfig& cfg,
                                 const EventSink& sink) {
  cfg.validate();
  std::set<std::uint32_t> ids;
  for (const auto& n : nodes) {
    if (!ids.insert(to_int(n.id)).second) {
      throw ConfigError("duplicate vehicle id " + std::to_string(to_int(n.id)));
    }
  }
  std::vector<StaticNode> pending(nodes.begin(), nodes.end());
  std::stable_sort(pending.begin(), pending.end(), [](const StaticNode& a, const StaticNode& b) {
    return a.join_time != b.join_time ? a.join_time < b.join_time : to_int(a.id) < to_int(b.id);
  });

  Engine engine(cfg, sink);
  const Micros dt = to_us(cfg.scenario.dt);
  const auto steps = step_count(cfg);
  std::size_t next = 0;
  for (std::int64_t k = 0; k < steps; ++k) {
    const Micros t0 = k * dt;
    while (next < pending.size() && to_us(pending[next].join_time) <= t0) {
      engine.add_agent(pending[next].id, pending[next].position, t0, "");
      Agent* a = engine.find(pending[next].id);
      engine.place(*a, pending[next].position, true);
      ++next;
    }
    engine.run_interval(t0, t0 + dt);
    engine.snapshot(t0 + dt);
  }
  return engine.take();
}

}  // namespace leadsel
