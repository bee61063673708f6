#include "leadsel/protocol.hpp"

#include <algorithm>
#include <cmath>

#include "leadsel/error.hpp"

namespace leadsel {

namespace {

// Tolerance for comparing tick times against periods accumulated in floating
// point.
constexpr double kTimeEps = 1e-9;

// A self-leader that keeps hearing an established rival is not established
// itself, however long it has held the role (e.g. a silent vehicle outside
// the participation radius).
bool is_established(const NodeState& s, double now, const ProtocolConfig& cfg) {
  return now - s.leader_since >= cfg.consensus_quiet - kTimeEps &&
         now - s.last_established_rival >= cfg.consensus_quiet - kTimeEps;
}

void set_mode(NodeState& s, Mode mode, TickResult& out) {
  if (s.mode != mode) {
    s.mode = mode;
    out.mode_changed = mode;
  }
}

void become_self_leader(NodeState& s, double now, TickResult& out) {
  s.believed_leader = s.own_info;
  s.is_self_leader = true;
  s.leader_established = false;
  s.leader_since = now;
  s.last_conflict = now;
  set_mode(s, Mode::fast, out);
}

// Newest buffered copy per leader, excluding messages that name this node.
std::vector<const LeaderMessage*> newest_per_leader(const NodeState& s) {
  std::vector<const LeaderMessage*> newest;
  for (const auto& msg : s.rx_buffer) {
    if (msg.leader == s.self_id) continue;
    auto it = std::find_if(newest.begin(), newest.end(),
                           [&](const LeaderMessage* m) { return m->leader == msg.leader; });
    if (it == newest.end()) {
      newest.push_back(&msg);
    } else if (msg.seq > (*it)->seq) {
      *it = &msg;
    }
  }
  return newest;
}

// Established leaders outrank fresh claimants; otherwise the order decides.
bool outranks(bool a_established, const LeaderInfo& a, bool b_established,
              const LeaderInfo& b, const OrderSpec& order) {
  if (a_established != b_established) return a_established;
  return order(a, b);
}

bool relay_covered(const NodeState& s, VehicleId leader,
                   const std::vector<VehicleId>& own_neighbors) {
  std::vector<VehicleId> covered;
  for (const auto& msg : s.rx_buffer) {
    if (msg.leader != leader) continue;
    covered.push_back(msg.relayer);
    if (msg.neighbors) covered.insert(covered.end(), msg.neighbors->begin(), msg.neighbors->end());
  }
  std::sort(covered.begin(), covered.end());
  return std::all_of(own_neighbors.begin(), own_neighbors.end(), [&](VehicleId id) {
    return std::binary_search(covered.begin(), covered.end(), id);
  });
}

}  // namespace

OrderSpec::OrderSpec() : better_(&nearest_first) {}

bool nearest_first(const LeaderInfo& a, const LeaderInfo& b) noexcept {
  if (a.dist_to_intersection != b.dist_to_intersection) {
    return a.dist_to_intersection < b.dist_to_intersection;
  }
  return to_int(a.id) < to_int(b.id);
}

bool farthest_first(const LeaderInfo& a, const LeaderInfo& b) noexcept {
  if (a.dist_to_intersection != b.dist_to_intersection) {
    return a.dist_to_intersection > b.dist_to_intersection;
  }
  return to_int(a.id) < to_int(b.id);
}

std::string to_string(OrderRule r) { return r == OrderRule::nearest ? "nearest" : "farthest"; }

OrderRule parse_order_rule(std::string_view s) {
  if (s == "nearest") return OrderRule::nearest;
  if (s == "farthest") return OrderRule::farthest;
  throw ConfigError("order must be one of {nearest, farthest}, got '" + std::string(s) + "'");
}

OrderSpec order_for(OrderRule r) {
  return r == OrderRule::nearest ? OrderSpec(&nearest_first) : OrderSpec(&farthest_first);
}

void ProtocolConfig::validate() const {
  if (!(t_p > 0.0)) throw ConfigError("t_p must be positive");
  if (!(t_p <= t_p_slow)) throw ConfigError("t_p_slow must be >= t_p");
  if (!(t_silence > t_p)) throw ConfigError("t_silence must be > t_p");
  if (!(consensus_quiet >= t_p)) throw ConfigError("consensus_quiet must be >= t_p");
  if (!(neighbor_timeout > 0.0)) throw ConfigError("neighbor_timeout must be positive");
}

NodeState new_node(VehicleId self_id, const LeaderInfo& info, double now,
                   const ProtocolConfig& /*cfg*/) {
  if (info.id != self_id) throw std::invalid_argument("new_node: info.id must equal self_id");
  NodeState s;
  s.self_id = self_id;
  s.own_info = info;
  s.believed_leader = info;
  s.is_self_leader = true;
  s.last_heartbeat = now;
  s.leader_since = now;
  s.last_conflict = now;
  s.mode = Mode::fast;
  return s;
}

void on_receive(NodeState& s, const LeaderMessage& msg, double now) {
  if (msg.relayer != s.self_id) s.neighbor_table[msg.relayer] = now;
  if (!s.is_self_leader && msg.leader == s.believed_leader.id) s.last_heartbeat = now;
  if (s.dedup.contains(MessageKey{msg.leader, msg.seq})) return;
  s.rx_buffer.push_back(msg);
}

void on_beacon(NodeState& s, VehicleId from, double now) {
  if (from != s.self_id) s.neighbor_table[from] = now;
}

void update_own_info(NodeState& s, const LeaderInfo& info) {
  s.own_info = info;
  if (s.is_self_leader) s.believed_leader = info;
}

std::vector<VehicleId> live_neighbors(const NodeState& s, double now,
                                      const ProtocolConfig& cfg) {
  std::vector<VehicleId> out;
  for (const auto& [id, heard] : s.neighbor_table) {
    if (now - heard <= cfg.neighbor_timeout) out.push_back(id);
  }
  return out;
}

TickResult tick(NodeState& s, double now, const OrderSpec& order, const ProtocolConfig& cfg) {
  TickResult out;
  const bool optimized = cfg.variant == Variant::optimized;

  std::erase_if(s.neighbor_table,
                [&](const auto& entry) { return now - entry.second > cfg.neighbor_timeout; });

  // Heartbeat check. Only messages naming the believed leader count, so a
  // departed leader is detected even while rival claims are in the air.
  if (!s.is_self_leader && now - s.last_heartbeat > cfg.t_silence) {
    become_self_leader(s, now, out);
    out.self_promoted = true;
  }

  const auto candidates = newest_per_leader(s);
  if (s.is_self_leader && !candidates.empty()) s.last_conflict = now;
  if (s.is_self_leader && std::any_of(candidates.begin(), candidates.end(),
                                      [](const LeaderMessage* m) { return m->established; })) {
    s.last_established_rival = now;
  }

  const LeaderMessage* best = nullptr;
  for (const LeaderMessage* m : candidates) {
    if (best == nullptr || outranks(m->established, m->info, best->established, best->info, order)) {
      best = m;
    }
  }

  if (best != nullptr) {
    bool relay = false;
    if (!s.is_self_leader && best->leader == s.believed_leader.id) {
      s.believed_leader = best->info;
      s.leader_established = best->established;
      relay = true;
    } else {
      const bool self_est = s.is_self_leader ? is_established(s, now, cfg) : s.leader_established;
      if (outranks(best->established, best->info, self_est, s.believed_leader, order)) {
        s.believed_leader = best->info;
        s.leader_established = best->established;
        s.is_self_leader = false;
        s.last_heartbeat = now;
        set_mode(s, Mode::fast, out);
        out.adopted = best->leader;
        relay = true;
      }
    }

    if (relay) {
      const auto neighbors = live_neighbors(s, now, cfg);
      if (optimized && relay_covered(s, best->leader, neighbors)) {
        out.relay_suppressed = true;
      } else {
        LeaderMessage copy = *best;
        copy.relayer = s.self_id;
        copy.neighbors.reset();
        if (optimized) copy.neighbors = neighbors;
        out.transmit.push_back(std::move(copy));
      }
    }
  }

  if (s.is_self_leader) {
    s.believed_leader = s.own_info;
    s.leader_established = is_established(s, now, cfg);
    const bool quiet = now - s.last_conflict >= cfg.consensus_quiet - kTimeEps;
    set_mode(s, optimized && !cfg.fast_payload && quiet ? Mode::slow : Mode::fast, out);

    const double period = s.mode == Mode::slow ? cfg.t_p_slow : cfg.t_p;
    // Fast-mode leaders originate on every tick regardless of tick jitter.
    if (s.mode == Mode::fast || now - s.last_origination >= period - kTimeEps) {
      LeaderMessage msg;
      msg.leader = s.self_id;
      msg.seq = ++s.seq_counter;
      msg.info = s.own_info;
      msg.relayer = s.self_id;
      msg.established = s.leader_established;
      if (optimized) msg.neighbors = live_neighbors(s, now, cfg);
      s.dedup.insert(MessageKey{msg.leader, msg.seq});
      s.last_origination = now;
      out.transmit.push_back(std::move(msg));
    }
  }

  for (const auto& msg : s.rx_buffer) s.dedup.insert(MessageKey{msg.leader, msg.seq});
  s.rx_buffer.clear();
  return out;
}

}  // namespace leadsel
