#pragma once

// Static-topology checks shared by the sim tests and the acceptance runner.
// Nodes sit in a disk small enough that a reliable channel connects everyone.

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "leadsel/sim.hpp"

namespace leadsel::testing {

inline constexpr double kDiskRadius = 50.0;

inline SimConfig reliable_static(Variant variant, std::uint64_t seed, double duration) {
  SimConfig cfg;
  cfg.duration = duration;
  cfg.seed = seed;
  cfg.protocol.variant = variant;
  cfg.channel.reliable = true;
  return cfg;
}

inline std::vector<StaticNode> disk_nodes(int n, std::uint64_t seed, double radius = kDiskRadius) {
  Rng rng(mix64(seed ^ 0xD15C));
  std::vector<StaticNode> nodes;
  for (int i = 0; i < n; ++i) {
    const double r = radius * std::sqrt(rng.uniform());
    const double a = 2.0 * 3.14159265358979323846 * rng.uniform();
    nodes.push_back({VehicleId{static_cast<std::uint32_t>(i)}, {r * std::cos(a), r * std::sin(a)}, 0.0});
  }
  return nodes;
}

inline LeaderInfo info_of(const StaticNode& n) { return {n.id, n.position, norm(n.position)}; }

inline VehicleId best_of(const std::vector<StaticNode>& nodes, const OrderSpec& order) {
  LeaderInfo best = info_of(nodes.front());
  for (const auto& n : nodes) {
    if (order(info_of(n), best)) best = info_of(n);
  }
  return best.id;
}

/// First snapshot at or after `from` where someone disagrees with `leader`.
inline std::optional<std::string> disagreement(const RunResult& r, VehicleId leader, double from) {
  for (const auto& s : r.snapshots) {
    if (s.t < from - 1e-9) continue;
    for (const auto& p : s.participants) {
      if (p.believed_leader != leader) {
        std::ostringstream msg;
        msg << "t=" << s.t << ": node " << to_int(p.id) << " believes " << to_int(p.believed_leader)
            << ", expected " << to_int(leader);
        return msg.str();
      }
    }
  }
  return std::nullopt;
}

/// All nodes join at t=0 and must agree on the best node from 3 t_p onward.
inline std::optional<std::string> check_static_convergence(int n, std::uint64_t seed, Variant variant,
                                                           VehicleId* elected = nullptr) {
  const SimConfig cfg = reliable_static(variant, seed, 3.0);
  const auto nodes = disk_nodes(n, seed);
  const VehicleId best = best_of(nodes, order_for(cfg.order));
  const RunResult r = inject_static_topology(nodes, cfg);
  if (elected) *elected = r.snapshots.back().participants.front().believed_leader;
  return disagreement(r, best, 3.0 * cfg.protocol.t_p);
}

/// After the group settles, a node that ranks above everyone joins at t=2.
/// Nobody may switch to it and it must adopt the incumbent within 2 t_p.
inline std::optional<std::string> check_persistence(int n, std::uint64_t seed, Variant variant) {
  SimConfig cfg = reliable_static(variant, seed, 4.0);
  cfg.record_events = true;
  auto nodes = disk_nodes(n, seed);
  const OrderSpec order = order_for(cfg.order);
  const VehicleId incumbent = best_of(nodes, order);

  // Place the newcomer beyond the current best in both directions of the
  // order, then keep whichever spot actually ranks first.
  const double far = kDiskRadius + 5.0;
  const VehicleId newcomer_id{static_cast<std::uint32_t>(n)};
  const double join = 2.0;
  StaticNode newcomer{newcomer_id, {far, 0.0}, join};
  auto ranks_first = [&](const StaticNode& c) {
    return std::all_of(nodes.begin(), nodes.end(), [&](const StaticNode& x) { return order(info_of(c), info_of(x)); });
  };
  if (!ranks_first(newcomer)) newcomer.position = {0.0, 0.0};
  if (!ranks_first(newcomer)) return "could not place a better newcomer";
  nodes.push_back(newcomer);

  const RunResult r = inject_static_topology(nodes, cfg);
  std::optional<double> adopted_at;
  for (const auto& e : r.events) {
    if (e.kind != EventKind::adopt) continue;
    const auto& d = std::get<AdoptDetail>(e.detail);
    if (d.leader == newcomer_id) {
      std::ostringstream msg;
      msg << "t=" << e.t << ": node " << to_int(e.subject) << " switched to the newcomer";
      return msg.str();
    }
    if (e.subject == newcomer_id && d.leader == incumbent && !adopted_at) adopted_at = e.t;
    if (e.t >= join && e.subject != newcomer_id) {
      std::ostringstream msg;
      msg << "t=" << e.t << ": node " << to_int(e.subject) << " changed leader to " << to_int(d.leader);
      return msg.str();
    }
  }
  if (!adopted_at) return std::string("newcomer never adopted the incumbent");
  if (*adopted_at > join + 2.0 * cfg.protocol.t_p + 1e-9) {
    std::ostringstream msg;
    msg << "newcomer adopted the incumbent only at t=" << *adopted_at;
    return msg.str();
  }
  for (const auto& s : r.snapshots) {
    if (s.t < 3.0 * cfg.protocol.t_p - 1e-9) continue;
    for (const auto& p : s.participants) {
      if (p.believed_leader == incumbent) continue;
      if (p.id == newcomer_id && s.t <= *adopted_at + 1e-9) continue;
      std::ostringstream msg;
      msg << "t=" << s.t << ": node " << to_int(p.id) << " believes " << to_int(p.believed_leader);
      return msg.str();
    }
  }
  return std::nullopt;
}

}  // namespace leadsel::testing
