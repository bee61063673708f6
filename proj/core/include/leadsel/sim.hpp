#pragma once

// Deterministic time-stepped simulation wiring mobility, protocol and channel.
//
// Each step of length dt covers the interval [t0, t0 + dt):
//   1. mobility advances to t0 and new arrivals spawn; vehicles that passed the
//      stop line leave the protocol group;
//   2. beacons and protocol ticks due inside the interval execute in time
//      order (ties: beacons first, then ascending id). Transmissions reach
//      receivers immediately, so a receiver ticking later in the same
//      interval already sees them;
//   3. a snapshot of every participant's belief is taken at t0 + dt.
//
// All randomness comes from three substreams of the run seed (arrivals,
// channel, tick phases), so a seed and config fix the event log exactly.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "leadsel/channel.hpp"
#include "leadsel/mobility.hpp"
#include "leadsel/protocol.hpp"

namespace leadsel {

struct SimConfig {
  double duration = 180.0;
  std::uint64_t seed = 1;
  ProtocolConfig protocol;
  ChannelConfig channel;
  ScenarioConfig scenario;
  double bsm_period = 0.1;
  double participation_radius = 60.0;
  /// Leader order used by every vehicle in the run.
  OrderRule order = OrderRule::farthest;
  std::string volume = "medium";
  /// Keep the full event log in RunResult::events.
  bool record_events = false;

  void validate() const;
};

enum class EventKind {
  spawn,
  despawn,
  tx_leader_msg,
  rx_leader_msg,
  adopt,
  self_promote,
  mode_change,
  cross,
};

std::string to_string(EventKind k);

struct TxDetail {
  LeaderMessage message;
  bool relay = false;
};

struct RxDetail {
  VehicleId leader{};
  std::uint64_t seq = 0;
  VehicleId relayer{};
};

struct AdoptDetail {
  VehicleId leader{};
  VehicleId previous{};
};

struct ModeDetail {
  Mode mode = Mode::fast;
};

struct SpawnDetail {
  Position position;
  std::string approach;  ///< empty for static topologies
};

using EventDetail = std::variant<std::monostate, TxDetail, RxDetail, AdoptDetail, ModeDetail, SpawnDetail>;

struct Event {
  double t = 0.0;
  EventKind kind = EventKind::spawn;
  VehicleId subject{};
  EventDetail detail;
};

struct Participant {
  VehicleId id{};
  VehicleId believed_leader{};
  bool is_self_leader = false;

  friend bool operator==(const Participant&, const Participant&) = default;
};

struct Snapshot {
  double t = 0.0;
  std::vector<Participant> participants;  ///< ascending id
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<Event> events;  ///< only when SimConfig::record_events
  std::uint64_t leader_msg_count = 0;
  std::uint64_t bsm_count = 0;
  std::uint64_t seed = 0;
  Variant variant = Variant::basic;
  std::string volume;
  double dt = 0.1;
};

using EventSink = std::function<void(const Event&)>;

/// Runs the intersection scenario for ceil(duration / dt) steps.
/// Throws ConfigError before stepping if the config is invalid.
RunResult run(const SimConfig& cfg, const EventSink& sink = {});

struct StaticNode {
  VehicleId id{};
  Position position;
  double join_time = 0.0;  ///< node enters at the first step starting at or after this
};

/// Runs the protocol over frozen positions without mobility. Every node
/// participates. Throws ConfigError on duplicate ids.
RunResult inject_static_topology(std::span<const StaticNode> nodes, const SimConfig& cfg,
                                 const EventSink& sink = {});

/// One JSON object per line, no trailing newline.
std::string to_jsonl(const Event& e);
std::string to_jsonl(const Snapshot& s);

}  // namespace leadsel
