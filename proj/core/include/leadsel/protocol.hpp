#pragma once

// Per-vehicle proactive leader selection state machine.
//
// Every vehicle starts out as its own leader. Leaders originate a leader
// message once per tick; everybody else relays the best leader message they
// heard since their previous tick. A follower that stops hearing its leader
// for longer than t_silence resets to self-leadership. The optimized variant
// adds neighbor-list relay suppression and a reduced origination rate once a
// leader has gone uncontested for a while.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "leadsel/types.hpp"

namespace leadsel {

/// What a leader message says about its leader; everything the order needs.
struct LeaderInfo {
  VehicleId id{};
  Position position;
  double dist_to_intersection = 0.0;

  friend bool operator==(const LeaderInfo&, const LeaderInfo&) = default;
};

struct LeaderMessage {
  VehicleId leader{};
  std::uint64_t seq = 0;
  LeaderInfo info;
  /// Transmitter's neighbors. Present only in the optimized variant.
  std::optional<std::vector<VehicleId>> neighbors;
  /// Vehicle that transmitted this copy (the leader itself for originations).
  VehicleId relayer{};
  /// Set once the leader has held the role for consensus_quiet seconds.
  bool established = false;

  friend bool operator==(const LeaderMessage&, const LeaderMessage&) = default;
};

/// Strict total order over leader candidates: `better(a, b)` is true iff a is
/// strictly preferred to b.
class OrderSpec {
 public:
  using Better = std::function<bool(const LeaderInfo&, const LeaderInfo&)>;

  /// Nearest to the intersection wins, smaller id breaks ties.
  OrderSpec();
  explicit OrderSpec(Better better) : better_(std::move(better)) {}

  bool operator()(const LeaderInfo& a, const LeaderInfo& b) const { return better_(a, b); }

 private:
  Better better_;
};

bool nearest_first(const LeaderInfo& a, const LeaderInfo& b) noexcept;
/// Farthest from the intersection wins, smaller id breaks ties.
bool farthest_first(const LeaderInfo& a, const LeaderInfo& b) noexcept;

enum class OrderRule { nearest, farthest };

std::string to_string(OrderRule r);
/// Throws ConfigError for anything but "nearest" or "farthest".
OrderRule parse_order_rule(std::string_view s);
OrderSpec order_for(OrderRule r);

inline bool compare(const OrderSpec& order, const LeaderInfo& a, const LeaderInfo& b) {
  return order(a, b);
}

struct ProtocolConfig {
  double t_p = 0.1;              ///< tick and fast origination period [s]
  double t_p_slow = 0.2;         ///< origination period after consensus [s]
  double t_silence = 0.4;        ///< heartbeat timeout [s]
  double consensus_quiet = 1.0;  ///< uncontested time before slowing down [s]
  double neighbor_timeout = 0.1; ///< neighbor table staleness [s]
  Variant variant = Variant::basic;
  /// The leader carries application payload that must stay at the fast rate.
  bool fast_payload = false;

  /// Throws ConfigError when an invariant does not hold.
  void validate() const;
};

enum class Mode { fast, slow };

struct MessageKey {
  VehicleId leader{};
  std::uint64_t seq = 0;

  friend bool operator==(const MessageKey&, const MessageKey&) = default;
};

struct MessageKeyHash {
  std::size_t operator()(const MessageKey& k) const noexcept {
    return static_cast<std::size_t>(
        (static_cast<std::uint64_t>(to_int(k.leader)) * 0x9E3779B97F4A7C15ULL) ^ k.seq);
  }
};

struct NodeState {
  VehicleId self_id{};
  LeaderInfo own_info;
  LeaderInfo believed_leader;
  bool is_self_leader = true;
  /// Established flag of the believed leader as last advertised.
  bool leader_established = false;
  double last_heartbeat = 0.0;
  double leader_since = 0.0;
  double last_conflict = 0.0;
  /// Last time a self-leader heard an established rival.
  double last_established_rival = -std::numeric_limits<double>::infinity();
  double last_origination = -std::numeric_limits<double>::infinity();
  std::uint64_t seq_counter = 0;
  std::unordered_set<MessageKey, MessageKeyHash> dedup;
  std::vector<LeaderMessage> rx_buffer;
  std::map<VehicleId, double> neighbor_table;
  Mode mode = Mode::fast;
};

NodeState new_node(VehicleId self_id, const LeaderInfo& info, double now,
                   const ProtocolConfig& cfg);

/// Buffers a leader message for the next tick. Duplicates of messages already
/// handled at an earlier tick are dropped, but still refresh the heartbeat
/// when they name the believed leader.
void on_receive(NodeState& state, const LeaderMessage& msg, double now);

/// Neighbor sensing from a background safety beacon.
void on_beacon(NodeState& state, VehicleId from, double now);

/// Refreshes the node's own position. A self-leader advertises it on its next
/// origination.
void update_own_info(NodeState& state, const LeaderInfo& info);

/// Neighbors heard within neighbor_timeout of `now`, ascending by id.
std::vector<VehicleId> live_neighbors(const NodeState& state, double now,
                                      const ProtocolConfig& cfg);

struct TickResult {
  std::vector<LeaderMessage> transmit;
  /// Newly adopted leader, if the node switched this tick.
  std::optional<VehicleId> adopted;
  bool self_promoted = false;
  std::optional<Mode> mode_changed;
  /// A relay was due but skipped by neighbor-list suppression.
  bool relay_suppressed = false;
};

TickResult tick(NodeState& state, double now, const OrderSpec& order,
                const ProtocolConfig& cfg);

}  // namespace leadsel
