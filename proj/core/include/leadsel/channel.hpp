#pragma once

#include <span>
#include <vector>

#include "leadsel/random.hpp"
#include "leadsel/types.hpp"

namespace leadsel {

/// Nakagami-m broadcast channel parameters.
struct ChannelConfig {
  int m = 3;                 ///< fading parameter, 1 (harsh) .. 3 (good)
  double cr = 100.0;         ///< intended communication range [m]
  double max_range = 300.0;  ///< hard delivery cutoff [m]
  bool reliable = false;     ///< force PRR = 1 inside max_range

  void validate() const;
};

/// Probability that a packet sent over distance `d` is received:
///   exp(-m d/CR) * sum_{i=1..m} (m d/CR)^(i-1) / (i-1)!
/// Throws std::domain_error for negative d.
double packet_reception_rate(double d, const ChannelConfig& cfg);

struct Receiver {
  VehicleId id{};
  Position position;
};

/// Delivers one broadcast. Every receiver within max_range consumes exactly
/// one draw from `rng`, in list order, and is included with probability
/// packet_reception_rate(distance). Receivers beyond max_range consume no draw.
std::vector<VehicleId> broadcast(const Position& sender, std::span<const Receiver> receivers,
                                 const ChannelConfig& cfg, Rng& rng);

}  // namespace leadsel
