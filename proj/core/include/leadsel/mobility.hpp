#pragma once

// One-lane, four-approach signalized intersection. Vehicles enter each
// approach at s = 0 by a Poisson process, drive straight through at constant
// speed, queue at the stop line on red and leave the road exit_distance past
// it. Kinematics are deliberately simple: instantaneous stop and start.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "leadsel/random.hpp"
#include "leadsel/types.hpp"

namespace leadsel {

enum class Approach : std::uint8_t { north, south, east, west };

inline constexpr std::array<Approach, 4> kApproaches{Approach::north, Approach::south,
                                                     Approach::east, Approach::west};

std::string to_string(Approach a);

struct ScenarioConfig {
  double approach_length = 100.0;  ///< spawn point to stop line [m]
  double stop_line_offset = 5.0;   ///< stop line to intersection center [m]
  double speed = 10.0;             ///< free-flow speed [m/s]
  double min_gap = 7.0;            ///< front-to-front spacing [m]
  double arrival_rate = 0.05;      ///< per approach [veh/s]
  double green_time = 30.0;        ///< north-south green [s]
  double red_time = 30.0;          ///< north-south red, i.e. east-west green [s]
  double exit_distance = 100.0;    ///< removal point past the stop line [m]
  double dt = 0.1;                 ///< step length [s]

  void validate() const;
};

struct VehicleState {
  VehicleId id{};
  Approach approach = Approach::north;
  double s = 0.0;  ///< distance traveled from the spawn point [m]
  double speed = 0.0;
  bool crossed = false;
};

enum class Phase { ns_green, ew_green };

struct LightState {
  Phase phase = Phase::ns_green;
  double time_in_phase = 0.0;
};

/// The signal is a pure function of elapsed time.
LightState light_at(double t, const ScenarioConfig& cfg);

bool is_green(const LightState& light, Approach a) noexcept;

struct Traffic {
  std::vector<VehicleState> vehicles;  ///< ascending id
  std::array<int, 4> pending{};        ///< arrivals waiting for space, per approach
  std::uint32_t next_id = 0;
};

/// Draws one arrival per approach (exactly one rng draw each, in kApproaches
/// order) and places at most one vehicle per approach at s = 0 when the
/// rearmost vehicle is at least min_gap away. Returns the vehicles added.
std::vector<VehicleState> spawn(Traffic& traffic, Rng& rng, const ScenarioConfig& cfg);

struct StepOutcome {
  std::vector<VehicleId> crossed;  ///< passed the stop line during this step
  std::vector<VehicleId> removed;  ///< reached the exit and left the road
};

/// Advances every vehicle by dt under the signal state `light`, then
/// advances `light` itself by dt.
StepOutcome step(Traffic& traffic, LightState& light, const ScenarioConfig& cfg, double dt);

/// Approach coordinate to plane coordinates. The north approach lies on +y,
/// south on -y, east on +x and west on -x; each stop line sits
/// stop_line_offset from the center. Past the stop line vehicles continue
/// straight through the center to the far side.
Position position_of(const VehicleState& v, const ScenarioConfig& cfg);

}  // namespace leadsel
