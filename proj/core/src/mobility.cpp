#include "leadsel/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "leadsel/error.hpp"

namespace leadsel {

namespace {

constexpr double kTimeEps = 1e-9;

std::size_t index_of(Approach a) { return static_cast<std::size_t>(a); }

double phase_duration(Phase p, const ScenarioConfig& cfg) {
  return p == Phase::ns_green ? cfg.green_time : cfg.red_time;
}

}  // namespace

std::string to_string(Approach a) {
  switch (a) {
    case Approach::north: return "N";
    case Approach::south: return "S";
    case Approach::east: return "E";
    case Approach::west: return "W";
  }
  return "?";
}

void ScenarioConfig::validate() const {
  if (!(approach_length > 0.0)) throw ConfigError("approach_length must be positive");
  if (!(stop_line_offset >= 0.0)) throw ConfigError("stop_line_offset must be non-negative");
  if (!(speed > 0.0)) throw ConfigError("speed must be positive");
  if (!(min_gap > 0.0)) throw ConfigError("min_gap must be positive");
  if (!(arrival_rate >= 0.0)) throw ConfigError("arrival_rate must be non-negative");
  if (!(green_time > 0.0) || !(red_time > 0.0)) throw ConfigError("green_time and red_time must be positive");
  if (!(exit_distance > 0.0)) throw ConfigError("exit_distance must be positive");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
}

LightState light_at(double t, const ScenarioConfig& cfg) {
  const double cycle = cfg.green_time + cfg.red_time;
  double in_cycle = std::fmod(std::max(t, 0.0), cycle);
  if (cycle - in_cycle < kTimeEps) in_cycle = 0.0;
  if (in_cycle < cfg.green_time - kTimeEps) return {Phase::ns_green, in_cycle};
  return {Phase::ew_green, std::max(0.0, in_cycle - cfg.green_time)};
}

bool is_green(const LightState& light, Approach a) noexcept {
  const bool ns = a == Approach::north || a == Approach::south;
  return ns == (light.phase == Phase::ns_green);
}

std::vector<VehicleState> spawn(Traffic& traffic, Rng& rng, const ScenarioConfig& cfg) {
  const double p_arrival = -std::expm1(-cfg.arrival_rate * cfg.dt);
  std::vector<VehicleState> added;
  for (Approach a : kApproaches) {
    auto& pending = traffic.pending[index_of(a)];
    if (rng.uniform() < p_arrival) ++pending;
    if (pending == 0) continue;

    double rear_s = std::numeric_limits<double>::infinity();
    for (const auto& v : traffic.vehicles) {
      if (v.approach == a) rear_s = std::min(rear_s, v.s);
    }
    if (rear_s < cfg.min_gap) continue;

    VehicleState v;
    v.id = VehicleId{traffic.next_id++};
    v.approach = a;
    v.s = 0.0;
    v.speed = cfg.speed;
    traffic.vehicles.push_back(v);
    added.push_back(v);
    --pending;
  }
  return added;
}

StepOutcome step(Traffic& traffic, LightState& light, const ScenarioConfig& cfg, double dt) {
  StepOutcome out;
  for (Approach a : kApproaches) {
    const bool green = is_green(light, a);
    double ahead_s = std::numeric_limits<double>::infinity();
    // Ascending id is front to back: no overtaking on a single lane.
    for (auto& v : traffic.vehicles) {
      if (v.approach != a) continue;
      double target = v.s + cfg.speed * dt;
      if (!v.crossed && !green) target = std::min(target, cfg.approach_length);
      target = std::min(target, ahead_s - cfg.min_gap);
      target = std::max(target, v.s);
      v.speed = (target - v.s) / dt;
      v.s = target;
      if (!v.crossed && v.s > cfg.approach_length) {
        v.crossed = true;
        out.crossed.push_back(v.id);
      }
      ahead_s = v.s;
    }
  }
  std::sort(out.crossed.begin(), out.crossed.end(),
            [](VehicleId x, VehicleId y) { return to_int(x) < to_int(y); });

  std::erase_if(traffic.vehicles, [&](const VehicleState& v) {
    if (v.s < cfg.approach_length + cfg.exit_distance) return false;
    out.removed.push_back(v.id);
    return true;
  });

  light.time_in_phase += dt;
  while (light.time_in_phase >= phase_duration(light.phase, cfg) - kTimeEps) {
    light.time_in_phase = std::max(0.0, light.time_in_phase - phase_duration(light.phase, cfg));
    light.phase = light.phase == Phase::ns_green ? Phase::ew_green : Phase::ns_green;
  }
  return out;
}

Position position_of(const VehicleState& v, const ScenarioConfig& cfg) {
  const double r = cfg.approach_length - v.s + cfg.stop_line_offset;
  switch (v.approach) {
    case Approach::north: return {0.0, r};
    case Approach::south: return {0.0, -r};
    case Approach::east: return {r, 0.0};
    case Approach::west: return {-r, 0.0};
  }
  return {};
}

}  // namespace leadsel
