#include <cmath>
#include <map>

#include "doctest.h"
#include "leadsel/error.hpp"
#include "leadsel/mobility.hpp"

using namespace leadsel;

namespace {

VehicleState vehicle(std::uint32_t id, Approach a, double s) {
  VehicleState v;
  v.id = VehicleId{id};
  v.approach = a;
  v.s = s;
  v.speed = 10.0;
  return v;
}

}  // namespace

TEST_CASE("spawn frequency matches the arrival probability") {
  ScenarioConfig cfg;
  cfg.arrival_rate = 0.05;
  Rng rng(77);
  Traffic traffic;
  long spawned = 0;
  const long steps = 1000000;
  for (long k = 0; k < steps; ++k) {
    spawned += static_cast<long>(spawn(traffic, rng, cfg).size());
    traffic.vehicles.clear();
  }
  const double per_step = static_cast<double>(spawned) / (4.0 * steps);
  CHECK(std::abs(per_step - 0.004988) <= 2e-4);
  CHECK(std::abs(per_step - (1.0 - std::exp(-0.005))) <= 2e-4);
}

TEST_CASE("zero arrival rate never spawns") {
  ScenarioConfig cfg;
  cfg.arrival_rate = 0.0;
  Rng rng(1);
  Traffic traffic;
  for (int k = 0; k < 100000; ++k) REQUIRE(spawn(traffic, rng, cfg).empty());
}

TEST_CASE("arrival is deferred while the rear vehicle is within min_gap") {
  ScenarioConfig cfg;
  cfg.arrival_rate = 1e6;  // an arrival on every approach every step
  Rng rng(3);
  Traffic traffic;
  traffic.vehicles.push_back(vehicle(0, Approach::north, 3.0));
  traffic.next_id = 1;
  auto added = spawn(traffic, rng, cfg);
  CHECK(added.size() == 3);
  for (const auto& v : added) CHECK(v.approach != Approach::north);
  CHECK(traffic.pending[0] == 1);

  traffic.vehicles.front().s = 7.0;
  traffic.vehicles.erase(traffic.vehicles.begin() + 1, traffic.vehicles.end());
  added = spawn(traffic, rng, cfg);
  int north = 0;
  for (const auto& v : added) north += v.approach == Approach::north;
  CHECK(north == 1);
  CHECK(traffic.pending[0] == 1);  // one served, one new
}

TEST_CASE("step kinematics") {
  ScenarioConfig cfg;
  LightState light = light_at(0.0, cfg);
  REQUIRE(light.phase == Phase::ns_green);

  SUBCASE("lone vehicle on green advances speed * dt") {
    Traffic t;
    t.vehicles.push_back(vehicle(0, Approach::north, 10.0));
    step(t, light, cfg, 0.1);
    CHECK(t.vehicles[0].s == doctest::Approx(11.0));
  }
  SUBCASE("red holds a vehicle at the stop line") {
    Traffic t;
    t.vehicles.push_back(vehicle(0, Approach::east, cfg.approach_length));
    auto out = step(t, light, cfg, 0.1);
    CHECK(t.vehicles[0].s == cfg.approach_length);
    CHECK(t.vehicles[0].speed == 0.0);
    CHECK_FALSE(t.vehicles[0].crossed);
    CHECK(out.crossed.empty());
  }
  SUBCASE("crossing on green sets the flag and reports it") {
    Traffic t;
    t.vehicles.push_back(vehicle(4, Approach::north, cfg.approach_length - 0.5));
    auto out = step(t, light, cfg, 0.1);
    CHECK(t.vehicles[0].crossed);
    REQUIRE(out.crossed.size() == 1);
    CHECK(out.crossed[0] == VehicleId{4});
  }
  SUBCASE("follower keeps min_gap") {
    Traffic t;
    t.vehicles.push_back(vehicle(0, Approach::east, cfg.approach_length));
    t.vehicles.push_back(vehicle(1, Approach::east, cfg.approach_length - 7.5));
    step(t, light, cfg, 0.1);
    CHECK(t.vehicles[1].s == doctest::Approx(cfg.approach_length - cfg.min_gap));
  }
  SUBCASE("vehicles leave at the exit") {
    Traffic t;
    t.vehicles.push_back(vehicle(2, Approach::south, cfg.approach_length + cfg.exit_distance - 0.5));
    auto out = step(t, light, cfg, 0.1);
    CHECK(t.vehicles.empty());
    REQUIRE(out.removed.size() == 1);
    CHECK(out.removed[0] == VehicleId{2});
  }
}

TEST_CASE("long horizon invariants") {
  ScenarioConfig cfg;
  cfg.arrival_rate = 0.3;
  Rng rng(8);
  Traffic traffic;
  LightState light = light_at(0.0, cfg);
  std::map<std::uint32_t, double> last_s;
  int gap_violations = 0, backwards = 0, light_mismatch = 0;
  for (int k = 1; k <= 20000; ++k) {
    step(traffic, light, cfg, cfg.dt);
    spawn(traffic, rng, cfg);
    const LightState expected = light_at(k * cfg.dt, cfg);
    if (expected.phase != light.phase) ++light_mismatch;
    for (Approach a : kApproaches) {
      double ahead = INFINITY;
      for (const auto& v : traffic.vehicles) {
        if (v.approach != a) continue;
        if (ahead - v.s < cfg.min_gap - 1e-9) ++gap_violations;
        ahead = v.s;
      }
    }
    for (const auto& v : traffic.vehicles) {
      auto [it, fresh] = last_s.try_emplace(to_int(v.id), v.s);
      if (!fresh && v.s < it->second) ++backwards;
      it->second = v.s;
    }
  }
  CHECK(gap_violations == 0);
  CHECK(backwards == 0);
  CHECK(light_mismatch == 0);
  CHECK(traffic.next_id > 1000);
}

TEST_CASE("light schedule") {
  ScenarioConfig cfg;
  CHECK(light_at(0.0, cfg).phase == Phase::ns_green);
  CHECK(light_at(29.9, cfg).phase == Phase::ns_green);
  CHECK(light_at(30.0, cfg).phase == Phase::ew_green);
  CHECK(light_at(60.0, cfg).phase == Phase::ns_green);
  CHECK(is_green(light_at(45.0, cfg), Approach::west));
  CHECK_FALSE(is_green(light_at(45.0, cfg), Approach::north));
}

TEST_CASE("position_of") {
  ScenarioConfig cfg;
  const auto n = position_of(vehicle(0, Approach::north, cfg.approach_length), cfg);
  CHECK(n.x == 0.0);
  CHECK(n.y == doctest::Approx(cfg.stop_line_offset));
  CHECK(norm(n) == doctest::Approx(cfg.stop_line_offset));

  const auto s = position_of(vehicle(1, Approach::south, cfg.approach_length), cfg);
  CHECK(distance(n, s) == doctest::Approx(2 * cfg.stop_line_offset));
  const auto e = position_of(vehicle(2, Approach::east, cfg.approach_length), cfg);
  const auto w = position_of(vehicle(3, Approach::west, cfg.approach_length), cfg);
  CHECK(distance(e, w) == doctest::Approx(2 * cfg.stop_line_offset));

  const auto start = position_of(vehicle(4, Approach::west, 0.0), cfg);
  CHECK(norm(start) == doctest::Approx(100.0).epsilon(0.06));
  CHECK(norm(start) == doctest::Approx(cfg.approach_length + cfg.stop_line_offset));
}

TEST_CASE("scenario validation") {
  ScenarioConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.arrival_rate = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = ScenarioConfig{};
  cfg.dt = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
