#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "leadsel/channel.hpp"
#include "leadsel/error.hpp"
#include "prr_oracle.hpp"

using namespace leadsel;
using leadsel::testing::oracle_prr;

namespace {

ChannelConfig channel(int m, double cr) {
  ChannelConfig c;
  c.m = m;
  c.cr = cr;
  c.max_range = 3 * cr;
  return c;
}

}  // namespace

TEST_CASE("packet_reception_rate examples") {
  for (int m = 1; m <= 3; ++m) {
    for (double cr : {100.0, 300.0, 500.0}) CHECK(packet_reception_rate(0.0, channel(m, cr)) == 1.0);
  }
  CHECK(packet_reception_rate(100.0, channel(1, 100.0)) == doctest::Approx(0.367879).epsilon(1e-6));
  CHECK(packet_reception_rate(100.0, channel(3, 100.0)) == doctest::Approx(0.423190).epsilon(1e-6));
  // 8.5 e^-3 spelled out.
  CHECK(std::abs(packet_reception_rate(100.0, channel(3, 100.0)) - 8.5 * std::exp(-3.0)) < 1e-15);
  CHECK(std::abs(packet_reception_rate(100.0, channel(1, 100.0)) - std::exp(-1.0)) < 1e-15);
}

TEST_CASE("packet_reception_rate agrees with the multiprecision oracle") {
  for (int m = 1; m <= 3; ++m) {
    for (double cr : {100.0, 200.0, 300.0, 400.0, 500.0}) {
      const auto cfg = channel(m, cr);
      for (int i = 0; i <= 200; ++i) {
        const double d = cfg.max_range * i / 200.0;
        CHECK(std::abs(packet_reception_rate(d, cfg) - oracle_prr(d, m, cr)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("packet_reception_rate is non-increasing on a 1 m lattice") {
  for (int m = 1; m <= 3; ++m) {
    for (double cr : {100.0, 200.0, 300.0, 400.0, 500.0}) {
      const auto cfg = channel(m, cr);
      double prev = 1.0;
      int bad = 0;
      for (int d = 0; d <= static_cast<int>(cfg.max_range); ++d) {
        const double p = packet_reception_rate(d, cfg);
        if (p > prev || p < 0.0 || p > 1.0) ++bad;
        prev = p;
      }
      CHECK(bad == 0);
    }
  }
}

TEST_CASE("packet_reception_rate errors and reliable mode") {
  CHECK_THROWS_AS(packet_reception_rate(-1.0, channel(3, 100.0)), std::domain_error);
  CHECK_THROWS_AS(packet_reception_rate(NAN, channel(3, 100.0)), std::domain_error);
  auto cfg = channel(1, 100.0);
  cfg.reliable = true;
  CHECK(packet_reception_rate(250.0, cfg) == 1.0);
}

TEST_CASE("channel config validation") {
  CHECK_NOTHROW(channel(1, 100.0).validate());
  CHECK_THROWS_AS(channel(4, 100.0).validate(), ConfigError);
  CHECK_THROWS_AS(channel(0, 100.0).validate(), ConfigError);
  CHECK_THROWS_AS(channel(3, 150.0).validate(), ConfigError);
  auto c = channel(3, 100.0);
  c.max_range = 50.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("broadcast") {
  const Position origin{0.0, 0.0};
  SUBCASE("reliable delivers to everyone in range") {
    auto cfg = channel(1, 100.0);
    cfg.reliable = true;
    const std::vector<Receiver> rx{{VehicleId{1}, {10, 0}}, {VehicleId{2}, {0, 150}}, {VehicleId{3}, {-299, 0}}};
    Rng rng(1);
    CHECK(broadcast(origin, rx, cfg, rng) == std::vector<VehicleId>{VehicleId{1}, VehicleId{2}, VehicleId{3}});
  }
  SUBCASE("beyond max_range is never delivered") {
    auto cfg = channel(3, 100.0);
    cfg.reliable = true;
    const std::vector<Receiver> rx{{VehicleId{1}, {cfg.max_range + 1.0, 0}}};
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
      Rng rng(seed);
      CHECK(broadcast(origin, rx, cfg, rng).empty());
    }
  }
  SUBCASE("Monte-Carlo delivery rate at 100 m, m=3") {
    const auto cfg = channel(3, 100.0);
    const std::vector<Receiver> rx{{VehicleId{1}, {100.0, 0.0}}};
    Rng rng(2024);
    int delivered = 0;
    const int trials = 100000;
    for (int i = 0; i < trials; ++i) delivered += static_cast<int>(broadcast(origin, rx, cfg, rng).size());
    CHECK(std::abs(static_cast<double>(delivered) / trials - 0.4232) <= 0.01);
  }
  SUBCASE("one draw per in-range receiver, none for out-of-range ones") {
    const auto cfg = channel(3, 100.0);
    const std::vector<Receiver> rx{{VehicleId{1}, {50, 0}}, {VehicleId{2}, {1000, 0}}, {VehicleId{3}, {80, 0}}};
    Rng a(9), b(9);
    broadcast(origin, rx, cfg, a);
    b.uniform();
    b.uniform();
    CHECK(a.next_u64() == b.next_u64());
  }
}
