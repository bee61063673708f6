#include <benchmark/benchmark.h>

#include <vector>

#include "leadsel/channel.hpp"
#include "leadsel/protocol.hpp"
#include "leadsel/sim.hpp"

using namespace leadsel;

static void BM_ReceptionRate(benchmark::State& state) {
  ChannelConfig cfg;
  cfg.m = static_cast<int>(state.range(0));
  double d = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(packet_reception_rate(d, cfg));
    d = d < 300.0 ? d + 0.37 : 0.0;
  }
}
BENCHMARK(BM_ReceptionRate)->Arg(1)->Arg(3);

static void BM_Broadcast(benchmark::State& state) {
  ChannelConfig cfg;
  std::vector<Receiver> rx;
  for (int i = 0; i < state.range(0); ++i) {
    rx.push_back({VehicleId{static_cast<std::uint32_t>(i)}, {static_cast<double>(i % 50), static_cast<double>(i / 50)}});
  }
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(broadcast({0, 0}, rx, cfg, rng));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Broadcast)->Arg(10)->Arg(40);

// Follower relaying a stream of heartbeats from its leader.
static void BM_Tick(benchmark::State& state) {
  ProtocolConfig cfg;
  cfg.variant = state.range(0) ? Variant::optimized : Variant::basic;
  const OrderSpec order = order_for(OrderRule::farthest);
  NodeState s = new_node(VehicleId{7}, {VehicleId{7}, {0, 20}, 20.0}, 0.0, cfg);
  LeaderMessage m;
  m.leader = VehicleId{1};
  m.info = {VehicleId{1}, {0, 50}, 50.0};
  m.relayer = VehicleId{1};
  m.established = true;
  double t = 0.0;
  std::uint64_t seq = 0;
  for (auto _ : state) {
    for (std::uint32_t n = 10; n < 20; ++n) on_beacon(s, VehicleId{n}, t);
    m.seq = ++seq;
    on_receive(s, m, t);
    t += cfg.t_p;
    benchmark::DoNotOptimize(tick(s, t, order, cfg));
  }
}
BENCHMARK(BM_Tick)->Arg(0)->Arg(1);

static void BM_FullRun(benchmark::State& state) {
  SimConfig cfg;
  cfg.scenario.arrival_rate = state.range(0) ? 0.15 : 0.05;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(run(cfg).leader_msg_count);
  }
}
BENCHMARK(BM_FullRun)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
