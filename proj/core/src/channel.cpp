#include "leadsel/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "leadsel/error.hpp"

namespace leadsel {

void ChannelConfig::validate() const {
  if (m < 1 || m > 3) throw ConfigError("m must be one of {1, 2, 3}");
  if (cr != 100.0 && cr != 200.0 && cr != 300.0 && cr != 400.0 && cr != 500.0) {
    throw ConfigError("cr must be one of {100, 200, 300, 400, 500}");
  }
  if (!(max_range >= cr)) throw ConfigError("max_range must be >= cr");
}

double packet_reception_rate(double d, const ChannelConfig& cfg) {
  if (d < 0.0 || std::isnan(d)) throw std::domain_error("packet_reception_rate: negative distance");
  if (cfg.reliable) return 1.0;
  const double x = cfg.m * (d / cfg.cr);
  double term = 1.0;  // x^(i-1) / (i-1)!
  double sum = 0.0;
  for (int i = 1; i <= cfg.m; ++i) {
    sum += term;
    term *= x / i;
  }
  return std::clamp(std::exp(-x) * sum, 0.0, 1.0);
}

std::vector<VehicleId> broadcast(const Position& sender, std::span<const Receiver> receivers,
                                 const ChannelConfig& cfg, Rng& rng) {
  std::vector<VehicleId> delivered;
  for (const auto& r : receivers) {
    const double d = distance(sender, r.position);
    if (d > cfg.max_range) continue;
    if (rng.uniform() < packet_reception_rate(d, cfg)) delivered.push_back(r.id);
  }
  return delivered;
}

}  // namespace leadsel
