#pragma once

// Flat key=value configuration. One pair per line, '#' starts a comment,
// blank lines are ignored. Matrix keys (variant, volume, m, cr) accept
// comma-separated lists.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leadsel/sim.hpp"

namespace leadsel {

/// One matrix cell of a campaign.
struct Cell {
  Variant variant = Variant::basic;
  std::string volume = "medium";
  int m = 3;
  double cr = 100.0;

  friend bool operator==(const Cell&, const Cell&) = default;
};

struct CampaignSpec {
  int runs = 100;
  std::uint64_t root_seed = 1;
  std::vector<Variant> variants{Variant::basic, Variant::optimized};
  std::vector<std::string> volumes{"medium", "dense"};
  std::vector<int> ms{3};
  std::vector<double> crs{100.0};
  std::filesystem::path out_dir = "out";
  bool events = false;
  bool quiet = false;
  unsigned threads = 1;

  /// Variant-major cartesian product: variant, volume, m, cr.
  std::vector<Cell> cells() const;
  void validate() const;
};

struct Config {
  SimConfig sim;  ///< base run config; cells override variant, volume, m, cr, seed
  CampaignSpec campaign;
  double medium_rate = 0.05;  ///< veh/s per approach
  double dense_rate = 0.15;
  /// Hard delivery cutoff; three times the cell's cr when unset.
  std::optional<double> max_range;

  /// Throws ConfigError if any invariant fails.
  void validate() const;
};

/// Arrival rate of a volume preset. Throws ConfigError for unknown names.
double arrival_rate_for(const Config& cfg, std::string_view volume);

/// Fully resolved run config for one cell and seed.
SimConfig cell_config(const Config& cfg, const Cell& cell, std::uint64_t seed);

/// Sets one key. `line` is only used in error messages.
void apply_setting(Config& cfg, std::string_view key, std::string_view value, int line = 0);

/// Parses a config stream on top of the defaults and validates the result.
Config parse_config(std::istream& in);
Config load_config(const std::filesystem::path& path);

/// All recognized keys, in documentation order.
const std::vector<std::string>& config_keys();

}  // namespace leadsel
