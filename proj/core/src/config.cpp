#include "leadsel/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <set>

#include "leadsel/error.hpp"

namespace leadsel {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  while (true) {
    const auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

double parse_double(std::string_view key, std::string_view v, int line) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected a number, got '" + std::string(v) + "'", line);
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v, int line) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size()) {
    throw ConfigError(std::string(key) + ": expected an integer, got '" + std::string(v) + "'", line);
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view v, int line) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(v) + "'", line);
}

using Setter = std::function<void(Config&, std::string_view, int)>;

Setter real(std::string_view key, double SimConfig::*field) {
  return [key, field](Config& c, std::string_view v, int line) {
    c.sim.*field = parse_double(key, v, line);
  };
}

// Key table. Ordered so config_keys() lists keys grouped as documented.
const std::vector<std::pair<std::string, Setter>>& setters() {
  static const std::vector<std::pair<std::string, Setter>> table = {
      // campaign
      {"runs", [](Config& c, std::string_view v, int l) { c.campaign.runs = parse_int<int>("runs", v, l); }},
      {"seed", [](Config& c, std::string_view v, int l) {
         c.campaign.root_seed = parse_int<std::uint64_t>("seed", v, l);
       }},
      {"variant", [](Config& c, std::string_view v, int l) {
         c.campaign.variants.clear();
         for (auto item : split_list(v)) {
           try {
             c.campaign.variants.push_back(parse_variant(std::string(item)));
           } catch (const ConfigError& e) {
             throw ConfigError(e.what(), l);
           }
         }
       }},
      {"volume", [](Config& c, std::string_view v, int l) {
         c.campaign.volumes.clear();
         for (auto item : split_list(v)) {
           if (item != "medium" && item != "dense") {
             throw ConfigError("volume must be one of {medium, dense}, got '" + std::string(item) + "'", l);
           }
           c.campaign.volumes.emplace_back(item);
         }
       }},
      {"m", [](Config& c, std::string_view v, int l) {
         c.campaign.ms.clear();
         for (auto item : split_list(v)) c.campaign.ms.push_back(parse_int<int>("m", item, l));
       }},
      {"cr", [](Config& c, std::string_view v, int l) {
         c.campaign.crs.clear();
         for (auto item : split_list(v)) c.campaign.crs.push_back(parse_double("cr", item, l));
       }},
      {"out", [](Config& c, std::string_view v, int) { c.campaign.out_dir = std::string(v); }},
      {"events", [](Config& c, std::string_view v, int l) { c.campaign.events = parse_bool("events", v, l); }},
      {"threads", [](Config& c, std::string_view v, int l) {
         c.campaign.threads = parse_int<unsigned>("threads", v, l);
       }},
      // run
      {"duration", real("duration", &SimConfig::duration)},
      {"bsm_period", real("bsm_period", &SimConfig::bsm_period)},
      {"participation_radius", real("participation_radius", &SimConfig::participation_radius)},
      {"order", [](Config& c, std::string_view v, int l) {
         try {
           c.sim.order = parse_order_rule(v);
         } catch (const ConfigError& e) {
           throw ConfigError(e.what(), l);
         }
       }},
      {"medium_rate", [](Config& c, std::string_view v, int l) { c.medium_rate = parse_double("medium_rate", v, l); }},
      {"dense_rate", [](Config& c, std::string_view v, int l) { c.dense_rate = parse_double("dense_rate", v, l); }},
      // protocol
      {"t_p", [](Config& c, std::string_view v, int l) { c.sim.protocol.t_p = parse_double("t_p", v, l); }},
      {"t_p_slow", [](Config& c, std::string_view v, int l) { c.sim.protocol.t_p_slow = parse_double("t_p_slow", v, l); }},
      {"t_silence", [](Config& c, std::string_view v, int l) { c.sim.protocol.t_silence = parse_double("t_silence", v, l); }},
      {"consensus_quiet", [](Config& c, std::string_view v, int l) {
         c.sim.protocol.consensus_quiet = parse_double("consensus_quiet", v, l);
       }},
      {"neighbor_timeout", [](Config& c, std::string_view v, int l) {
         c.sim.protocol.neighbor_timeout = parse_double("neighbor_timeout", v, l);
       }},
      {"fast_payload", [](Config& c, std::string_view v, int l) {
         c.sim.protocol.fast_payload = parse_bool("fast_payload", v, l);
       }},
      // channel
      {"max_range", [](Config& c, std::string_view v, int l) { c.max_range = parse_double("max_range", v, l); }},
      {"reliable", [](Config& c, std::string_view v, int l) { c.sim.channel.reliable = parse_bool("reliable", v, l); }},
      // scenario
      {"approach_length", [](Config& c, std::string_view v, int l) {
         c.sim.scenario.approach_length = parse_double("approach_length", v, l);
       }},
      {"stop_line_offset", [](Config& c, std::string_view v, int l) {
         c.sim.scenario.stop_line_offset = parse_double("stop_line_offset", v, l);
       }},
      {"speed", [](Config& c, std::string_view v, int l) { c.sim.scenario.speed = parse_double("speed", v, l); }},
      {"min_gap", [](Config& c, std::string_view v, int l) { c.sim.scenario.min_gap = parse_double("min_gap", v, l); }},
      {"green_time", [](Config& c, std::string_view v, int l) { c.sim.scenario.green_time = parse_double("green_time", v, l); }},
      {"red_time", [](Config& c, std::string_view v, int l) { c.sim.scenario.red_time = parse_double("red_time", v, l); }},
      {"exit_distance", [](Config& c, std::string_view v, int l) {
         c.sim.scenario.exit_distance = parse_double("exit_distance", v, l);
       }},
      {"dt", [](Config& c, std::string_view v, int l) { c.sim.scenario.dt = parse_double("dt", v, l); }},
  };
  return table;
}

}  // namespace

std::vector<Cell> CampaignSpec::cells() const {
  std::vector<Cell> out;
  for (Variant v : variants)
    for (const auto& vol : volumes)
      for (int m : ms)
        for (double cr : crs) out.push_back({v, vol, m, cr});
  return out;
}

void CampaignSpec::validate() const {
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (variants.empty() || volumes.empty() || ms.empty() || crs.empty()) {
    throw ConfigError("campaign matrix must have at least one cell");
  }
  for (int m : ms) {
    ChannelConfig ch;
    ch.m = m;
    ch.validate();
  }
  for (double cr : crs) {
    ChannelConfig ch;
    ch.cr = cr;
    ch.max_range = 3.0 * cr;
    ch.validate();
  }
  if (threads < 1) throw ConfigError("threads must be >= 1");
}

void Config::validate() const {
  campaign.validate();
  if (!(medium_rate >= 0.0) || !(dense_rate >= 0.0)) throw ConfigError("arrival rates must be non-negative");
  for (const Cell& cell : campaign.cells()) cell_config(*this, cell, 0).validate();
}

double arrival_rate_for(const Config& cfg, std::string_view volume) {
  if (volume == "medium") return cfg.medium_rate;
  if (volume == "dense") return cfg.dense_rate;
  throw ConfigError("volume must be one of {medium, dense}, got '" + std::string(volume) + "'");
}

SimConfig cell_config(const Config& cfg, const Cell& cell, std::uint64_t seed) {
  SimConfig s = cfg.sim;
  s.seed = seed;
  s.protocol.variant = cell.variant;
  s.volume = cell.volume;
  s.scenario.arrival_rate = arrival_rate_for(cfg, cell.volume);
  s.channel.m = cell.m;
  s.channel.cr = cell.cr;
  s.channel.max_range = cfg.max_range.value_or(3.0 * cell.cr);
  return s;
}

void apply_setting(Config& cfg, std::string_view key, std::string_view value, int line) {
  const auto& table = setters();
  const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == key; });
  if (it == table.end()) throw ConfigError("unknown key '" + std::string(key) + "'", line);
  it->second(cfg, value, line);
}

Config parse_config(std::istream& in) {
  Config cfg;
  std::set<std::string, std::less<>> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text(raw);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value", line);
    const auto key = trim(text.substr(0, eq));
    const auto value = trim(text.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line);
    if (!seen.emplace(key).second) throw ConfigError("duplicate key '" + std::string(key) + "'", line);
    apply_setting(cfg, key, value, line);
  }
  cfg.validate();
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& [k, _] : setters()) out.push_back(k);
    return out;
  }();
  return keys;
}

}  // namespace leadsel
