#include "leadsel/campaign.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdio>
#include <exception>
#include <fstream>
#include <memory>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "leadsel/random.hpp"

namespace leadsel {

namespace {

namespace fs = std::filesystem;

struct Job {
  std::size_t cell_index = 0;
  int run = 0;
};

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  out.flush();
  if (!out) throw OutputError("cannot write '" + path.string() + "'");
}

double run_mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  double sum = 0.0;
  for (double x : sorted) sum += x;
  return sum / static_cast<double>(sorted.size());
}

}  // namespace

CampaignResult run_campaign(const Config& cfg, const RunHooks& hooks) {
  cfg.validate();
  const auto cells = cfg.campaign.cells();
  const int runs = cfg.campaign.runs;

  CampaignResult result;
  result.root_seed = cfg.campaign.root_seed;
  result.cells.resize(cells.size());
  std::vector<Job> jobs;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    result.cells[c].cell = cells[c];
    result.cells[c].runs.resize(static_cast<std::size_t>(runs));
    for (int r = 0; r < runs; ++r) jobs.push_back({c, r});
  }

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  // Each job writes only its own preallocated slot, so the merge order is
  // fixed by (cell, run) no matter which worker finishes first.
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size() || failed.load()) return;
      const Job job = jobs[i];
      try {
        const Cell& cell = cells[job.cell_index];
        const std::uint64_t seed = run_seed(cfg.campaign.root_seed, job.cell_index,
                                            static_cast<std::uint64_t>(job.run));
        EventSink sink;
        if (hooks.make_sink) sink = hooks.make_sink(job.cell_index, cell, job.run);
        const RunResult r = run(cell_config(cfg, cell, seed), sink);
        if (hooks.on_done) hooks.on_done(job.cell_index, cell, job.run, r);
        result.cells[job.cell_index].runs[static_cast<std::size_t>(job.run)] = {job.run, seed, measure(r)};
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.campaign.threads,
                                                           static_cast<unsigned>(jobs.size())));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  for (auto& cell : result.cells) {
    std::vector<RunMetrics> metrics;
    for (const auto& r : cell.runs) metrics.push_back(r.metrics);
    cell.stats = summarize(metrics);
  }
  return result;
}

const std::string& summary_header() {
  static const std::string header =
      "variant,volume,m,cr,runs,stable_pct,avg_conv_s,max_conv_s,global_max_conv_s,"
      "mean_leader_msgs,mean_bsm_msgs,root_seed";
  return header;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

void write_summary_csv(std::ostream& out, const CampaignResult& result) {
  out << summary_header() << '\n';
  for (const auto& c : result.cells) {
    const auto& s = c.stats;
    out << to_string(c.cell.variant) << ',' << c.cell.volume << ',' << c.cell.m << ','
        << format_number(c.cell.cr) << ',' << s.runs << ',' << format_number(s.stable_pct) << ','
        << format_number(s.avg_convergence) << ',' << format_number(s.max_convergence) << ','
        << format_number(s.global_max_convergence) << ',' << format_number(s.mean_leader_msgs) << ','
        << format_number(s.mean_bsm_msgs) << ',' << result.root_seed << '\n';
  }
}

void write_runs_csv(std::ostream& out, const CampaignResult& result) {
  out << "variant,volume,m,cr,run,seed,stable_pct,episodes,avg_conv_s,max_conv_s,leader_msgs,bsm_msgs\n";
  for (const auto& c : result.cells) {
    for (const auto& r : c.runs) {
      const auto& d = r.metrics.episode_durations;
      const double longest = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
      out << to_string(c.cell.variant) << ',' << c.cell.volume << ',' << c.cell.m << ','
          << format_number(c.cell.cr) << ',' << r.run << ',' << r.seed << ','
          << format_number(r.metrics.stable_fraction()) << ',' << d.size() << ','
          << format_number(run_mean(d)) << ',' << format_number(longest) << ',' << r.metrics.leader_msgs
          << ',' << r.metrics.bsm_msgs << '\n';
    }
  }
}

std::string metadata_json(const Config& cfg) {
  using nlohmann::ordered_json;
  const SimConfig& s = cfg.sim;
  ordered_json j;
  j["root_seed"] = cfg.campaign.root_seed;
  j["runs"] = cfg.campaign.runs;
  j["seed_derivation"] = "run_seed(root_seed, cell_index, run) over splitmix64";
  auto& cells = j["cells"] = ordered_json::array();
  for (const Cell& c : cfg.campaign.cells()) {
    cells.push_back({{"variant", to_string(c.variant)}, {"volume", c.volume}, {"m", c.m}, {"cr", c.cr}});
  }
  j["run"] = {{"duration_s", s.duration},
              {"bsm_period_s", s.bsm_period},
              {"participation_radius_m", s.participation_radius},
              {"order", to_string(s.order)}};
  j["protocol"] = {{"t_p", s.protocol.t_p},
                   {"t_p_slow", s.protocol.t_p_slow},
                   {"t_silence", s.protocol.t_silence},
                   {"consensus_quiet", s.protocol.consensus_quiet},
                   {"neighbor_timeout", s.protocol.neighbor_timeout},
                   {"fast_payload", s.protocol.fast_payload}};
  j["channel"] = {{"max_range_m", cfg.max_range ? ordered_json(*cfg.max_range) : ordered_json("3*cr")},
                  {"reliable", s.channel.reliable}};
  j["scenario"] = {{"approach_length_m", s.scenario.approach_length},
                   {"stop_line_offset_m", s.scenario.stop_line_offset},
                   {"speed_mps", s.scenario.speed},
                   {"min_gap_m", s.scenario.min_gap},
                   {"green_time_s", s.scenario.green_time},
                   {"red_time_s", s.scenario.red_time},
                   {"exit_distance_m", s.scenario.exit_distance},
                   {"dt_s", s.scenario.dt},
                   {"volumes", {{"medium", cfg.medium_rate}, {"dense", cfg.dense_rate}}}};
  j["metrics"] = {
      {"stable_pct", "stable occupied steps / occupied steps, averaged over runs"},
      {"avg_conv_s", "mean over runs with episodes of the run's mean episode duration"},
      {"max_conv_s", "mean over runs with episodes of the run's longest episode"},
      {"global_max_conv_s", "longest episode over all runs of the cell"},
      {"mean_leader_msgs", "leader message transmissions per run (originations and relays)"},
      {"mean_bsm_msgs", "safety beacons per run, not included in mean_leader_msgs"}};
  return j.dump(2) + "\n";
}

void print_summary_table(std::ostream& out, const CampaignResult& result) {
  char line[256];
  std::snprintf(line, sizeof line, "%-9s %-6s %2s %4s %5s %8s %8s %8s %8s %12s %12s\n", "variant", "volume",
                "m", "cr", "runs", "stable%", "avg_s", "max_s", "gmax_s", "leader_msgs", "bsm_msgs");
  out << line;
  for (const auto& c : result.cells) {
    const auto& s = c.stats;
    std::snprintf(line, sizeof line, "%-9s %-6s %2d %4.0f %5zu %8.2f %8.3f %8.3f %8.3f %12.1f %12.1f\n",
                  to_string(c.cell.variant).c_str(), c.cell.volume.c_str(), c.cell.m, c.cell.cr, s.runs,
                  100.0 * s.stable_pct, s.avg_convergence, s.max_convergence, s.global_max_convergence,
                  s.mean_leader_msgs, s.mean_bsm_msgs);
    out << line;
  }
}

std::string cell_label(const Cell& cell) {
  return to_string(cell.variant) + "-" + cell.volume + "-m" + std::to_string(cell.m) + "-cr" +
         format_number(cell.cr);
}

fs::path events_dir(const Config& cfg, const Cell& cell) {
  if (cfg.campaign.cells().size() == 1) return cfg.campaign.out_dir;
  return cfg.campaign.out_dir / cell_label(cell);
}

void prepare_output_dir(const Config& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.campaign.out_dir, ec);
  if (ec) throw OutputError("cannot create '" + cfg.campaign.out_dir.string() + "': " + ec.message());
  const fs::path probe = cfg.campaign.out_dir / ".write-test";
  {
    std::ofstream out(probe);
    if (!out) throw OutputError("output directory '" + cfg.campaign.out_dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
  if (cfg.campaign.events) {
    for (const Cell& c : cfg.campaign.cells()) {
      fs::create_directories(events_dir(cfg, c), ec);
      if (ec) throw OutputError("cannot create '" + events_dir(cfg, c).string() + "': " + ec.message());
    }
  }
}

CampaignResult run_and_write(const Config& cfg) {
  cfg.validate();
  prepare_output_dir(cfg);

  RunHooks hooks;
  if (cfg.campaign.events) {
    hooks.make_sink = [&cfg](std::size_t, const Cell& cell, int run) -> EventSink {
      const fs::path path = events_dir(cfg, cell) / ("events-" + std::to_string(run) + ".jsonl");
      auto out = std::make_shared<std::ofstream>(path, std::ios::binary | std::ios::trunc);
      if (!*out) throw OutputError("cannot write '" + path.string() + "'");
      return [out](const Event& e) { *out << to_jsonl(e) << '\n'; };
    };
    hooks.on_done = [&cfg](std::size_t, const Cell& cell, int run, const RunResult& r) {
      const fs::path path = events_dir(cfg, cell) / ("snapshots-" + std::to_string(run) + ".jsonl");
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      for (const auto& s : r.snapshots) out << to_jsonl(s) << '\n';
      out.flush();
      if (!out) throw OutputError("cannot write '" + path.string() + "'");
    };
  }
  CampaignResult result = run_campaign(cfg, hooks);

  std::ostringstream summary, runs;
  write_summary_csv(summary, result);
  write_runs_csv(runs, result);
  write_file(cfg.campaign.out_dir / "summary.csv", summary.str());
  write_file(cfg.campaign.out_dir / "runs.csv", runs.str());
  write_file(cfg.campaign.out_dir / "metadata.json", metadata_json(cfg));
  return result;
}

}  // namespace leadsel
