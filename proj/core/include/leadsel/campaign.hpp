#pragma once

// Seeded batch execution of a config's matrix and serialization of results.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "leadsel/config.hpp"
#include "leadsel/metrics.hpp"

namespace leadsel {

/// Raised when an output file or directory cannot be written.
class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunRecord {
  int run = 0;
  std::uint64_t seed = 0;
  RunMetrics metrics;
};

struct CellResult {
  Cell cell;
  SummaryStats stats;
  std::vector<RunRecord> runs;  ///< ascending run index
};

struct CampaignResult {
  std::uint64_t root_seed = 0;
  std::vector<CellResult> cells;  ///< matrix order
};

/// Per-run callbacks. Both may be called from worker threads, concurrently
/// for different runs.
struct RunHooks {
  /// Called before a run starts; the returned sink receives the run's events.
  std::function<EventSink(std::size_t cell_index, const Cell& cell, int run)> make_sink;
  /// Called after a run finishes.
  std::function<void(std::size_t cell_index, const Cell& cell, int run, const RunResult& r)> on_done;
};

/// Runs every (cell, run) pair. Seeds are run_seed(root_seed, cell_index,
/// run). Results do not depend on campaign.threads. An exception thrown by a
/// run or hook is rethrown after all workers stop.
CampaignResult run_campaign(const Config& cfg, const RunHooks& hooks = {});

/// Exact header line of summary.csv (without newline).
const std::string& summary_header();

/// %.6g with '.' as decimal separator regardless of locale.
std::string format_number(double v);

void write_summary_csv(std::ostream& out, const CampaignResult& result);
void write_runs_csv(std::ostream& out, const CampaignResult& result);
std::string metadata_json(const Config& cfg);

/// Fixed-width console table, one line per cell.
void print_summary_table(std::ostream& out, const CampaignResult& result);

/// Directory holding event logs of a cell: `out_dir` itself for a single-cell
/// matrix, a per-cell subdirectory otherwise.
std::filesystem::path events_dir(const Config& cfg, const Cell& cell);
std::string cell_label(const Cell& cell);

/// Creates out_dir and checks that it is writable. Throws OutputError.
void prepare_output_dir(const Config& cfg);

/// Runs the campaign and writes summary.csv, runs.csv, metadata.json and,
/// when enabled, events-<run>.jsonl plus snapshots-<run>.jsonl per run.
/// Throws OutputError on write failure.
CampaignResult run_and_write(const Config& cfg);

}  // namespace leadsel
