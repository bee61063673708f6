#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "leadsel/sim.hpp"

namespace leadsel {

/// True iff nobody participates, or every participant believes in the same
/// leader and that leader is itself a participant.
bool is_stable(const Snapshot& s);

struct Episode {
  double start = 0.0;
  double end = 0.0;

  double duration() const { return end - start; }
};

/// Maximal runs of unstable snapshots. An episode starts at the first
/// unstable snapshot and ends at the next stable one; an episode still open
/// at the last snapshot ends one snapshot spacing after it.
std::vector<Episode> convergence_episodes(std::span<const Snapshot> snapshots);

/// Per-run reduction of a RunResult; all that summarize() needs.
struct RunMetrics {
  std::size_t occupied_steps = 0;
  std::size_t stable_steps = 0;
  std::vector<double> episode_durations;
  std::uint64_t leader_msgs = 0;
  std::uint64_t bsm_msgs = 0;

  /// Stable fraction of occupied steps; 1 when nothing was occupied.
  double stable_fraction() const;
};

RunMetrics measure(const RunResult& r);

struct SummaryStats {
  double stable_pct = 1.0;
  /// Mean over runs with episodes of the run's mean episode duration.
  double avg_convergence = 0.0;
  /// Mean over runs with episodes of the run's longest episode.
  double max_convergence = 0.0;
  /// Longest episode of the whole campaign.
  double global_max_convergence = 0.0;
  double mean_leader_msgs = 0.0;
  double mean_bsm_msgs = 0.0;
  std::size_t runs = 0;
  std::size_t episodes = 0;
};

/// Throws std::invalid_argument for empty input. The result does not depend
/// on the order of the inputs.
SummaryStats summarize(std::span<const RunMetrics> runs);
SummaryStats summarize(std::span<const RunResult> runs);

}  // namespace leadsel
