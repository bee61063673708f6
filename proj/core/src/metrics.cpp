#include "leadsel/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace leadsel {

namespace {

// Sorting before summation makes the mean independent of input order.
double ordered_mean(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

}  // namespace

bool is_stable(const Snapshot& s) {
  if (s.participants.empty()) return true;
  const VehicleId leader = s.participants.front().believed_leader;
  bool present = false;
  for (const auto& p : s.participants) {
    if (p.believed_leader != leader) return false;
    present = present || p.id == leader;
  }
  return present;
}

std::vector<Episode> convergence_episodes(std::span<const Snapshot> snapshots) {
  std::vector<Episode> episodes;
  bool open = false;
  double start = 0.0;
  for (const auto& s : snapshots) {
    const bool stable = is_stable(s);
    if (!stable && !open) {
      open = true;
      start = s.t;
    } else if (stable && open) {
      open = false;
      episodes.push_back({start, s.t});
    }
  }
  if (open) {
    const std::size_t n = snapshots.size();
    const double spacing = n >= 2 ? snapshots[n - 1].t - snapshots[n - 2].t : 0.0;
    episodes.push_back({start, snapshots.back().t + spacing});
  }
  return episodes;
}

double RunMetrics::stable_fraction() const {
  if (occupied_steps == 0) return 1.0;
  return static_cast<double>(stable_steps) / static_cast<double>(occupied_steps);
}

RunMetrics measure(const RunResult& r) {
  RunMetrics m;
  for (const auto& s : r.snapshots) {
    if (s.participants.empty()) continue;
    ++m.occupied_steps;
    if (is_stable(s)) ++m.stable_steps;
  }
  for (const auto& e : convergence_episodes(r.snapshots)) m.episode_durations.push_back(e.duration());
  m.leader_msgs = r.leader_msg_count;
  m.bsm_msgs = r.bsm_count;
  return m;
}

SummaryStats summarize(std::span<const RunMetrics> runs) {
  if (runs.empty()) throw std::invalid_argument("summarize: no runs");
  SummaryStats out;
  out.runs = runs.size();

  std::vector<double> fractions, run_means, run_maxima, leader_msgs, bsm_msgs;
  for (const auto& r : runs) {
    if (r.occupied_steps > 0) fractions.push_back(r.stable_fraction());
    if (!r.episode_durations.empty()) {
      run_means.push_back(ordered_mean(r.episode_durations));
      const double longest = *std::max_element(r.episode_durations.begin(), r.episode_durations.end());
      run_maxima.push_back(longest);
      out.global_max_convergence = std::max(out.global_max_convergence, longest);
      out.episodes += r.episode_durations.size();
    }
    leader_msgs.push_back(static_cast<double>(r.leader_msgs));
    bsm_msgs.push_back(static_cast<double>(r.bsm_msgs));
  }
  out.stable_pct = fractions.empty() ? 1.0 : ordered_mean(fractions);
  out.avg_convergence = ordered_mean(run_means);
  out.max_convergence = ordered_mean(run_maxima);
  out.mean_leader_msgs = ordered_mean(leader_msgs);
  out.mean_bsm_msgs = ordered_mean(bsm_msgs);
  return out;
}

SummaryStats summarize(std::span<const RunResult> runs) {
  std::vector<RunMetrics> metrics;
  metrics.reserve(runs.size());
  for (const auto& r : runs) metrics.push_back(measure(r));
  return summarize(metrics);
}

}  // namespace leadsel
