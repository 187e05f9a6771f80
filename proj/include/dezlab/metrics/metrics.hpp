#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dezlab/gridworlds/env.hpp"

namespace dezlab::metrics {

using gridworlds::Cell;

// One CSV row per finished episode.
struct EpisodeRecord {
  std::string run_id;
  std::uint64_t seed = 0;
  int episode = 0;
  double reward_ext = 0.0;  // total extrinsic reward
  int steps = 0;
  int unique_delta = 0;  // never-before-seen discrete states this episode
  int farthest = 0;      // max Manhattan distance from spawn
  double epsilon = 0.0;
  // first step index (1-based) each event fired; -1 when it never did
  std::array<int, gridworlds::kEventCount> first_event_step{-1, -1, -1, -1, -1};
  // sampled (z, g) pairs of this episode's exploration events
  std::map<std::pair<int, int>, int> zg_hist;
};

// Maximum Manhattan distance from spawn over a trajectory of positions.
int farthest_distance(std::span<const Cell> trajectory, Cell spawn);

// Per-window sums of never-before-seen state counts (window in episodes;
// the last window may be partial).
std::vector<std::int64_t> unique_states_per_window(
    const std::vector<int>& unique_delta_per_episode, int window = 100);

struct ConvergenceStat {
  bool available = false;  // false when the run is shorter than the window
  double final_avg = 0.0;  // mean reward of the last `window` episodes
  int episodes_to_90 = -1; // first episode whose trailing mean >= 0.9*final
  int window = 200;
};

// Trailing window = 200 episodes; for episodes earlier than the window the
// available prefix is averaged. An all-zero run reaches 90% of 0 at episode
// 0 by convention.
ConvergenceStat convergence(const std::vector<double>& rewards,
                            int window = 200);

// Mean and sample standard deviation across seeds; all runs must have equal
// length (throws std::invalid_argument otherwise).
struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> stddev;
};
SeriesStats across_seeds(const std::vector<std::vector<double>>& runs);

// --- CSV / summary plumbing ---

extern const char* const kCsvHeader;

std::string to_csv_row(const EpisodeRecord& rec);
EpisodeRecord from_csv_row(const std::string& line);

void write_csv(const std::string& path,
               const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_csv(const std::string& path);

// Shortest round-trip decimal rendering (std::to_chars) so that re-parsing
// a CSV reproduces the exact doubles that were written.
std::string format_double(double v);

}  // namespace dezlab::metrics
