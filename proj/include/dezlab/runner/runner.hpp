#pragma once

#include <string>
#include <vector>

#include "dezlab/metrics/metrics.hpp"
#include "dezlab/runner/config.hpp"

namespace dezlab::runner {

struct SeedResult {
  std::uint64_t seed = 0;
  std::string status = "ok";  // or "aborted_nonfinite_loss"
  std::vector<metrics::EpisodeRecord> records;
  std::vector<std::uint64_t> head_reads;
  std::uint64_t unique_states = 0;
  metrics::ConvergenceStat convergence;
  std::vector<std::string> checkpoints;
};

// Trains a single seed. Checkpoints (episode 0, midpoint, final) are written
// under out_dir when it is non-empty; pass "" for a pure in-memory run.
SeedResult run_seed(const RunConfig& config, std::uint64_t seed,
                    const std::string& out_dir = "");

struct RunManifest {
  std::string run_id;
  std::string dir;
  std::string manifest_path;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> csv_paths;
  std::vector<std::string> summary_paths;
  std::vector<std::string> statuses;
  std::vector<metrics::ConvergenceStat> convergence;
};

// Runs every seed of the config (in parallel up to `jobs` threads; 0 = all
// hardware threads), writes one CSV + one JSON summary per seed plus a
// manifest.json, and returns the manifest.
RunManifest run(const RunConfig& config, const std::string& out_dir,
                int jobs = 0);

struct SweepSpec {
  std::string axis;            // "z_max" | "beta" | "grid_dim"
  std::vector<double> values;
  std::vector<int> paired_z_max;  // optional companion for grid_dim sweeps
};

// Cartesian runs sharing the base config's seed list; writes each point
// under its own subdirectory plus an aggregate.csv of final convergence
// stats per point.
std::vector<RunManifest> sweep(const RunConfig& base, const SweepSpec& spec,
                               const std::string& out_dir, int jobs = 0);

}  // namespace dezlab::runner
