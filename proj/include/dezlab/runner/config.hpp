#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dezlab/gridworlds/env.hpp"
#include "dezlab/numkit/layers.hpp"

namespace dezlab::runner {

inline constexpr const char* kCodeVersion = "dezlab-1.0.0";

enum class Algorithm {
  dqn,
  dqn_gvf,
  ez_dqn,
  ez_dqn_vanilla,
  ez_dqn_gvf,
  dez_dqn_gvf,
  dqn_cir,
  dqn_rs
};

std::string algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

// Which modules an algorithm activates: GVF heads are trained by the *GVF
// variants only; only DEZ ever selects actions from them.
bool trains_gvfs(Algorithm a);
bool acts_from_gvfs(Algorithm a);
bool uses_persistence(Algorithm a);

// Full experiment description. Defaults per environment match the published
// hyper-parameter table rows.
struct RunConfig {
  gridworlds::EnvKind env = gridworlds::EnvKind::two_rooms;
  int grid_dim = 50;
  Algorithm algorithm = Algorithm::dqn;

  int episodes = 4000;
  int batch = 4096;
  double gamma = 0.99;
  double alpha = 0.001;
  std::optional<double> tau;  // set -> soft target updates

  double epsilon_start = 1.0;
  double epsilon_stop = 0.01;
  double epsilon_decay_base = 0.01;
  double beta = 1.0;

  int z_max = 10;
  int gvfs = 1;
  double eta = 0.01;

  std::vector<std::string> architecture = {"fc:32", "fc:32"};
  int buffer = 50000;
  int target_update = 100;
  int policy_update = 10;
  std::vector<std::uint64_t> seeds = {54334, 82654, 21198, 83554, 29948};

  double momentum = 0.0;
  double shaping_bonus = -1.0;  // < 0 -> reuse eta
  std::string run_id;           // empty -> derived from env/dim/algorithm

  double effective_shaping_bonus() const {
    return shaping_bonus < 0.0 ? eta : shaping_bonus;
  }
  std::string derived_run_id() const;
};

RunConfig default_config(gridworlds::EnvKind env, int grid_dim);

// JSON key-value config; unknown keys are rejected. Keys absent from the
// file keep the per-environment defaults.
RunConfig load_config(const std::string& path);
RunConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const RunConfig& c);

// Empty result means the config is runnable.
std::vector<std::string> validate(const RunConfig& c);

// Parses the architecture strings ("fc:N" / plain N, "conv:C:F[:S]",
// "pool:F:S") into the trunk chain, ReLU after every dense/conv layer.
std::vector<numkit::LayerSpec> build_trunk(
    const std::vector<std::string>& architecture,
    const std::vector<int>& obs_shape);

}  // namespace dezlab::runner
