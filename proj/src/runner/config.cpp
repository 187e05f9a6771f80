#include "dezlab/runner/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "dezlab/gvf/gvf.hpp"

namespace dezlab::runner {

using gridworlds::EnvKind;

std::string algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::dqn: return "DQN";
    case Algorithm::dqn_gvf: return "DQN+GVF";
    case Algorithm::ez_dqn: return "EZ-DQN";
    case Algorithm::ez_dqn_vanilla: return "EZ-DQN(Vanilla)";
    case Algorithm::ez_dqn_gvf: return "EZ-DQN+GVF";
    case Algorithm::dez_dqn_gvf: return "DEZ-DQN+GVF";
    case Algorithm::dqn_cir: return "DQN+CIR";
    case Algorithm::dqn_rs: return "DQN+RS";
  }
  throw std::invalid_argument("unknown algorithm");
}

Algorithm algorithm_from_name(const std::string& name) {
  for (Algorithm a :
       {Algorithm::dqn, Algorithm::dqn_gvf, Algorithm::ez_dqn,
        Algorithm::ez_dqn_vanilla, Algorithm::ez_dqn_gvf,
        Algorithm::dez_dqn_gvf, Algorithm::dqn_cir, Algorithm::dqn_rs})
    if (algorithm_name(a) == name) return a;
  throw std::invalid_argument("unknown algorithm: " + name);
}

bool trains_gvfs(Algorithm a) {
  return a == Algorithm::dqn_gvf || a == Algorithm::ez_dqn_gvf ||
         a == Algorithm::dez_dqn_gvf;
}

bool acts_from_gvfs(Algorithm a) { return a == Algorithm::dez_dqn_gvf; }

bool uses_persistence(Algorithm a) {
  return a == Algorithm::ez_dqn || a == Algorithm::ez_dqn_vanilla ||
         a == Algorithm::ez_dqn_gvf || a == Algorithm::dez_dqn_gvf;
}

std::string RunConfig::derived_run_id() const {
  std::string id = gridworlds::env_kind_name(env) + "_" +
                   std::to_string(grid_dim) + "_" +
                   algorithm_name(algorithm);
  for (char& c : id)
    if (c == '+' || c == '(' || c == ')' || c == ' ') c = '-';
  return id;
}

RunConfig default_config(EnvKind env, int grid_dim) {
  RunConfig c;
  c.env = env;
  c.grid_dim = grid_dim;
  switch (env) {
    case EnvKind::two_rooms:
      break;  // struct defaults are the TwoRooms row
    case EnvKind::subgoal_two_rooms:
      c.episodes = 8000;
      c.epsilon_decay_base = 0.001;
      c.z_max = 30;
      c.gvfs = 2;
      c.buffer = 60000;
      break;
    case EnvKind::door_key:
      c.gamma = 0.95;
      c.alpha = 0.0001;
      c.tau = 0.05;
      c.beta = 0.5;
      c.z_max = 3;
      c.gvfs = 2;
      c.eta = 0.5;
      c.target_update = 1000;
      if (grid_dim >= 8) {
        c.episodes = 30000;
        c.batch = 4096;
        c.buffer = 60000;
        c.architecture = {"conv:16:2", "pool:2:1", "conv:16:2",
                          "pool:2:1",  "fc:120",   "fc:60",
                          "fc:10"};
      } else {
        c.episodes = 10000;
        c.batch = 2048;
        c.buffer = 50000;
        c.architecture = {"conv:16:2", "pool:2:2", "fc:60", "fc:60"};
      }
      break;
  }
  return c;
}

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "env",          "grid_dim",      "algorithm",
      "episodes",     "batch",         "gamma",
      "alpha",        "tau",           "epsilon_start",
      "epsilon_stop", "epsilon_decay_base", "beta",
      "z_max",        "gvfs",          "eta",
      "architecture", "buffer",        "target_update",
      "policy_update","seeds",         "momentum",
      "shaping_bonus","run_id"};
  return keys;
}

std::vector<std::string> parse_architecture(const nlohmann::json& j) {
  std::vector<std::string> arch;
  for (const auto& item : j) {
    if (item.is_number_integer())
      arch.push_back("fc:" + std::to_string(item.get<int>()));
    else
      arch.push_back(item.get<std::string>());
  }
  return arch;
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.contains("env") || !j.contains("grid_dim"))
    throw std::invalid_argument("config requires env and grid_dim");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!known_keys().count(key))
      throw std::invalid_argument("unknown config key: " + key);
  }

  RunConfig c = default_config(
      gridworlds::env_kind_from_name(j.at("env").get<std::string>()),
      j.at("grid_dim").get<int>());

  if (j.contains("algorithm"))
    c.algorithm = algorithm_from_name(j.at("algorithm").get<std::string>());
  if (j.contains("episodes")) c.episodes = j.at("episodes").get<int>();
  if (j.contains("batch")) c.batch = j.at("batch").get<int>();
  if (j.contains("gamma")) c.gamma = j.at("gamma").get<double>();
  if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
  if (j.contains("tau")) {
    if (j.at("tau").is_null())
      c.tau.reset();
    else
      c.tau = j.at("tau").get<double>();
  }
  if (j.contains("epsilon_start"))
    c.epsilon_start = j.at("epsilon_start").get<double>();
  if (j.contains("epsilon_stop"))
    c.epsilon_stop = j.at("epsilon_stop").get<double>();
  if (j.contains("epsilon_decay_base"))
    c.epsilon_decay_base = j.at("epsilon_decay_base").get<double>();
  if (j.contains("beta")) c.beta = j.at("beta").get<double>();
  if (j.contains("z_max")) c.z_max = j.at("z_max").get<int>();
  if (j.contains("gvfs")) c.gvfs = j.at("gvfs").get<int>();
  if (j.contains("eta")) c.eta = j.at("eta").get<double>();
  if (j.contains("architecture"))
    c.architecture = parse_architecture(j.at("architecture"));
  if (j.contains("buffer")) c.buffer = j.at("buffer").get<int>();
  if (j.contains("target_update"))
    c.target_update = j.at("target_update").get<int>();
  if (j.contains("policy_update"))
    c.policy_update = j.at("policy_update").get<int>();
  if (j.contains("seeds"))
    c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("momentum")) c.momentum = j.at("momentum").get<double>();
  if (j.contains("shaping_bonus"))
    c.shaping_bonus = j.at("shaping_bonus").get<double>();
  if (j.contains("run_id")) c.run_id = j.at("run_id").get<std::string>();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  nlohmann::json j;
  in >> j;
  return config_from_json(j);
}

nlohmann::json config_to_json(const RunConfig& c) {
  nlohmann::json j;
  j["env"] = gridworlds::env_kind_name(c.env);
  j["grid_dim"] = c.grid_dim;
  j["algorithm"] = algorithm_name(c.algorithm);
  j["episodes"] = c.episodes;
  j["batch"] = c.batch;
  j["gamma"] = c.gamma;
  j["alpha"] = c.alpha;
  if (c.tau)
    j["tau"] = *c.tau;
  else
    j["tau"] = nullptr;
  j["epsilon_start"] = c.epsilon_start;
  j["epsilon_stop"] = c.epsilon_stop;
  j["epsilon_decay_base"] = c.epsilon_decay_base;
  j["beta"] = c.beta;
  j["z_max"] = c.z_max;
  j["gvfs"] = c.gvfs;
  j["eta"] = c.eta;
  j["architecture"] = c.architecture;
  j["buffer"] = c.buffer;
  j["target_update"] = c.target_update;
  j["policy_update"] = c.policy_update;
  j["seeds"] = c.seeds;
  j["momentum"] = c.momentum;
  j["shaping_bonus"] = c.shaping_bonus;
  j["run_id"] = c.run_id.empty() ? c.derived_run_id() : c.run_id;
  return j;
}

std::vector<numkit::LayerSpec> build_trunk(
    const std::vector<std::string>& architecture,
    const std::vector<int>& obs_shape) {
  using numkit::LayerSpec;
  std::vector<LayerSpec> chain;
  std::vector<int> shape = obs_shape;

  auto parse_fields = [](const std::string& entry) {
    std::vector<std::string> parts;
    std::stringstream ss(entry);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    return parts;
  };

  for (const std::string& entry : architecture) {
    const auto parts = parse_fields(entry);
    if (parts.empty()) throw std::invalid_argument("empty architecture entry");
    const std::string& kind = parts[0];
    if (kind == "fc") {
      if (parts.size() != 2)
        throw std::invalid_argument("fc entry wants fc:<units>: " + entry);
      const int units = std::stoi(parts[1]);
      const int in = static_cast<int>(numkit::numel(shape));
      chain.push_back(LayerSpec::dense(in, units));
      chain.push_back(LayerSpec::relu());
      shape = {units};
    } else if (kind == "conv") {
      if (parts.size() != 3 && parts.size() != 4)
        throw std::invalid_argument("conv entry wants conv:<C>:<F>[:<S>]: " +
                                    entry);
      if (shape.size() != 3)
        throw std::invalid_argument("conv layer needs [C,H,W] input");
      const int ch = std::stoi(parts[1]);
      const int f = std::stoi(parts[2]);
      const int s = parts.size() == 4 ? std::stoi(parts[3]) : 1;
      chain.push_back(LayerSpec::conv2d(shape[0], ch, f, s));
      chain.push_back(LayerSpec::relu());
      shape = numkit::layer_output_shape(chain[chain.size() - 2], shape);
    } else if (kind == "pool") {
      if (parts.size() != 3)
        throw std::invalid_argument("pool entry wants pool:<F>:<S>: " + entry);
      chain.push_back(
          LayerSpec::maxpool2d(std::stoi(parts[1]), std::stoi(parts[2])));
      shape = numkit::layer_output_shape(chain.back(), shape);
    } else {
      throw std::invalid_argument("unknown architecture entry: " + entry);
    }
  }
  numkit::validate_chain(chain, obs_shape);
  return chain;
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> bad;
  if (c.grid_dim < 5) bad.push_back("grid_dim must be >= 5");
  if (c.episodes < 1) bad.push_back("episodes must be >= 1");
  if (c.batch < 1) bad.push_back("batch must be >= 1");
  if (c.buffer < c.batch) bad.push_back("buffer must hold at least one batch");
  if (c.gamma < 0.0 || c.gamma > 1.0) bad.push_back("gamma must be in [0,1]");
  if (c.alpha <= 0.0) bad.push_back("alpha must be > 0");
  if (c.tau && (*c.tau <= 0.0 || *c.tau > 1.0))
    bad.push_back("tau must be in (0,1]");
  if (c.epsilon_start < 0.0 || c.epsilon_start > 1.0 ||
      c.epsilon_stop < 0.0 || c.epsilon_stop > c.epsilon_start)
    bad.push_back("epsilon schedule needs 0 <= stop <= start <= 1");
  if (c.epsilon_decay_base <= 0.0 || c.epsilon_decay_base >= 1.0)
    bad.push_back("epsilon_decay_base must be in (0,1)");
  if (c.beta <= 0.0 || c.beta > 1.0) bad.push_back("beta must be in (0,1]");
  if (uses_persistence(c.algorithm) && c.z_max < 1)
    bad.push_back("z_max must be >= 1 for EZ/DEZ algorithms");
  if (c.eta < 0.0) bad.push_back("eta must be >= 0");
  if (c.algorithm == Algorithm::dqn_rs && c.effective_shaping_bonus() <= 0.0)
    bad.push_back("DQN+RS requires a positive shaping bonus");
  if (c.target_update < 1) bad.push_back("target_update must be >= 1");
  if (c.policy_update < 1) bad.push_back("policy_update must be >= 1");
  if (c.seeds.empty()) bad.push_back("at least one seed is required");
  if (c.momentum < 0.0 || c.momentum >= 1.0)
    bad.push_back("momentum must be in [0,1)");

  if (trains_gvfs(c.algorithm)) {
    const auto suite = gvf::gvf_suite(c.env, c.gamma);
    if (c.gvfs != static_cast<int>(suite.size()))
      bad.push_back("gvfs must equal the environment's task count (" +
                    std::to_string(suite.size()) + ")");
  }

  if (c.grid_dim >= 5) {
    try {
      gridworlds::GridEnv probe(c.env, c.grid_dim, 1);
      (void)build_trunk(c.architecture, probe.observation_shape());
    } catch (const std::exception& e) {
      bad.push_back(std::string("architecture invalid: ") + e.what());
    }
  }
  return bad;
}

}  // namespace dezlab::runner
