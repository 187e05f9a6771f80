#include "dezlab/runner/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>
#include <unordered_set>

#include "dezlab/auxrewards/auxrewards.hpp"
#include "dezlab/explore/policy.hpp"
#include "dezlab/gvf/gvf.hpp"
#include "dezlab/numkit/checkpoint.hpp"
#include "dezlab/qlearner/qlearner.hpp"

namespace dezlab::runner {

namespace fs = std::filesystem;
using gridworlds::EnvKind;
using gridworlds::Event;

namespace {

enum class Behavior { eps_greedy, ez_raw, ez_move, dez };

Behavior pick_behavior(const RunConfig& c) {
  switch (c.algorithm) {
    case Algorithm::dqn:
    case Algorithm::dqn_gvf:
    case Algorithm::dqn_cir:
    case Algorithm::dqn_rs:
      return Behavior::eps_greedy;
    case Algorithm::ez_dqn_vanilla:
      return Behavior::ez_raw;
    case Algorithm::ez_dqn:
    case Algorithm::ez_dqn_gvf:
      return c.env == EnvKind::door_key ? Behavior::ez_move
                                        : Behavior::ez_raw;
    case Algorithm::dez_dqn_gvf:
      return Behavior::dez;
  }
  throw std::invalid_argument("unknown algorithm");
}

std::string timestamp_utc() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json summary_json(const RunConfig& config, const SeedResult& r) {
  nlohmann::json j;
  j["code_version"] = kCodeVersion;
  j["config"] = config_to_json(config);
  j["run_id"] = config.run_id.empty() ? config.derived_run_id() : config.run_id;
  j["seed"] = r.seed;
  j["status"] = r.status;
  j["episodes_completed"] = r.records.size();
  j["unique_states"] = r.unique_states;
  j["head_reads"] = r.head_reads;
  nlohmann::json conv;
  conv["available"] = r.convergence.available;
  conv["final_avg"] = r.convergence.final_avg;
  conv["episodes_to_90"] = r.convergence.episodes_to_90;
  conv["window"] = r.convergence.window;
  j["convergence"] = conv;
  return j;
}

}  // namespace

SeedResult run_seed(const RunConfig& config, std::uint64_t seed,
                    const std::string& out_dir) {
  const auto violations = validate(config);
  if (!violations.empty())
    throw std::invalid_argument("invalid config: " + violations.front());

  SeedResult result;
  result.seed = seed;
  const std::string run_id =
      config.run_id.empty() ? config.derived_run_id() : config.run_id;

  // independent per-purpose streams derived from the run seed
  numkit::Mt64Rng init_rng(numkit::derive_seed(seed, 1));
  numkit::Mt64Rng policy_rng(numkit::derive_seed(seed, 2));

  gridworlds::GridEnv env(config.env, config.grid_dim,
                          numkit::derive_seed(seed, 0));
  const int num_actions = env.num_actions();

  const bool with_gvfs = trains_gvfs(config.algorithm);
  const auto suite =
      with_gvfs ? gvf::gvf_suite(config.env, config.gamma)
                : std::vector<gvf::GvfSpec>{};
  const int num_gvfs = static_cast<int>(suite.size());

  qlearner::MultiHeadNet net(
      build_trunk(config.architecture, env.observation_shape()),
      env.observation_shape(), 1 + num_gvfs, num_actions, init_rng);
  auto opts = qlearner::make_optimizers(net, config.alpha, config.momentum);

  std::vector<double> head_gammas = {config.gamma};
  for (const auto& g : suite) head_gammas.push_back(g.gamma);

  qlearner::TargetSchedule target_schedule;
  target_schedule.period = config.target_update;
  if (config.tau) {
    target_schedule.kind = qlearner::TargetSchedule::Kind::soft;
    target_schedule.tau = *config.tau;
  }

  qlearner::ReplayBuffer buffer(static_cast<std::size_t>(config.buffer));
  const Behavior behavior = pick_behavior(config);
  const explore::EpsilonSchedule schedule{
      config.epsilon_start, config.epsilon_stop, config.epsilon_decay_base,
      config.beta, config.episodes};

  auxrewards::StateCounter counter;  // DQN+CIR lifetime counts
  auxrewards::ShapingRule shaping;
  shaping.bonus = config.effective_shaping_bonus();
  for (const auto& g : gvf::gvf_suite(config.env, config.gamma))
    shaping.events.push_back(g.event);

  std::unordered_set<std::uint64_t> seen_states;

  const std::vector<int> milestones = {0, config.episodes / 2,
                                       config.episodes - 1};
  auto checkpoint_path = [&](int episode) {
    return (fs::path(out_dir) /
            ("seed_" + std::to_string(seed) + "_ep" +
             std::to_string(episode) + ".ckpt"))
        .string();
  };

  std::int64_t step_count = 0;
  try {
    for (int episode = 0; episode < config.episodes; ++episode) {
      const double eps = schedule.at(episode);
      numkit::Tensor obs = env.reset();
      explore::ExplorationState xs;

      metrics::EpisodeRecord rec;
      rec.run_id = run_id;
      rec.seed = seed;
      rec.episode = episode;
      rec.epsilon = eps;
      if (seen_states.insert(env.state_key()).second) rec.unique_delta += 1;

      const gridworlds::Cell spawn = env.state().pos;
      double reward_total = 0.0;

      while (true) {
        const auto qfn = [&](int head) { return net.q_values(obs, head); };
        int action = 0;
        switch (behavior) {
          case Behavior::eps_greedy:
            action = explore::eps_greedy_action(qfn, eps, num_actions,
                                                policy_rng);
            break;
          case Behavior::ez_raw: {
            const auto res = explore::ez_action(xs, eps, config.z_max, qfn,
                                                num_actions, policy_rng);
            if (res.sampled_event)
              rec.zg_hist[{res.state.z, res.state.option}] += 1;
            xs = res.state;
            action = res.action;
            break;
          }
          case Behavior::ez_move: {
            const auto res = explore::ez_movement_action(
                xs, eps, config.z_max, qfn, env.state().heading, policy_rng);
            if (res.sampled_event)
              rec.zg_hist[{res.state.z, res.state.option}] += 1;
            xs = res.state;
            action = res.action;
            break;
          }
          case Behavior::dez: {
            const auto res = explore::dez_action(xs, eps, config.z_max,
                                                 num_gvfs, qfn, num_actions,
                                                 policy_rng);
            if (res.sampled_event)
              rec.zg_hist[{res.state.z, res.state.option}] += 1;
            xs = res.state;
            action = res.action;
            break;
          }
        }

        const auto sr = env.step(action);
        step_count += 1;

        double r_main = sr.reward;
        if (config.algorithm == Algorithm::dqn_cir)
          r_main = auxrewards::cir_reward(counter, env.state_key(), sr.reward,
                                          config.eta);
        else if (config.algorithm == Algorithm::dqn_rs)
          r_main = auxrewards::shaped_reward(shaping, sr.events, sr.reward);

        qlearner::Transition tr;
        tr.obs = obs;
        tr.action = action;
        tr.r_ext = static_cast<float>(sr.reward);
        tr.r_main = static_cast<float>(r_main);
        if (with_gvfs) {
          const auto cv =
              gvf::cumulants(suite, sr.events, env.state().fired);
          tr.cumulants = cv.values;
          tr.gvf_terminal = cv.terminal;
        }
        tr.next_obs = sr.obs;
        tr.terminal = sr.terminal;
        buffer.push(std::move(tr));

        reward_total += sr.reward;
        if (seen_states.insert(env.state_key()).second)
          rec.unique_delta += 1;
        rec.farthest = std::max(
            rec.farthest, gridworlds::manhattan(env.state().pos, spawn));
        for (int e = 0; e < gridworlds::kEventCount; ++e)
          if (sr.events.fired[e] && rec.first_event_step[e] < 0)
            rec.first_event_step[e] = env.state().t;

        if (step_count % config.policy_update == 0)
          qlearner::train_step(net, buffer, config.batch, head_gammas, opts,
                               policy_rng);
        qlearner::maybe_update_target(net, step_count, target_schedule);

        obs = sr.obs;
        if (sr.terminal) break;
      }

      rec.steps = env.state().t;
      rec.reward_ext = reward_total;
      result.records.push_back(std::move(rec));

      if (!out_dir.empty() &&
          std::find(milestones.begin(), milestones.end(), episode) !=
              milestones.end()) {
        const std::string path = checkpoint_path(episode);
        numkit::save_checkpoint(path, net.checkpoint_chain(),
                                net.checkpoint_params());
        result.checkpoints.push_back(path);
      }
    }
  } catch (const numkit::NonFiniteError& e) {
    std::cerr << "[runner] run " << run_id << " seed " << seed
              << " aborted: " << e.what() << "\n";
    result.status = "aborted_nonfinite_loss";
  }

  result.head_reads = net.head_reads();
  result.unique_states = seen_states.size();
  std::vector<double> rewards;
  rewards.reserve(result.records.size());
  for (const auto& r : result.records) rewards.push_back(r.reward_ext);
  result.convergence = metrics::convergence(rewards);
  return result;
}

RunManifest run(const RunConfig& config, const std::string& out_dir,
                int jobs) {
  const auto violations = validate(config);
  if (!violations.empty())
    throw std::invalid_argument("invalid config: " + violations.front());

  const std::string run_id =
      config.run_id.empty() ? config.derived_run_id() : config.run_id;
  const fs::path dir = fs::path(out_dir) / run_id;
  fs::create_directories(dir);

  const std::string started = timestamp_utc();

  const std::size_t n = config.seeds.size();
  std::vector<SeedResult> results(n);
  std::vector<std::exception_ptr> errors(n);

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const std::size_t workers =
      std::min<std::size_t>(n, jobs > 0 ? static_cast<unsigned>(jobs) : hw);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        results[i] = run_seed(config, config.seeds[i], dir.string());
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  RunManifest manifest;
  manifest.run_id = run_id;
  manifest.dir = dir.string();

  nlohmann::json outputs = nlohmann::json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const SeedResult& r = results[i];
    const std::string csv =
        (dir / ("seed_" + std::to_string(r.seed) + ".csv")).string();
    const std::string summary =
        (dir / ("seed_" + std::to_string(r.seed) + ".summary.json")).string();
    metrics::write_csv(csv, r.records);
    {
      std::ofstream out(summary, std::ios::trunc);
      out << summary_json(config, r).dump(2) << "\n";
    }
    manifest.seeds.push_back(r.seed);
    manifest.csv_paths.push_back(csv);
    manifest.summary_paths.push_back(summary);
    manifest.statuses.push_back(r.status);
    manifest.convergence.push_back(r.convergence);

    nlohmann::json o;
    o["seed"] = r.seed;
    o["csv"] = csv;
    o["summary"] = summary;
    o["checkpoints"] = r.checkpoints;
    o["status"] = r.status;
    outputs.push_back(o);
  }

  nlohmann::json m;
  m["run_id"] = run_id;
  m["code_version"] = kCodeVersion;
  m["config"] = config_to_json(config);
  m["outputs"] = outputs;
  m["started"] = started;
  m["finished"] = timestamp_utc();
  manifest.manifest_path = (dir / "manifest.json").string();
  {
    std::ofstream out(manifest.manifest_path, std::ios::trunc);
    out << m.dump(2) << "\n";
  }
  return manifest;
}

std::vector<RunManifest> sweep(const RunConfig& base, const SweepSpec& spec,
                               const std::string& out_dir, int jobs) {
  if (spec.values.empty())
    throw std::invalid_argument("sweep needs at least one value");
  if (!spec.paired_z_max.empty() &&
      spec.paired_z_max.size() != spec.values.size())
    throw std::invalid_argument("paired z_max list must match values");

  std::vector<RunManifest> manifests;
  std::vector<std::string> agg_rows;
  for (std::size_t i = 0; i < spec.values.size(); ++i) {
    RunConfig c = base;
    const double v = spec.values[i];
    if (spec.axis == "z_max") {
      c.z_max = static_cast<int>(v);
    } else if (spec.axis == "beta") {
      c.beta = v;
    } else if (spec.axis == "grid_dim") {
      c.grid_dim = static_cast<int>(v);
      if (!spec.paired_z_max.empty()) c.z_max = spec.paired_z_max[i];
    } else {
      throw std::invalid_argument("unknown sweep axis: " + spec.axis);
    }
    const auto violations = validate(c);
    if (!violations.empty())
      throw std::invalid_argument("sweep point " + metrics::format_double(v) +
                                  " invalid: " + violations.front());

    const std::string base_id =
        base.run_id.empty() ? base.derived_run_id() : base.run_id;
    c.run_id = base_id + "_" + spec.axis + "_" + metrics::format_double(v);
    manifests.push_back(run(c, out_dir, jobs));

    const RunManifest& m = manifests.back();
    double mean = 0.0, count = 0.0;
    std::vector<double> finals;
    double ep90_mean = 0.0;
    for (const auto& conv : m.convergence) {
      finals.push_back(conv.final_avg);
      mean += conv.final_avg;
      ep90_mean += conv.episodes_to_90;
      count += 1.0;
    }
    mean /= count;
    ep90_mean /= count;
    double var = 0.0;
    for (double f : finals) var += (f - mean) * (f - mean);
    const double std_dev =
        finals.size() > 1 ? std::sqrt(var / (finals.size() - 1)) : 0.0;
    const double ci95 = 1.96 * std_dev / std::sqrt(count);

    std::string row = spec.axis + "," + metrics::format_double(v) + "," +
                      std::to_string(c.z_max) + "," +
                      std::to_string(finals.size()) + "," +
                      metrics::format_double(mean) + "," +
                      metrics::format_double(std_dev) + "," +
                      metrics::format_double(ci95) + "," +
                      metrics::format_double(ep90_mean) + ",";
    for (std::size_t k = 0; k < finals.size(); ++k)
      row += (k ? ";" : "") + metrics::format_double(finals[k]);
    agg_rows.push_back(row);
  }

  const std::string base_id =
      base.run_id.empty() ? base.derived_run_id() : base.run_id;
  const fs::path agg =
      fs::path(out_dir) / (base_id + "_" + spec.axis + "_sweep.csv");
  std::ofstream out(agg, std::ios::trunc);
  out << "axis,value,z_max,n_seeds,final_mean,final_std,final_ci95,"
         "ep90_mean,finals\n";
  for (const auto& row : agg_rows) out << row << "\n";
  return manifests;
}

}  // namespace dezlab::runner
