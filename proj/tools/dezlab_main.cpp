#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "dezlab/runner/runner.hpp"

namespace {

std::string default_out_dir() {
  const char* env = std::getenv("DEZLAB_OUT");
  return env ? env : "./out";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dezlab: directed-exploration gridworld experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = default_out_dir();
  int jobs = 0;

  auto* run_cmd = app.add_subcommand("run", "train every seed of a config");
  std::uint64_t seed_override = 0;
  bool has_seed = false;
  run_cmd->add_option("--config", config_path, "config file (JSON)")
      ->required();
  run_cmd->add_option("--seed", seed_override, "run a single seed instead")
      ->each([&](const std::string&) { has_seed = true; });
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_option("--jobs", jobs, "parallel seed jobs (0 = all cores)");

  auto* sweep_cmd = app.add_subcommand("sweep", "sweep one config axis");
  dezlab::runner::SweepSpec spec;
  sweep_cmd->add_option("--config", config_path, "config file (JSON)")
      ->required();
  sweep_cmd->add_option("--axis", spec.axis, "z_max | beta | grid_dim")
      ->required();
  sweep_cmd->add_option("--values", spec.values, "sweep values")->required();
  sweep_cmd->add_option("--zmax", spec.paired_z_max,
                        "paired z_max per grid_dim value");
  sweep_cmd->add_option("--out", out_dir, "output directory");
  sweep_cmd->add_option("--jobs", jobs, "parallel seed jobs (0 = all cores)");

  auto* validate_cmd =
      app.add_subcommand("validate", "check a config without running it");
  validate_cmd->add_option("--config", config_path, "config file (JSON)")
      ->required();

  auto* render_cmd =
      app.add_subcommand("render", "print a layout as ASCII (debugging)");
  std::string env_name = "two_rooms";
  int dim = 15;
  std::uint64_t render_seed = 1;
  render_cmd->add_option("--env", env_name,
                         "two_rooms | subgoal_two_rooms | door_key");
  render_cmd->add_option("--dim", dim, "grid dimension");
  render_cmd->add_option("--seed", render_seed, "layout seed (door_key)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(run_cmd)) {
      auto config = dezlab::runner::load_config(config_path);
      if (has_seed) config.seeds = {seed_override};
      const auto manifest = dezlab::runner::run(config, out_dir, jobs);
      std::cout << "run " << manifest.run_id << " -> " << manifest.dir
                << "\n";
      for (std::size_t i = 0; i < manifest.seeds.size(); ++i)
        std::cout << "  seed " << manifest.seeds[i] << " ["
                  << manifest.statuses[i]
                  << "] final=" << manifest.convergence[i].final_avg << "\n";
    } else if (app.got_subcommand(sweep_cmd)) {
      const auto base = dezlab::runner::load_config(config_path);
      const auto manifests =
          dezlab::runner::sweep(base, spec, out_dir, jobs);
      std::cout << "sweep wrote " << manifests.size() << " points under "
                << out_dir << "\n";
    } else if (app.got_subcommand(validate_cmd)) {
      const auto config = dezlab::runner::load_config(config_path);
      const auto violations = dezlab::runner::validate(config);
      if (violations.empty()) {
        std::cout << "ok\n";
      } else {
        for (const auto& v : violations) std::cout << "violation: " << v << "\n";
        return 1;
      }
    } else if (app.got_subcommand(render_cmd)) {
      dezlab::gridworlds::GridEnv env(
          dezlab::gridworlds::env_kind_from_name(env_name), dim, render_seed);
      std::cout << env.render();
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
