#include "dezlab/explore/policy.hpp"

#include <stdexcept>

#include "dezlab/gridworlds/env.hpp"

namespace dezlab::explore {

int argmax_action(const std::vector<float>& q) {
  if (q.empty()) throw std::invalid_argument("empty action-value vector");
  int best = 0;
  for (int i = 1; i < static_cast<int>(q.size()); ++i)
    if (q[i] > q[best]) best = i;
  return best;
}

ActionResult dez_action(const ExplorationState& xs, double epsilon, int z_max,
                        int num_gvfs, const QFn& q, int num_actions,
                        RngStream& rng) {
  if (z_max < 1) throw std::invalid_argument("z_max must be >= 1");
  if (num_gvfs < 0) throw std::invalid_argument("num_gvfs must be >= 0");

  ActionResult res;
  res.state = xs;

  if (xs.z == 0) {
    // Timer ran out: choose controlling policy.
    if (rng.uniform() < epsilon) {
      res.state.z = rng.uniform_int(1, z_max);
      res.state.option = rng.uniform_int(0, num_gvfs);
      res.sampled_event = true;
      if (res.state.option == 0) {
        res.state.frozen_action = rng.uniform_int(0, num_actions - 1);
        res.action = res.state.frozen_action;
      } else {
        res.action = argmax_action(q(res.state.option));
      }
      // no decrement on the sampling step: the event lasts z+1 steps
    } else {
      res.action = argmax_action(q(0));
    }
  } else {
    // Continue previous exploration policy.
    res.action = xs.option == 0 ? xs.frozen_action
                                : argmax_action(q(xs.option));
    res.state.z = xs.z - 1;
  }
  return res;
}

ActionResult ez_action(const ExplorationState& xs, double epsilon, int z_max,
                       const QFn& q, int num_actions, RngStream& rng) {
  return dez_action(xs, epsilon, z_max, 0, q, num_actions, rng);
}

int MovementOption::primitive(int heading) const {
  using namespace gridworlds::doorkey_actions;
  if (heading == target_heading) return kForward;
  const int diff = (target_heading - heading + 4) % 4;
  return diff == 3 ? kTurnLeft : kTurnRight;
}

const std::vector<MovementOption>& doorkey_movement_options() {
  using namespace gridworlds::headings;
  static const std::vector<MovementOption> opts = {
      {kWest}, {kEast}, {kNorth}};  // left, right, up
  return opts;
}

ActionResult ez_movement_action(const ExplorationState& xs, double epsilon,
                                int z_max, const QFn& q, int current_heading,
                                RngStream& rng) {
  if (z_max < 1) throw std::invalid_argument("z_max must be >= 1");
  const auto& options = doorkey_movement_options();

  ActionResult res;
  res.state = xs;

  if (xs.z == 0) {
    if (rng.uniform() < epsilon) {
      res.state.z = rng.uniform_int(1, z_max);
      res.state.frozen_action =
          rng.uniform_int(0, static_cast<int>(options.size()) - 1);
      res.state.option = 0;
      res.sampled_event = true;
      res.action = options[res.state.frozen_action].primitive(current_heading);
    } else {
      res.action = argmax_action(q(0));
    }
  } else {
    res.action = options[xs.frozen_action].primitive(current_heading);
    res.state.z = xs.z - 1;
  }
  return res;
}

int eps_greedy_action(const QFn& q, double epsilon, int num_actions,
                      RngStream& rng) {
  if (rng.uniform() < epsilon) return rng.uniform_int(0, num_actions - 1);
  return argmax_action(q(0));
}

}  // namespace dezlab::explore
