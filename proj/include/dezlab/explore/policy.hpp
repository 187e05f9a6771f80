#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "dezlab/numkit/rng.hpp"

namespace dezlab::explore {

using numkit::RngStream;

// Action-value access for the current observation; called lazily with the
// head that is actually consulted (0 = main task, 1..M = GVFs).
using QFn = std::function<std::vector<float>(int head)>;

// Lowest index wins ties.
int argmax_action(const std::vector<float>& q);

// Countdown/option/frozen-action triple. z counts the remaining steps of the
// current exploratory option; option 0 replays the frozen random action,
// option g >= 1 follows GVF g greedily. For the DoorKey movement-option
// variant, frozen_action holds the movement-option id instead.
struct ExplorationState {
  int z = 0;
  int frozen_action = -1;
  int option = 0;
};

struct ActionResult {
  int action = 0;
  ExplorationState state;
  bool sampled_event = false;  // a fresh (z, g) was drawn on this call
};

// One decision of the directed temporally-extended policy:
//   z == 0, rand >= eps  -> argmax of head 0
//   z == 0, rand <  eps  -> draw z ~ U[1, Z_max], g ~ U[0, M]; act (g == 0
//                           freezes a uniform random action), z is NOT
//                           decremented on this first step
//   z > 0                -> re-emit per g, decrement z
// An exploration event therefore lasts z+1 steps.
ActionResult dez_action(const ExplorationState& xs, double epsilon, int z_max,
                        int num_gvfs, const QFn& q, int num_actions,
                        RngStream& rng);

// Temporally-extended epsilon-greedy: dez_action with zero GVF options.
ActionResult ez_action(const ExplorationState& xs, double epsilon, int z_max,
                       const QFn& q, int num_actions, RngStream& rng);

// Closed-loop movement option for turn-based grids: rotate toward the target
// heading (<= 2 turns, 180 degree turns go clockwise) then issue forward.
// Emits DoorKey primitive actions.
struct MovementOption {
  int target_heading = 0;
  int primitive(int heading) const;
};
// The option set used by EZ on DoorKey: going left, right and up.
const std::vector<MovementOption>& doorkey_movement_options();

// EZ variant whose exploratory option is a movement option instead of a raw
// action repetition. current_heading feeds the closed-loop rule.
ActionResult ez_movement_action(const ExplorationState& xs, double epsilon,
                                int z_max, const QFn& q, int current_heading,
                                RngStream& rng);

// Plain epsilon-greedy over head 0.
int eps_greedy_action(const QFn& q, double epsilon, int num_actions,
                      RngStream& rng);

// eps(t) = max(eps_stop, eps_start * decay^t) with
// decay = decay_base^(1 / (episodes * beta)); t counts episodes.
struct EpsilonSchedule {
  double eps_start = 1.0;
  double eps_stop = 0.01;
  double decay_base = 0.01;
  double beta = 1.0;
  int episodes = 1;

  double decay() const {
    return std::pow(decay_base, 1.0 / (static_cast<double>(episodes) * beta));
  }
  double at(int episode) const {
    const double eps = eps_start * std::pow(decay(), episode);
    return eps < eps_stop ? eps_stop : eps;
  }
};

}  // namespace dezlab::explore
