#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dezlab/gridworlds/env.hpp"

namespace dezlab::auxrewards {

using gridworlds::Event;
using gridworlds::EventSet;

// Lifetime visit counts over discrete state keys; survives episode
// boundaries, reset only between runs.
class StateCounter {
 public:
  // Increments and returns the new count N(s) >= 1.
  std::uint64_t visit(std::uint64_t state_key) { return ++counts_[state_key]; }
  std::uint64_t count(std::uint64_t state_key) const {
    auto it = counts_.find(state_key);
    return it == counts_.end() ? 0 : it->second;
  }
  std::uint64_t unique_states() const { return counts_.size(); }

 private:
  std::unordered_map<std::uint64_t, std::uint64_t> counts_;
};

// Count-based intrinsic reward: increments the counter for the visited state
// and returns r_e + eta / sqrt(N).
double cir_reward(StateCounter& counter, std::uint64_t state_key, double r_e,
                  double eta);

// One-shot subgoal bonuses on the same events the GVF cumulants use.
struct ShapingRule {
  double bonus = 0.0;
  std::vector<Event> events;
};

// events_now holds only first occurrences (environment semantics), so each
// bonus pays at most once per episode.
double shaped_reward(const ShapingRule& rule, const EventSet& events_now,
                     double r_e);

}  // namespace dezlab::auxrewards
