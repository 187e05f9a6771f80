#include "dezlab/auxrewards/auxrewards.hpp"

#include <cmath>
#include <stdexcept>

namespace dezlab::auxrewards {

double cir_reward(StateCounter& counter, std::uint64_t state_key, double r_e,
                  double eta) {
  if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
  const double n = static_cast<double>(counter.visit(state_key));
  return r_e + eta / std::sqrt(n);
}

double shaped_reward(const ShapingRule& rule, const EventSet& events_now,
                     double r_e) {
  double r = r_e;
  for (Event e : rule.events)
    if (events_now.has(e)) r += rule.bonus;
  return r;
}

}  // namespace dezlab::auxrewards
