#pragma once

#include <vector>

#include "dezlab/gridworlds/env.hpp"

namespace dezlab::gvf {

using gridworlds::EnvKind;
using gridworlds::Event;
using gridworlds::EventSet;

// One auxiliary prediction/control task: cumulant +1 on the first firing of
// its event, termination (bootstrap cut) from that step onward.
struct GvfSpec {
  int index = 0;  // 1..M
  Event event = Event::corridor_crossed;
  double gamma = 0.99;
  const char* name = "";
};

// The handcrafted task suite per environment:
//   two_rooms          -> {corridor}            (M = 1)
//   subgoal_two_rooms  -> {corridor, red}       (M = 2)
//   door_key           -> {key, door}           (M = 2)
std::vector<GvfSpec> gvf_suite(EnvKind kind, double gamma_gvf);

struct CumulantVector {
  std::vector<float> values;          // one per GVF, in {0, 1}
  std::vector<std::uint8_t> terminal; // event has fired at or before this step
};

// events_now: events fired on this step; fired_so_far: the episode's
// monotone event set after the step.
CumulantVector cumulants(const std::vector<GvfSpec>& specs,
                         const EventSet& events_now,
                         const EventSet& fired_so_far);

}  // namespace dezlab::gvf
