#include "dezlab/gvf/gvf.hpp"

namespace dezlab::gvf {

std::vector<GvfSpec> gvf_suite(EnvKind kind, double gamma_gvf) {
  switch (kind) {
    case EnvKind::two_rooms:
      return {{1, Event::corridor_crossed, gamma_gvf, "corridor"}};
    case EnvKind::subgoal_two_rooms:
      return {{1, Event::corridor_crossed, gamma_gvf, "corridor"},
              {2, Event::red_visited, gamma_gvf, "red_dot"}};
    case EnvKind::door_key:
      return {{1, Event::key_picked, gamma_gvf, "key"},
              {2, Event::door_unlocked, gamma_gvf, "door"}};
  }
  throw std::invalid_argument("unknown env kind");
}

CumulantVector cumulants(const std::vector<GvfSpec>& specs,
                         const EventSet& events_now,
                         const EventSet& fired_so_far) {
  CumulantVector out;
  out.values.reserve(specs.size());
  out.terminal.reserve(specs.size());
  for (const GvfSpec& s : specs) {
    out.values.push_back(events_now.has(s.event) ? 1.0f : 0.0f);
    out.terminal.push_back(fired_so_far.has(s.event) ? 1 : 0);
  }
  return out;
}

}  // namespace dezlab::gvf
