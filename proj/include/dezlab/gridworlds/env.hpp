#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dezlab/numkit/rng.hpp"
#include "dezlab/numkit/tensor.hpp"

namespace dezlab::gridworlds {

using numkit::Tensor;

enum class EnvKind { two_rooms, subgoal_two_rooms, door_key };

std::string env_kind_name(EnvKind kind);
EnvKind env_kind_from_name(const std::string& name);

struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
};

inline int manhattan(Cell a, Cell b) {
  return std::abs(a.x - b.x) + std::abs(a.y - b.y);
}

// Two Rooms family actions. (0,0) is the bottom-left corner and y grows up.
namespace move_actions {
enum : int { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
}

// DoorKey actions. MiniGrid's set minus "drop"; done is a no-op.
namespace doorkey_actions {
enum : int {
  kTurnLeft = 0,
  kTurnRight = 1,
  kForward = 2,
  kPickup = 3,
  kToggle = 4,
  kDone = 5
};
}

// Headings: 0=east, 1=south, 2=west, 3=north (turn-right rotates clockwise).
namespace headings {
enum : int { kEast = 0, kSouth = 1, kWest = 2, kNorth = 3 };
}
Cell heading_delta(int heading);

enum class Event : int {
  corridor_crossed = 0,
  red_visited = 1,
  key_picked = 2,
  door_unlocked = 3,
  goal_reached = 4
};
constexpr int kEventCount = 5;
const char* event_name(Event e);

struct EventSet {
  std::array<bool, kEventCount> fired{};
  bool has(Event e) const { return fired[static_cast<int>(e)]; }
  void set(Event e) { fired[static_cast<int>(e)] = true; }
  bool any() const {
    for (bool b : fired)
      if (b) return true;
    return false;
  }
};

struct GridLayout {
  EnvKind kind = EnvKind::two_rooms;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> walls;  // row-major [y][x]
  int wall_column = -1;             // dividing wall
  Cell corridor;                    // opening in the dividing wall
  Cell spawn;
  Cell goal;
  std::optional<Cell> subgoal;  // red dot
  std::optional<Cell> key;
  std::optional<Cell> door;
  int spawn_heading = headings::kEast;

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.x < width && c.y >= 0 && c.y < height;
  }
  bool wall(Cell c) const {
    return walls[static_cast<std::size_t>(c.y) * width + c.x] != 0;
  }
};

struct EnvState {
  Cell pos;
  int heading = headings::kEast;  // DoorKey only
  bool visited_red = false;       // SubGoal only
  bool has_key = false;           // DoorKey only
  bool door_locked = true;        // DoorKey only
  bool door_open = false;         // DoorKey only
  int t = 0;
  int t_max = 0;
  bool terminal = false;
  EventSet fired;  // events so far this episode; monotone
};

struct StepResult {
  Tensor obs;
  double reward = 0.0;
  bool terminal = false;
  EventSet events;  // events fired on this step only
};

// Closed-form terminal rewards; exposed so the formulas are testable at any
// (t, t_max) without driving an episode.
double terminal_reward(EnvKind kind, int t, int t_max, bool visited_red);

class GridEnv {
 public:
  // Two Rooms family layouts are deterministic; DoorKey draws a fresh
  // seeded-random layout on every reset(). grid_dim must be >= 5.
  GridEnv(EnvKind kind, int grid_dim, std::uint64_t seed);

  Tensor reset();
  // Throws std::logic_error when called after the episode ended.
  StepResult step(int action);

  const GridLayout& layout() const { return layout_; }
  const EnvState& state() const { return state_; }
  EnvKind kind() const { return kind_; }
  int grid_dim() const { return dim_; }
  int num_actions() const;
  std::vector<int> observation_shape() const;
  Tensor observation() const;

  // Packed discrete state (position, heading and flags, plus the layout
  // signature for DoorKey where the layout itself is part of the state).
  std::uint64_t state_key() const;

  std::string render() const;

 private:
  void build_layout();
  bool passable(Cell c) const;

  EnvKind kind_;
  int dim_;
  numkit::Mt64Rng rng_;
  GridLayout layout_;
  EnvState state_;
  bool key_on_grid_ = false;
};

// Exact minimal step count spawn->goal (for SubGoal: spawn->red->goal; for
// DoorKey: over the full (pos, heading, key, door) graph). Throws
// std::runtime_error when the goal is unreachable.
int optimal_steps(const GridLayout& layout);

}  // namespace dezlab::gridworlds
