#include "dezlab/gridworlds/env.hpp"

#include <queue>
#include <stdexcept>

namespace dezlab::gridworlds {

std::string env_kind_name(EnvKind kind) {
  switch (kind) {
    case EnvKind::two_rooms: return "two_rooms";
    case EnvKind::subgoal_two_rooms: return "subgoal_two_rooms";
    case EnvKind::door_key: return "door_key";
  }
  throw std::invalid_argument("unknown env kind");
}

EnvKind env_kind_from_name(const std::string& name) {
  if (name == "two_rooms") return EnvKind::two_rooms;
  if (name == "subgoal_two_rooms") return EnvKind::subgoal_two_rooms;
  if (name == "door_key") return EnvKind::door_key;
  throw std::invalid_argument("unknown env kind: " + name);
}

const char* event_name(Event e) {
  switch (e) {
    case Event::corridor_crossed: return "corridor_crossed";
    case Event::red_visited: return "red_visited";
    case Event::key_picked: return "key_picked";
    case Event::door_unlocked: return "door_unlocked";
    case Event::goal_reached: return "goal_reached";
  }
  return "?";
}

Cell heading_delta(int heading) {
  switch (heading) {
    case headings::kEast: return {1, 0};
    case headings::kSouth: return {0, -1};
    case headings::kWest: return {-1, 0};
    case headings::kNorth: return {0, 1};
  }
  throw std::invalid_argument("bad heading");
}

double terminal_reward(EnvKind kind, int t, int t_max, bool visited_red) {
  const double frac = static_cast<double>(t) / static_cast<double>(t_max);
  switch (kind) {
    case EnvKind::two_rooms:
      return 1.0 - 0.9 * frac;
    case EnvKind::subgoal_two_rooms:
      return visited_red ? 1.0 - 0.75 * frac : 0.2 - 0.1 * frac;
    case EnvKind::door_key:
      return 1.0 - 0.9 * frac;
  }
  throw std::invalid_argument("unknown env kind");
}

GridEnv::GridEnv(EnvKind kind, int grid_dim, std::uint64_t seed)
    : kind_(kind), dim_(grid_dim), rng_(seed) {
  if (grid_dim < 5)
    throw std::invalid_argument(
        "grid too small to host all special cells (dim >= 5 required)");
  build_layout();
  reset();
}

int GridEnv::num_actions() const {
  return kind_ == EnvKind::door_key ? 6 : 4;
}

std::vector<int> GridEnv::observation_shape() const {
  switch (kind_) {
    case EnvKind::two_rooms: return {2};
    case EnvKind::subgoal_two_rooms: return {3};
    case EnvKind::door_key: return {3, dim_, dim_};
  }
  throw std::invalid_argument("unknown env kind");
}

void GridEnv::build_layout() {
  GridLayout l;
  l.kind = kind_;
  l.width = l.height = dim_;
  l.walls.assign(static_cast<std::size_t>(dim_) * dim_, 0);
  auto set_wall = [&](int x, int y) {
    l.walls[static_cast<std::size_t>(y) * dim_ + x] = 1;
  };

  if (kind_ == EnvKind::door_key) {
    // MiniGrid-style board: boundary walls, a random dividing wall with a
    // locked door, a key and the agent placed randomly in the left room.
    for (int x = 0; x < dim_; ++x) {
      set_wall(x, 0);
      set_wall(x, dim_ - 1);
    }
    for (int y = 0; y < dim_; ++y) {
      set_wall(0, y);
      set_wall(dim_ - 1, y);
    }
    const int wall_col = rng_.uniform_int(2, dim_ - 3);
    for (int y = 1; y < dim_ - 1; ++y) set_wall(wall_col, y);
    const int door_row = rng_.uniform_int(1, dim_ - 2);
    l.walls[static_cast<std::size_t>(door_row) * dim_ + wall_col] = 0;
    l.wall_column = wall_col;
    l.corridor = {wall_col, door_row};
    l.door = l.corridor;

    std::vector<Cell> left;
    for (int y = 1; y < dim_ - 1; ++y)
      for (int x = 1; x < wall_col; ++x) left.push_back({x, y});
    const int agent_idx = rng_.uniform_int(0, static_cast<int>(left.size()) - 1);
    l.spawn = left[agent_idx];
    l.spawn_heading = rng_.uniform_int(0, 3);
    left.erase(left.begin() + agent_idx);
    l.key = left[rng_.uniform_int(0, static_cast<int>(left.size()) - 1)];
    l.goal = {dim_ - 2, dim_ - 2};
  } else {
    // Fixed Two Rooms board: vertical wall at the middle column with a
    // one-cell corridor at the middle row; red dot at the left room center.
    const int wall_col = dim_ / 2;
    for (int y = 0; y < dim_; ++y) set_wall(wall_col, y);
    const Cell corridor{wall_col, dim_ / 2};
    l.walls[static_cast<std::size_t>(corridor.y) * dim_ + corridor.x] = 0;
    l.wall_column = wall_col;
    l.corridor = corridor;
    l.spawn = {0, 0};
    l.goal = {dim_ - 1, dim_ - 1};
    if (kind_ == EnvKind::subgoal_two_rooms)
      l.subgoal = Cell{(wall_col - 1) / 2, (dim_ - 1) / 2};
  }

  layout_ = std::move(l);
  if (optimal_steps(layout_) < 1)
    throw std::runtime_error("degenerate layout: spawn on goal");
}

Tensor GridEnv::reset() {
  if (kind_ == EnvKind::door_key) build_layout();
  state_ = EnvState{};
  state_.pos = layout_.spawn;
  state_.heading = layout_.spawn_heading;
  state_.t_max = kind_ == EnvKind::door_key ? 10 * dim_ * dim_ : 10 * dim_;
  key_on_grid_ = layout_.key.has_value();
  return observation();
}

bool GridEnv::passable(Cell c) const {
  if (!layout_.in_bounds(c)) return false;
  if (layout_.wall(c)) return false;
  if (layout_.door && c == *layout_.door && !state_.door_open) return false;
  if (key_on_grid_ && layout_.key && c == *layout_.key) return false;
  return true;
}

StepResult GridEnv::step(int action) {
  if (state_.terminal)
    throw std::logic_error("step() called after the episode ended");
  if (action < 0 || action >= num_actions())
    throw std::invalid_argument("action out of range");

  state_.t += 1;
  StepResult res;
  auto fire = [&](Event e) {
    if (!state_.fired.has(e)) {
      state_.fired.set(e);
      res.events.set(e);
    }
  };

  bool reached_goal = false;
  if (kind_ == EnvKind::door_key) {
    using namespace doorkey_actions;
    switch (action) {
      case kTurnLeft:
        state_.heading = (state_.heading + 3) % 4;
        break;
      case kTurnRight:
        state_.heading = (state_.heading + 1) % 4;
        break;
      case kForward: {
        const Cell d = heading_delta(state_.heading);
        const Cell next{state_.pos.x + d.x, state_.pos.y + d.y};
        if (passable(next)) {
          state_.pos = next;
          if (next == layout_.goal) reached_goal = true;
          if (!state_.fired.has(Event::corridor_crossed) &&
              next.x > layout_.wall_column)
            fire(Event::corridor_crossed);
        }
        break;
      }
      case kPickup: {
        const Cell d = heading_delta(state_.heading);
        const Cell facing{state_.pos.x + d.x, state_.pos.y + d.y};
        if (key_on_grid_ && layout_.key && facing == *layout_.key) {
          key_on_grid_ = false;
          state_.has_key = true;
          fire(Event::key_picked);
        }
        break;
      }
      case kToggle: {
        const Cell d = heading_delta(state_.heading);
        const Cell facing{state_.pos.x + d.x, state_.pos.y + d.y};
        if (layout_.door && facing == *layout_.door) {
          if (state_.door_locked) {
            if (state_.has_key) {
              state_.door_locked = false;
              state_.door_open = true;
              fire(Event::door_unlocked);
            }
          } else {
            state_.door_open = !state_.door_open;
          }
        }
        break;
      }
      case kDone:
        break;
    }
  } else {
    using namespace move_actions;
    Cell d{0, 0};
    switch (action) {
      case kUp: d = {0, 1}; break;
      case kDown: d = {0, -1}; break;
      case kLeft: d = {-1, 0}; break;
      case kRight: d = {1, 0}; break;
    }
    const Cell next{state_.pos.x + d.x, state_.pos.y + d.y};
    if (layout_.in_bounds(next) && !layout_.wall(next)) {
      state_.pos = next;
      if (!state_.fired.has(Event::corridor_crossed) &&
          next.x > layout_.wall_column)
        fire(Event::corridor_crossed);
      if (kind_ == EnvKind::subgoal_two_rooms && layout_.subgoal &&
          next == *layout_.subgoal && !state_.visited_red) {
        state_.visited_red = true;
        fire(Event::red_visited);
      }
      if (next == layout_.goal) reached_goal = true;
    }
  }

  if (reached_goal) {
    fire(Event::goal_reached);
    state_.terminal = true;
    res.reward =
        terminal_reward(kind_, state_.t, state_.t_max, state_.visited_red);
  } else if (state_.t >= state_.t_max) {
    state_.terminal = true;
    res.reward = 0.0;
  }

  res.terminal = state_.terminal;
  res.obs = observation();
  return res;
}

Tensor GridEnv::observation() const {
  if (kind_ == EnvKind::door_key) {
    Tensor obs({3, dim_, dim_});
    const auto at = [&](int c, Cell p) -> float& {
      return obs.data[static_cast<std::size_t>(c) * dim_ * dim_ +
                      static_cast<std::size_t>(p.y) * dim_ + p.x];
    };
    // channel 0: object ids scaled into [0,1]
    for (int y = 0; y < dim_; ++y)
      for (int x = 0; x < dim_; ++x)
        if (layout_.wall({x, y})) at(0, {x, y}) = 1.0f / 5.0f;
    if (layout_.door) at(0, *layout_.door) = 2.0f / 5.0f;
    if (key_on_grid_ && layout_.key) at(0, *layout_.key) = 3.0f / 5.0f;
    at(0, layout_.goal) = 4.0f / 5.0f;
    at(0, state_.pos) = 1.0f;
    // channel 1: door state (locked 1, closed 0.5, open 0)
    if (layout_.door)
      at(1, *layout_.door) =
          state_.door_locked ? 1.0f : (state_.door_open ? 0.0f : 0.5f);
    // channel 2: agent heading plane
    at(2, state_.pos) = static_cast<float>(state_.heading + 1) / 4.0f;
    return obs;
  }

  const float denom = static_cast<float>(dim_ - 1);
  if (kind_ == EnvKind::two_rooms) {
    Tensor obs({2});
    obs.data[0] = static_cast<float>(state_.pos.x) / denom;
    obs.data[1] = static_cast<float>(state_.pos.y) / denom;
    return obs;
  }
  Tensor obs({3});
  obs.data[0] = static_cast<float>(state_.pos.x) / denom;
  obs.data[1] = static_cast<float>(state_.pos.y) / denom;
  obs.data[2] = state_.visited_red ? 1.0f : 0.0f;
  return obs;
}

std::uint64_t GridEnv::state_key() const {
  std::uint64_t k = 0;
  k |= static_cast<std::uint64_t>(state_.pos.x & 0xff);
  k |= static_cast<std::uint64_t>(state_.pos.y & 0xff) << 8;
  k |= static_cast<std::uint64_t>(state_.heading & 0x3) << 16;
  k |= static_cast<std::uint64_t>(state_.visited_red) << 18;
  k |= static_cast<std::uint64_t>(state_.has_key) << 19;
  k |= static_cast<std::uint64_t>(state_.door_locked) << 20;
  k |= static_cast<std::uint64_t>(state_.door_open) << 21;
  if (kind_ == EnvKind::door_key) {
    // A DoorKey episode's layout is part of its state.
    k |= static_cast<std::uint64_t>(layout_.wall_column & 0xff) << 22;
    k |= static_cast<std::uint64_t>(layout_.corridor.y & 0xff) << 30;
    k |= static_cast<std::uint64_t>(layout_.key->x & 0xff) << 38;
    k |= static_cast<std::uint64_t>(layout_.key->y & 0xff) << 46;
  }
  return k;
}

std::string GridEnv::render() const {
  std::string out;
  for (int y = dim_ - 1; y >= 0; --y) {
    for (int x = 0; x < dim_; ++x) {
      const Cell c{x, y};
      char g = '.';
      if (layout_.wall(c)) g = '#';
      if (layout_.door && c == *layout_.door)
        g = state_.door_locked ? 'D' : (state_.door_open ? '_' : 'd');
      if (key_on_grid_ && layout_.key && c == *layout_.key) g = 'K';
      if (layout_.subgoal && c == *layout_.subgoal && !state_.visited_red)
        g = 'R';
      if (c == layout_.goal) g = 'G';
      if (c == state_.pos) {
        constexpr char arrows[4] = {'>', 'v', '<', '^'};
        g = kind_ == EnvKind::door_key ? arrows[state_.heading] : 'A';
      }
      out += g;
    }
    out += '\n';
  }
  return out;
}

namespace {

// Plain 4-neighbour BFS between cells; doors/keys ignored (Two Rooms family).
int bfs_cells(const GridLayout& l, Cell from, Cell to) {
  std::vector<int> dist(static_cast<std::size_t>(l.width) * l.height, -1);
  const auto idx = [&](Cell c) {
    return static_cast<std::size_t>(c.y) * l.width + c.x;
  };
  std::queue<Cell> q;
  dist[idx(from)] = 0;
  q.push(from);
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop();
    if (c == to) return dist[idx(c)];
    const Cell nbrs[4] = {{c.x + 1, c.y}, {c.x - 1, c.y},
                          {c.x, c.y + 1}, {c.x, c.y - 1}};
    for (const Cell n : nbrs) {
      if (!l.in_bounds(n) || l.wall(n)) continue;
      if (dist[idx(n)] >= 0) continue;
      dist[idx(n)] = dist[idx(c)] + 1;
      q.push(n);
    }
  }
  throw std::runtime_error("BFS: goal unreachable");
}

// BFS over (pos, heading, has_key, door_state) with the six DoorKey actions.
int bfs_doorkey(const GridLayout& l) {
  const int w = l.width, h = l.height;
  // door_state: 0 locked, 1 closed (unlocked), 2 open
  const auto idx = [&](Cell c, int heading, int key, int door) {
    return (((static_cast<std::size_t>(c.y) * w + c.x) * 4 + heading) * 2 +
            key) * 3 + door;
  };
  std::vector<int> dist(static_cast<std::size_t>(w) * h * 4 * 2 * 3, -1);

  struct Node {
    Cell pos;
    int heading, key, door;
  };
  std::queue<Node> q;
  const Node start{l.spawn, l.spawn_heading, 0, 0};
  dist[idx(start.pos, start.heading, start.key, start.door)] = 0;
  q.push(start);

  while (!q.empty()) {
    const Node n = q.front();
    q.pop();
    const int d = dist[idx(n.pos, n.heading, n.key, n.door)];
    if (n.pos == l.goal) return d;

    auto visit = [&](Node m) {
      int& slot = dist[idx(m.pos, m.heading, m.key, m.door)];
      if (slot < 0) {
        slot = d + 1;
        q.push(m);
      }
    };

    Node t = n;
    t.heading = (n.heading + 3) % 4;
    visit(t);
    t = n;
    t.heading = (n.heading + 1) % 4;
    visit(t);

    const Cell delta = heading_delta(n.heading);
    const Cell facing{n.pos.x + delta.x, n.pos.y + delta.y};
    const bool key_on_grid = n.key == 0 && l.key.has_value();

    if (l.in_bounds(facing) && !l.wall(facing) &&
        !(l.door && facing == *l.door && n.door != 2) &&
        !(key_on_grid && l.key && facing == *l.key)) {
      t = n;
      t.pos = facing;
      visit(t);
    }
    if (key_on_grid && l.key && facing == *l.key) {
      t = n;
      t.key = 1;
      visit(t);
    }
    if (l.door && facing == *l.door) {
      if (n.door == 0 && n.key == 1) {
        t = n;
        t.door = 2;
        visit(t);
      } else if (n.door == 1) {
        t = n;
        t.door = 2;
        visit(t);
      } else if (n.door == 2) {
        t = n;
        t.door = 1;
        visit(t);
      }
    }
  }
  throw std::runtime_error("BFS: DoorKey goal unreachable");
}

}  // namespace

int optimal_steps(const GridLayout& layout) {
  switch (layout.kind) {
    case EnvKind::two_rooms:
      return bfs_cells(layout, layout.spawn, layout.goal);
    case EnvKind::subgoal_two_rooms:
      return bfs_cells(layout, layout.spawn, *layout.subgoal) +
             bfs_cells(layout, *layout.subgoal, layout.goal);
    case EnvKind::door_key:
      return bfs_doorkey(layout);
  }
  throw std::invalid_argument("unknown env kind");
}

}  // namespace dezlab::gridworlds
