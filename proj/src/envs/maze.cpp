// Copyright 2026 The BONN Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bonn/envs/maze.hpp"

#include <deque>
#include <string>

#include "bonn/error.hpp"

namespace bonn::envs {

std::vector<Cell> Maze::open_cells() const {
  std::vector<Cell> cells;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (is_open({r, c})) cells.push_back({r, c});
    }
  }
  return cells;
}

Maze maze_generate(int width, int height, Rng& rng) {
  if (width < 5 || height < 5 || width % 2 == 0 || height % 2 == 0) {
    throw ConfigError("maze dimensions must be odd and >= 5, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  }
  Maze maze{width, height,
            std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height, 1)};
  auto open = [&](Cell c) { maze.wall[c.row * width + c.col] = 0; };

  const int lattice_rows = (height - 1) / 2;
  const int lattice_cols = (width - 1) / 2;
  std::vector<std::uint8_t> visited(
      static_cast<std::size_t>(lattice_rows) * lattice_cols, 0);
  auto lattice_index = [&](Cell c) {
    return ((c.row - 1) / 2) * lattice_cols + (c.col - 1) / 2;
  };

  const int start = static_cast<int>(
      uniform_index(rng, static_cast<std::size_t>(lattice_rows) * lattice_cols));
  Cell first{1 + 2 * (start / lattice_cols), 1 + 2 * (start % lattice_cols)};
  std::vector<Cell> stack{first};
  visited[lattice_index(first)] = 1;
  open(first);

  std::vector<std::size_t> candidates;
  while (!stack.empty()) {
    const Cell current = stack.back();
    candidates.clear();
    for (std::size_t a = 0; a < kGridActions; ++a) {
      const Cell next = move(move(current, a), a);
      if (next.row > 0 && next.col > 0 && next.row < height - 1 &&
          next.col < width - 1 && !visited[lattice_index(next)]) {
        candidates.push_back(a);
      }
    }
    if (candidates.empty()) {
      stack.pop_back();
      continue;
    }
    const std::size_t a = candidates[uniform_index(rng, candidates.size())];
    const Cell between = move(current, a);
    const Cell next = move(between, a);
    open(between);
    open(next);
    visited[lattice_index(next)] = 1;
    stack.push_back(next);
  }
  return maze;
}

std::size_t bfs_optimal_action(const Maze& maze, Cell from, Cell goal) {
  if (!maze.is_open(from) || !maze.is_open(goal)) {
    throw ConfigError("bfs_optimal_action: endpoints must be open cells");
  }
  if (from == goal) {
    throw ConfigError("bfs_optimal_action: already at the goal");
  }
  const auto idx = [&](Cell c) {
    return static_cast<std::size_t>(c.row) * maze.width + c.col;
  };
  std::vector<int> dist(maze.wall.size(), -1);
  std::deque<Cell> queue{goal};
  dist[idx(goal)] = 0;
  while (!queue.empty()) {
    const Cell c = queue.front();
    queue.pop_front();
    if (c == from) break;
    for (std::size_t a = 0; a < kGridActions; ++a) {
      const Cell n = move(c, a);
      if (maze.is_open(n) && dist[idx(n)] < 0) {
        dist[idx(n)] = dist[idx(c)] + 1;
        queue.push_back(n);
      }
    }
  }
  if (dist[idx(from)] < 0) throw Error("bfs_optimal_action: goal unreachable");
  for (std::size_t a = 0; a < kGridActions; ++a) {
    const Cell n = move(from, a);
    if (maze.is_open(n) && dist[idx(n)] >= 0 &&
        dist[idx(n)] == dist[idx(from)] - 1) {
      return a;
    }
  }
  throw Error("bfs_optimal_action: no descending neighbour");
}

OracleMaze::OracleMaze(int size, std::size_t step_cap)
    : size_(size), step_cap_(step_cap) {
  if (size < 5 || size % 2 == 0) {
    throw ConfigError("oracle maze size must be odd and >= 5, got " +
                      std::to_string(size));
  }
  if (step_cap == 0) throw ConfigError("oracle maze: step cap must be >= 1");
}

void OracleMaze::reset(Rng& rng) {
  maze_ = maze_generate(size_, size_, rng);
  const auto cells = maze_.open_cells();
  const std::size_t a = uniform_index(rng, cells.size());
  std::size_t g = uniform_index(rng, cells.size() - 1);
  if (g >= a) ++g;
  agent_ = cells[a];
  goal_ = cells[g];
  steps_ = 0;
  done_ = false;
  reached_ = false;
  last_reward_ = 0.0;
}

void OracleMaze::place(Maze maze, Cell agent, Cell goal) {
  maze_ = std::move(maze);
  agent_ = agent;
  goal_ = goal;
  steps_ = 0;
  done_ = agent == goal;
  reached_ = done_;
  last_reward_ = 0.0;
}

StepResult OracleMaze::step(std::size_t action) {
  if (action >= kGridActions) {
    throw ConfigError("oracle maze: invalid action " + std::to_string(action));
  }
  if (done_) throw Error("oracle maze: step after episode end");
  const Cell target = move(agent_, action);
  if (maze_.is_open(target)) agent_ = target;
  ++steps_;
  double reward = kStepReward;
  if (agent_ == goal_) {
    reward = kGoalReward;
    reached_ = true;
    done_ = true;
  } else if (steps_ >= step_cap_) {
    done_ = true;
  }
  last_reward_ = reward;
  return {reward, done_};
}

DualObservation OracleMaze::observe() const {
  DualObservation obs;
  obs.x.reserve(9);
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      obs.x.push_back(maze_.is_open({agent_.row + dr, agent_.col + dc}) ? 0.0
                                                                         : 1.0);
    }
  }
  obs.done = done_;
  obs.reward_prev = last_reward_;
  return obs;
}

std::vector<double> OracleMaze::high_level() const {
  std::vector<double> y(kGridActions, 0.0);
  if (agent_ != goal_) y[bfs_optimal_action(maze_, agent_, goal_)] = 1.0;
  return y;
}

std::optional<GridGeometry> OracleMaze::geometry() const {
  return GridGeometry{maze_.height, maze_.width, maze_.wall, goal_};
}

}  // namespace bonn::envs
