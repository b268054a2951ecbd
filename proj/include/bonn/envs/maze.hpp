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

#pragma once

#include <vector>

#include "bonn/envs/environment.hpp"

namespace bonn::envs {

// Wall bitmap over a width x height grid. Cells with odd coordinates are
// rooms of the lattice; the cells between them are corridor segments.
struct Maze {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> wall;  // row-major, 1 = wall

  bool is_open(Cell c) const {
    return c.row >= 0 && c.col >= 0 && c.row < height && c.col < width &&
           wall[static_cast<std::size_t>(c.row) * width + c.col] == 0;
  }
  std::vector<Cell> open_cells() const;
};

// Perfect maze by iterative recursive backtracking on the odd lattice.
// Requires odd width, height >= 5.
Maze maze_generate(int width, int height, Rng& rng);

// First move of a shortest path from `from` to `goal`; ties prefer
// up < down < left < right. Throws when the goal is unreachable.
std::size_t bfs_optimal_action(const Maze& maze, Cell from, Cell goal);

// Maze regenerated at every reset; agent and goal drawn uniformly over
// distinct open cells. x = the 3x3 neighbourhood as wall flags (row-major,
// own cell included), y = one-hot of the planner's action. Rewards as in
// the rooms world: -1 per step, +20 on the step reaching the goal.
class OracleMaze final : public Environment {
 public:
  static constexpr double kStepReward = -1.0;
  static constexpr double kGoalReward = 20.0;

  OracleMaze(int size, std::size_t step_cap);

  std::string name() const override { return "oracle-maze"; }
  std::size_t num_actions() const override { return kGridActions; }
  std::size_t x_dim() const override { return 9; }
  std::size_t y_dim() const override { return kGridActions; }
  void reset(Rng& rng) override;
  StepResult step(std::size_t action) override;
  DualObservation observe() const override;
  std::vector<double> high_level() const override;
  bool done() const override { return done_; }
  bool goal_reached() const override { return reached_; }
  std::optional<Cell> position() const override { return agent_; }
  std::optional<GridGeometry> geometry() const override;

  const Maze& maze() const { return maze_; }
  Cell agent() const { return agent_; }
  Cell goal() const { return goal_; }

  // Test hook: install a fixed maze and positions.
  void place(Maze maze, Cell agent, Cell goal);

 private:
  int size_;
  std::size_t step_cap_;
  Maze maze_;
  Cell agent_;
  Cell goal_;
  std::size_t steps_ = 0;
  bool done_ = false;
  bool reached_ = false;
  double last_reward_ = 0.0;
};

}  // namespace bonn::envs
