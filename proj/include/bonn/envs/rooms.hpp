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

// k x k rooms of room_size x room_size free cells, separated by one-cell
// walls with a centered door in every shared wall. The full grid, outer
// walls included, is (k * room_size + k + 1) cells wide.
//
// The agent starts in the upper-left free cell; the goal is drawn
// uniformly over the remaining free room cells at every reset. Moving
// towards a door carries the agent through it into the next room in one
// step, so the agent is always inside exactly one room. Bumping into a wall
// keeps the agent in place. Every step costs -1; the step landing on the
// goal pays +20 instead and ends the episode.
//
// Observations cover the current room only:
//   blind: x = {}, y = [pos(2), doors(4), goal flag, goal pos(2)]
//   split: x = [pos(2)], y = [doors(4), goal flag, goal pos(2)]
// Positions are in-room (row, col) scaled to [0, 1]; doors are ordered
// up, down, left, right.
class RoomsWorld final : public Environment {
 public:
  static constexpr double kStepReward = -1.0;
  static constexpr double kGoalReward = 20.0;

  RoomsWorld(int rooms_per_side, int room_size, ObsMode mode,
             std::size_t step_cap);

  std::string name() const override { return "rooms"; }
  std::size_t num_actions() const override { return kGridActions; }
  std::size_t x_dim() const override;
  std::size_t y_dim() const override;
  void reset(Rng& rng) override;
  StepResult step(std::size_t action) override;
  DualObservation observe() const override;
  std::vector<double> high_level() const override;
  bool done() const override { return done_; }
  bool goal_reached() const override { return reached_; }
  std::optional<Cell> position() const override { return agent_; }
  std::optional<GridGeometry> geometry() const override;
  int goal_annotation() const override;

  int rooms_per_side() const { return k_; }
  int room_size() const { return room_size_; }
  int grid_size() const { return grid_; }
  std::size_t door_count() const;
  bool is_wall(Cell c) const;
  bool is_door(Cell c) const;

  Cell agent() const { return agent_; }
  Cell goal() const { return goal_; }
  // Room containing a free room cell, as (room row, room col).
  Cell room_of(Cell c) const;
  // In-room coordinates of a free room cell.
  Cell in_room(Cell c) const;
  // Door presence of the agent's room: up, down, left, right.
  std::vector<double> door_bits() const;

  // Test hooks.
  void place(Cell agent, Cell goal);

 private:
  std::vector<double> position_features() const;
  std::vector<double> room_features() const;

  int k_;
  int room_size_;
  int grid_;
  ObsMode mode_;
  std::size_t step_cap_;
  std::vector<std::uint8_t> wall_;
  std::vector<Cell> free_cells_;
  Cell agent_;
  Cell goal_;
  std::size_t steps_ = 0;
  bool done_ = false;
  bool reached_ = false;
  double last_reward_ = 0.0;
};

}  // namespace bonn::envs
