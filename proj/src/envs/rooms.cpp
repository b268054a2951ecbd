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

#include "bonn/envs/rooms.hpp"

#include <string>

#include "bonn/error.hpp"

namespace bonn::envs {

RoomsWorld::RoomsWorld(int rooms_per_side, int room_size, ObsMode mode,
                       std::size_t step_cap)
    : k_(rooms_per_side),
      room_size_(room_size),
      grid_(rooms_per_side * room_size + rooms_per_side + 1),
      mode_(mode),
      step_cap_(step_cap) {
  if (rooms_per_side < 1) {
    throw ConfigError("rooms: k must be >= 1, got " +
                      std::to_string(rooms_per_side));
  }
  if (room_size < 3 || room_size % 2 == 0) {
    throw ConfigError("rooms: room_size must be odd and >= 3, got " +
                      std::to_string(room_size));
  }
  if (step_cap == 0) throw ConfigError("rooms: step cap must be >= 1");

  const int pitch = room_size_ + 1;
  wall_.assign(static_cast<std::size_t>(grid_) * grid_, 0);
  for (int r = 0; r < grid_; ++r) {
    for (int c = 0; c < grid_; ++c) {
      if (r % pitch == 0 || c % pitch == 0) wall_[r * grid_ + c] = 1;
    }
  }
  const int mid = room_size_ / 2;
  for (int i = 0; i < k_; ++i) {
    for (int j = 0; j + 1 < k_; ++j) {
      // Wall between rooms (i, j) and (i, j + 1), and its transpose.
      wall_[(i * pitch + 1 + mid) * grid_ + (j + 1) * pitch] = 0;
      wall_[((j + 1) * pitch) * grid_ + i * pitch + 1 + mid] = 0;
    }
  }
  for (int r = 0; r < grid_; ++r) {
    for (int c = 0; c < grid_; ++c) {
      const Cell cell{r, c};
      if (!is_wall(cell) && !is_door(cell)) free_cells_.push_back(cell);
    }
  }
  agent_ = {1, 1};
  goal_ = free_cells_.back();
}

std::size_t RoomsWorld::x_dim() const {
  return mode_ == ObsMode::kSplit ? 2 : 0;
}

std::size_t RoomsWorld::y_dim() const {
  return mode_ == ObsMode::kSplit ? 7 : 9;
}

std::size_t RoomsWorld::door_count() const {
  std::size_t n = 0;
  for (int r = 0; r < grid_; ++r) {
    for (int c = 0; c < grid_; ++c) n += is_door({r, c}) ? 1 : 0;
  }
  return n;
}

bool RoomsWorld::is_wall(Cell c) const {
  return c.row < 0 || c.col < 0 || c.row >= grid_ || c.col >= grid_ ||
         wall_[static_cast<std::size_t>(c.row) * grid_ + c.col] != 0;
}

bool RoomsWorld::is_door(Cell c) const {
  const int pitch = room_size_ + 1;
  return !is_wall(c) && (c.row % pitch == 0 || c.col % pitch == 0);
}

Cell RoomsWorld::room_of(Cell c) const {
  const int pitch = room_size_ + 1;
  return {(c.row - 1) / pitch, (c.col - 1) / pitch};
}

Cell RoomsWorld::in_room(Cell c) const {
  const int pitch = room_size_ + 1;
  return {(c.row - 1) % pitch, (c.col - 1) % pitch};
}

void RoomsWorld::reset(Rng& rng) {
  agent_ = {1, 1};
  // free_cells_ is row-major, so the start cell is its first entry.
  goal_ = free_cells_[1 + uniform_index(rng, free_cells_.size() - 1)];
  steps_ = 0;
  done_ = false;
  reached_ = false;
  last_reward_ = 0.0;
}

void RoomsWorld::place(Cell agent, Cell goal) {
  agent_ = agent;
  goal_ = goal;
  steps_ = 0;
  done_ = agent == goal;
  reached_ = done_;
  last_reward_ = 0.0;
}

StepResult RoomsWorld::step(std::size_t action) {
  if (action >= kGridActions) {
    throw ConfigError("rooms: invalid action " + std::to_string(action));
  }
  if (done_) throw Error("rooms: step after episode end");
  Cell target = move(agent_, action);
  if (is_door(target)) target = move(target, action);
  if (!is_wall(target)) agent_ = target;
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

std::vector<double> RoomsWorld::position_features() const {
  const Cell p = in_room(agent_);
  const double scale = 1.0 / (room_size_ - 1);
  return {p.row * scale, p.col * scale};
}

std::vector<double> RoomsWorld::door_bits() const {
  const Cell room = room_of(agent_);
  return {room.row > 0 ? 1.0 : 0.0, room.row < k_ - 1 ? 1.0 : 0.0,
          room.col > 0 ? 1.0 : 0.0, room.col < k_ - 1 ? 1.0 : 0.0};
}

std::vector<double> RoomsWorld::room_features() const {
  std::vector<double> f = door_bits();
  if (room_of(goal_) == room_of(agent_)) {
    const Cell g = in_room(goal_);
    const double scale = 1.0 / (room_size_ - 1);
    f.insert(f.end(), {1.0, g.row * scale, g.col * scale});
  } else {
    f.insert(f.end(), {0.0, 0.0, 0.0});
  }
  return f;
}

DualObservation RoomsWorld::observe() const {
  DualObservation obs;
  if (mode_ == ObsMode::kSplit) obs.x = position_features();
  obs.done = done_;
  obs.reward_prev = last_reward_;
  return obs;
}

std::vector<double> RoomsWorld::high_level() const {
  if (mode_ == ObsMode::kSplit) return room_features();
  std::vector<double> y = position_features();
  const auto rest = room_features();
  y.insert(y.end(), rest.begin(), rest.end());
  return y;
}

std::optional<GridGeometry> RoomsWorld::geometry() const {
  return GridGeometry{grid_, grid_, wall_, goal_};
}

int RoomsWorld::goal_annotation() const {
  if (room_of(goal_) != room_of(agent_)) return -1;
  const Cell g = in_room(goal_);
  return (g.row * 3 / room_size_) * 3 + g.col * 3 / room_size_;
}

}  // namespace bonn::envs
