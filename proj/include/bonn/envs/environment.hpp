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

#include <compare>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bonn/random.hpp"

namespace bonn::envs {

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

// Grid actions shared by the rooms and maze environments.
enum GridAction : std::size_t { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };
inline constexpr std::size_t kGridActions = 4;

Cell move(Cell c, std::size_t action);

// What the agent receives every step. The high-level part y is fetched on
// demand through Environment::high_level().
//
// `x` holds only the environment's low-level features; the agent appends
// the one-hot encoding of its previous action itself.
struct DualObservation {
  std::vector<double> x;
  bool done = false;
  double reward_prev = 0.0;
};

struct StepResult {
  double reward = 0.0;
  bool done = false;
};

// Static wall layout of a grid world, for rendering.
struct GridGeometry {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> wall;  // row-major, 1 = wall
  std::optional<Cell> goal;

  bool is_wall(Cell c) const {
    return c.row < 0 || c.col < 0 || c.row >= rows || c.col >= cols ||
           wall[static_cast<std::size_t>(c.row) * cols + c.col] != 0;
  }
};

class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string name() const = 0;
  virtual std::size_t num_actions() const = 0;
  virtual std::size_t x_dim() const = 0;
  virtual std::size_t y_dim() const = 0;

  virtual void reset(Rng& rng) = 0;
  // Throws ConfigError for an action outside [0, num_actions()) and Error
  // when the episode is already over.
  virtual StepResult step(std::size_t action) = 0;
  virtual DualObservation observe() const = 0;
  // Pure: repeated calls within one step return identical vectors.
  virtual std::vector<double> high_level() const = 0;

  virtual bool done() const = 0;
  virtual bool goal_reached() const { return false; }
  // Agent grid cell, for grid worlds.
  virtual std::optional<Cell> position() const { return std::nullopt; }
  virtual std::optional<GridGeometry> geometry() const { return std::nullopt; }
  // Label used to color option latents (-1 when not applicable).
  virtual int goal_annotation() const { return -1; }
};

// With probability epsilon the action is replaced by one drawn uniformly
// over the action set (possibly the same one).
std::size_t apply_stochasticity(std::size_t action, std::size_t num_actions,
                                double epsilon, Rng& rng);

// Decorator applying apply_stochasticity to every step. Draws come from a
// private stream seeded at reset, after the wrapped env has reset, so the
// wrapped env sees exactly the draws it would see unwrapped.
class StochasticEnv final : public Environment {
 public:
  StochasticEnv(std::unique_ptr<Environment> inner, double epsilon);

  std::string name() const override { return inner_->name(); }
  std::size_t num_actions() const override { return inner_->num_actions(); }
  std::size_t x_dim() const override { return inner_->x_dim(); }
  std::size_t y_dim() const override { return inner_->y_dim(); }
  void reset(Rng& rng) override;
  StepResult step(std::size_t action) override;
  DualObservation observe() const override { return inner_->observe(); }
  std::vector<double> high_level() const override {
    return inner_->high_level();
  }
  bool done() const override { return inner_->done(); }
  bool goal_reached() const override { return inner_->goal_reached(); }
  std::optional<Cell> position() const override { return inner_->position(); }
  std::optional<GridGeometry> geometry() const override {
    return inner_->geometry();
  }
  int goal_annotation() const override { return inner_->goal_annotation(); }

  double epsilon() const { return epsilon_; }

 private:
  std::unique_ptr<Environment> inner_;
  double epsilon_;
  Rng rng_;
};

enum class EnvKind { kCartPole, kRooms, kOracleMaze };
enum class ObsMode { kBlind, kSplit };

std::string_view to_string(EnvKind kind);
std::string_view to_string(ObsMode mode);
EnvKind parse_env_kind(std::string_view name);
ObsMode parse_obs_mode(std::string_view name);

struct EnvSpec {
  EnvKind kind = EnvKind::kCartPole;
  ObsMode obs_mode = ObsMode::kBlind;
  int rooms_per_side = 2;
  int room_size = 5;
  int maze_size = 9;
  double epsilon = 0.0;
  // 0 selects the environment default.
  std::size_t step_cap = 0;
};

std::unique_ptr<Environment> make_env(const EnvSpec& spec);

}  // namespace bonn::envs
