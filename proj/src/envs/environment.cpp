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

#include "bonn/envs/environment.hpp"

#include <string>

#include "bonn/envs/cartpole.hpp"
#include "bonn/envs/maze.hpp"
#include "bonn/envs/rooms.hpp"
#include "bonn/error.hpp"

namespace bonn::envs {

Cell move(Cell c, std::size_t action) {
  switch (action) {
    case kUp: return {c.row - 1, c.col};
    case kDown: return {c.row + 1, c.col};
    case kLeft: return {c.row, c.col - 1};
    case kRight: return {c.row, c.col + 1};
    default:
      throw ConfigError("invalid grid action " + std::to_string(action));
  }
}

std::size_t apply_stochasticity(std::size_t action, std::size_t num_actions,
                                double epsilon, Rng& rng) {
  if (epsilon <= 0.0) return action;
  if (uniform01(rng) < epsilon) return uniform_index(rng, num_actions);
  return action;
}

StochasticEnv::StochasticEnv(std::unique_ptr<Environment> inner,
                             double epsilon)
    : inner_(std::move(inner)), epsilon_(epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in [0, 1], got " +
                      std::to_string(epsilon));
  }
}

void StochasticEnv::reset(Rng& rng) {
  inner_->reset(rng);
  rng_.seed(rng());
}

StepResult StochasticEnv::step(std::size_t action) {
  if (action >= inner_->num_actions()) {
    throw ConfigError("invalid action " + std::to_string(action));
  }
  return inner_->step(
      apply_stochasticity(action, inner_->num_actions(), epsilon_, rng_));
}

std::string_view to_string(EnvKind kind) {
  switch (kind) {
    case EnvKind::kCartPole: return "cartpole";
    case EnvKind::kRooms: return "rooms";
    case EnvKind::kOracleMaze: return "oracle-maze";
  }
  return "?";
}

std::string_view to_string(ObsMode mode) {
  return mode == ObsMode::kBlind ? "blind" : "split";
}

EnvKind parse_env_kind(std::string_view name) {
  if (name == "cartpole") return EnvKind::kCartPole;
  if (name == "rooms") return EnvKind::kRooms;
  if (name == "oracle-maze" || name == "maze") return EnvKind::kOracleMaze;
  throw ConfigError("unknown environment '" + std::string(name) + "'");
}

ObsMode parse_obs_mode(std::string_view name) {
  if (name == "blind") return ObsMode::kBlind;
  if (name == "split") return ObsMode::kSplit;
  throw ConfigError("unknown observation mode '" + std::string(name) + "'");
}

std::unique_ptr<Environment> make_env(const EnvSpec& spec) {
  std::unique_ptr<Environment> env;
  switch (spec.kind) {
    case EnvKind::kCartPole:
      env = std::make_unique<CartPole>(spec.step_cap ? spec.step_cap
                                                     : CartPole::kDefaultCap);
      break;
    case EnvKind::kRooms: {
      const std::size_t cap =
          spec.step_cap ? spec.step_cap
                        : (spec.rooms_per_side <= 2 ? 100 : 200);
      env = std::make_unique<RoomsWorld>(spec.rooms_per_side, spec.room_size,
                                         spec.obs_mode, cap);
      break;
    }
    case EnvKind::kOracleMaze:
      env = std::make_unique<OracleMaze>(spec.maze_size,
                                         spec.step_cap ? spec.step_cap : 200);
      break;
  }
  return std::make_unique<StochasticEnv>(std::move(env), spec.epsilon);
}

}  // namespace bonn::envs
