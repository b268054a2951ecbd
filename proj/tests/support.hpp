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

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bonn/diffcore/tape.hpp"
#include "bonn/envs/environment.hpp"
#include "bonn/envs/maze.hpp"
#include "bonn/harness/pareto.hpp"
#include "bonn/policy/policy.hpp"
#include "bonn/random.hpp"

namespace bonn::testing {

using diff::Tape;
using diff::Tensor;
using diff::Var;

// Builds a scalar loss from parameter leaves bound in `params` order.
using LossBuilder = std::function<Var(Tape&, const std::vector<Var>&)>;

struct GradCheck {
  double max_rel_error = 0.0;
  std::size_t entries = 0;
  std::string worst;  // "param[i] analytic=.. numeric=.."
};

// |a - n| / max(|a|, |n|, floor); the floor keeps near-zero entries from
// turning rounding noise into a large ratio.
double relative_error(double analytic, double numeric, double floor = 1e-3);

// Tape gradients vs central differences with the given step.
GradCheck check_gradients(std::vector<Tensor>& params, const LossBuilder& build,
                          double step = 1e-4);

// Random composite network: up to 4 layers of width <= 8 mixing affine
// (tanh/sigmoid), GRU and concat layers, ending in softmax + pick_log_prob.
struct RandomNetwork {
  std::vector<Tensor> params;
  LossBuilder build;
  std::string description;
};
RandomNetwork random_network(Rng& rng);

// Two arms, one step: arm 0 pays 1, arm 1 pays 0. y carries a constant.
class BanditEnv final : public envs::Environment {
 public:
  std::string name() const override { return "bandit"; }
  std::size_t num_actions() const override { return 2; }
  std::size_t x_dim() const override { return 0; }
  std::size_t y_dim() const override { return 1; }
  void reset(Rng&) override { done_ = false; }
  envs::StepResult step(std::size_t action) override;
  envs::DualObservation observe() const override { return {{}, done_, 0.0}; }
  std::vector<double> high_level() const override { return {1.0}; }
  bool done() const override { return done_; }

 private:
  bool done_ = false;
};

// Never terminates on its own; x and y are fixed.
class EndlessEnv final : public envs::Environment {
 public:
  explicit EndlessEnv(std::size_t actions = 3) : actions_(actions) {}
  std::string name() const override { return "endless"; }
  std::size_t num_actions() const override { return actions_; }
  std::size_t x_dim() const override { return 1; }
  std::size_t y_dim() const override { return 2; }
  void reset(Rng&) override { steps_ = 0; }
  envs::StepResult step(std::size_t) override {
    ++steps_;
    return {0.0, false};
  }
  envs::DualObservation observe() const override { return {{0.5}, false, 0.0}; }
  std::vector<double> high_level() const override {
    return {static_cast<double>(steps_ % 3), 1.0};
  }
  bool done() const override { return false; }

 private:
  std::size_t actions_;
  std::size_t steps_ = 0;
};

// Terminates after its first step.
class OneStepEnv final : public envs::Environment {
 public:
  std::string name() const override { return "one-step"; }
  std::size_t num_actions() const override { return 2; }
  std::size_t x_dim() const override { return 0; }
  std::size_t y_dim() const override { return 1; }
  void reset(Rng&) override { done_ = false; }
  envs::StepResult step(std::size_t) override {
    done_ = true;
    return {1.0, true};
  }
  envs::DualObservation observe() const override { return {{}, done_, 0.0}; }
  std::vector<double> high_level() const override { return {0.0}; }
  bool done() const override { return done_; }

 private:
  bool done_ = false;
};

// Policy sized for BanditEnv with identity representations.
policy::PolicyShape bandit_shape();

// Exact first-step action probabilities of a continuous-option policy on
// BanditEnv, mixing the acquire and no-acquire branches by P(sigma).
std::vector<double> bandit_action_probs(policy::PolicyParams& params);

// Connected and acyclic over the open cells.
bool maze_is_perfect(const envs::Maze& m);

// Unit-weight Dijkstra distance between open cells, -1 when unreachable.
int maze_dijkstra(const envs::Maze& m, envs::Cell from, envs::Cell to);

// O(n^2) front: points no other point dominates, first of each duplicate,
// ordered by cost.
std::vector<std::size_t> pareto_brute_force(
    std::span<const harness::ParetoPoint> p);

}  // namespace bonn::testing
