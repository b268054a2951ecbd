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

#include <array>

#include "bonn/envs/environment.hpp"

namespace bonn::envs {

// Classic cart-pole with Euler integration and the usual constants
// (cart 1.0 kg, pole 0.1 kg, half-length 0.5 m, force 10 N, tau 0.02 s).
// Actions: 0 pushes left, 1 pushes right. Reward +1 for every step,
// including the failing one.
struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;
  double theta_dot = 0.0;
  std::size_t steps = 0;
};

class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kTau = 0.02;
  static constexpr double kXLimit = 2.4;
  static constexpr double kThetaLimit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
  static constexpr std::size_t kDefaultCap = 200;

  explicit CartPole(std::size_t step_cap = kDefaultCap);

  std::string name() const override { return "cartpole"; }
  std::size_t num_actions() const override { return 2; }
  std::size_t x_dim() const override { return 0; }
  std::size_t y_dim() const override { return 4; }
  void reset(Rng& rng) override;
  StepResult step(std::size_t action) override;
  DualObservation observe() const override;
  std::vector<double> high_level() const override;
  bool done() const override { return done_; }

  const CartPoleState& state() const { return state_; }
  void set_state(const CartPoleState& s);

  // One Euler step of the dynamics, independent of termination.
  static CartPoleState integrate(const CartPoleState& s, double force);

 private:
  CartPoleState state_;
  std::size_t step_cap_;
  bool done_ = false;
  double last_reward_ = 0.0;
};

}  // namespace bonn::envs
