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

#include "bonn/envs/cartpole.hpp"

#include <cmath>
#include <string>

#include "bonn/error.hpp"

namespace bonn::envs {

CartPole::CartPole(std::size_t step_cap) : step_cap_(step_cap) {
  if (step_cap == 0) throw ConfigError("cartpole step cap must be >= 1");
}

void CartPole::reset(Rng& rng) {
  state_.x = uniform(rng, -0.05, 0.05);
  state_.x_dot = uniform(rng, -0.05, 0.05);
  state_.theta = uniform(rng, -0.05, 0.05);
  state_.theta_dot = uniform(rng, -0.05, 0.05);
  state_.steps = 0;
  done_ = false;
  last_reward_ = 0.0;
}

void CartPole::set_state(const CartPoleState& s) {
  state_ = s;
  done_ = false;
}

CartPoleState CartPole::integrate(const CartPoleState& s, double force) {
  constexpr double total_mass = kCartMass + kPoleMass;
  constexpr double pole_mass_length = kPoleMass * kHalfLength;
  const double cos_t = std::cos(s.theta);
  const double sin_t = std::sin(s.theta);
  const double temp =
      (force + pole_mass_length * s.theta_dot * s.theta_dot * sin_t) /
      total_mass;
  const double theta_acc =
      (kGravity * sin_t - cos_t * temp) /
      (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total_mass));
  const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

  CartPoleState next = s;
  next.x = s.x + kTau * s.x_dot;
  next.x_dot = s.x_dot + kTau * x_acc;
  next.theta = s.theta + kTau * s.theta_dot;
  next.theta_dot = s.theta_dot + kTau * theta_acc;
  next.steps = s.steps + 1;
  return next;
}

StepResult CartPole::step(std::size_t action) {
  if (action >= 2) {
    throw ConfigError("cartpole: invalid action " + std::to_string(action));
  }
  if (done_) throw Error("cartpole: step after episode end");
  state_ = integrate(state_, action == 1 ? kForce : -kForce);
  done_ = std::abs(state_.x) > kXLimit || std::abs(state_.theta) > kThetaLimit ||
          state_.steps >= step_cap_;
  last_reward_ = 1.0;
  return {1.0, done_};
}

DualObservation CartPole::observe() const { return {{}, done_, last_reward_}; }

std::vector<double> CartPole::high_level() const {
  return {state_.x, state_.x_dot, state_.theta, state_.theta_dot};
}

}  // namespace bonn::envs
