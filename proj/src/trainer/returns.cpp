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

#include "bonn/trainer/returns.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "bonn/error.hpp"

namespace bonn::train {

ReturnProfile compute_returns(std::span<const double> rewards,
                              std::span<const bool> sigmas, double gamma,
                              double lambda) {
  if (rewards.size() != sigmas.size()) {
    throw ShapeError("compute_returns: " + std::to_string(rewards.size()) +
                     " rewards but " + std::to_string(sigmas.size()) +
                     " acquisition flags");
  }
  const std::size_t n = rewards.size();
  ReturnProfile p;
  p.gamma = gamma;
  p.lambda = lambda;
  p.plain.assign(n, 0.0);
  p.augmented.assign(n, 0.0);
  double plain = 0.0;
  double augmented = 0.0;
  for (std::size_t t = n; t-- > 0;) {
    plain = rewards[t] + gamma * plain;
    augmented = (rewards[t] - (sigmas[t] ? lambda : 0.0)) + gamma * augmented;
    p.plain[t] = plain;
    p.augmented[t] = augmented;
  }
  return p;
}

ReturnProfile compute_returns(const policy::EpisodeTrace& trace, double gamma,
                              double lambda) {
  std::vector<double> rewards;
  std::vector<bool> flags;
  rewards.reserve(trace.steps.size());
  for (const auto& s : trace.steps) {
    rewards.push_back(s.reward);
    flags.push_back(s.sigma);
  }
  // std::vector<bool> has no contiguous storage.
  std::unique_ptr<bool[]> sigmas(new bool[flags.size()]);
  for (std::size_t i = 0; i < flags.size(); ++i) sigmas[i] = flags[i];
  return compute_returns(rewards, std::span<const bool>(sigmas.get(), flags.size()),
                         gamma, lambda);
}

BaselineState::BaselineState(double decay) : decay_(decay) {
  if (!(decay >= 0.0 && decay < 1.0)) {
    throw ConfigError("baseline decay must lie in [0, 1), got " +
                      std::to_string(decay));
  }
}

std::vector<double> BaselineState::update_and_fetch(
    const ReturnProfile& profile) {
  const std::size_t n = profile.augmented.size();
  if (means_.size() < n) {
    means_.resize(n, 0.0);
    visits_.resize(n, 0);
  }
  std::vector<double> out(means_.begin(), means_.begin() + n);
  for (std::size_t t = 0; t < n; ++t) {
    const double r = profile.augmented[t];
    means_[t] = visits_[t] == 0 ? r : decay_ * means_[t] + (1.0 - decay_) * r;
    ++visits_[t];
  }
  return out;
}

double episode_gradient(const policy::EpisodeTrace& trace,
                        const ReturnProfile& profile,
                        std::span<const double> baselines,
                        const GradientOptions& options) {
  if (!trace.tape) throw Error("episode_gradient: the episode tape is gone");
  const std::size_t n = trace.steps.size();
  if (profile.augmented.size() != n || baselines.size() != n) {
    throw ShapeError("episode_gradient: episode has " + std::to_string(n) +
                     " steps, returns " +
                     std::to_string(profile.augmented.size()) +
                     ", baselines " + std::to_string(baselines.size()));
  }
  diff::Tape& tape = *trace.tape;
  std::vector<diff::Var> terms;
  std::vector<double> weights;
  terms.reserve(4 * n);
  weights.reserve(4 * n);
  for (std::size_t t = 0; t < n; ++t) {
    const auto& s = trace.steps[t];
    const double advantage = profile.augmented[t] - baselines[t];
    terms.push_back(s.log_p_action);
    weights.push_back(-advantage);
    if (s.log_p_sigma.valid()) {
      terms.push_back(s.log_p_sigma);
      weights.push_back(-advantage);
    }
    if (s.log_p_option) {
      terms.push_back(*s.log_p_option);
      weights.push_back(-advantage);
    }
    if (options.entropy_coef != 0.0) {
      if (s.action_entropy) {
        terms.push_back(*s.action_entropy);
        weights.push_back(-options.entropy_coef);
      }
      if (s.sigma_entropy) {
        terms.push_back(*s.sigma_entropy);
        weights.push_back(-options.entropy_coef);
      }
    }
  }
  const diff::Var loss = tape.weighted_sum(terms, weights);
  const double value = tape.scalar(loss);
  if (!std::isfinite(value)) {
    throw NumericError("episode_gradient: non-finite surrogate loss");
  }
  tape.backward(loss);
  return value;
}

}  // namespace bonn::train
