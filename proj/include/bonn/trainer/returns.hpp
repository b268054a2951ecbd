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
#include <span>
#include <vector>

#include "bonn/policy/policy.hpp"

namespace bonn::train {

// Discounted returns of one episode, plain (R_t) and with the acquisition
// cost folded into every reward (R*_t, from r*_t = r_t - lambda * sigma_t).
struct ReturnProfile {
  std::vector<double> plain;
  std::vector<double> augmented;
  double gamma = 1.0;
  double lambda = 0.0;
};

ReturnProfile compute_returns(std::span<const double> rewards,
                              std::span<const bool> sigmas, double gamma,
                              double lambda);
ReturnProfile compute_returns(const policy::EpisodeTrace& trace, double gamma,
                              double lambda);

// Per-time-index exponential moving average of R*_t. The first visit of an
// index returns 0 and initialises the mean to the observed return.
class BaselineState {
 public:
  explicit BaselineState(double decay = 0.9);

  // Baselines for every step of the episode (read before updating), then
  // folds the episode's returns into the running means.
  std::vector<double> update_and_fetch(const ReturnProfile& profile);

  double decay() const { return decay_; }
  std::span<const double> means() const { return means_; }
  std::span<const std::size_t> visits() const { return visits_; }

 private:
  double decay_;
  std::vector<double> means_;
  std::vector<std::size_t> visits_;
};

struct GradientOptions {
  // Weight of the entropy bonus; not part of the original update rule.
  double entropy_coef = 0.0;
};

// Builds the surrogate
//   L = -sum_t [log P(a_t) + log P(sigma_t) + log P(i_t)] * (R*_t - b*_t)
// on the episode's tape, where the advantage is a constant, and runs
// backward so the gradients land in the sinks the episode was bound with.
// Returns L. Throws NumericError when L is not finite.
double episode_gradient(const policy::EpisodeTrace& trace,
                        const ReturnProfile& profile,
                        std::span<const double> baselines,
                        const GradientOptions& options = {});

}  // namespace bonn::train
