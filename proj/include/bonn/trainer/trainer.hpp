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

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bonn/nn/adam.hpp"
#include "bonn/policy/policy.hpp"
#include "bonn/trainer/batch.hpp"
#include "bonn/trainer/returns.hpp"

namespace bonn::train {

struct TrainerOptions {
  double gamma = 0.99;
  double lambda = 0.0;
  std::size_t batch = 16;
  std::size_t iterations = 0;
  std::uint64_t seed = 1;
  nn::AdamOptions adam;
  double baseline_decay = 0.9;
  GradientOptions gradient;
  policy::RolloutOptions rollout;
  Execution execution = Execution::kParallel;
  int workers = 0;  // 0 = default_workers()
};

// Per-iteration training metrics. Returns are undiscounted episode sums;
// the augmented one subtracts lambda per acquisition.
struct TrainReport {
  std::size_t iteration = 0;
  double mean_return = 0.0;
  double mean_aug_return = 0.0;
  double obs_fraction = 0.0;  // total acquisitions / total steps
  double mean_length = 0.0;
  double grad_norm = 0.0;     // before clipping
  double elapsed_s = 0.0;
  double goal_rate = 0.0;
};

class Trainer {
 public:
  Trainer(TrainerOptions options, EnvFactory factory,
          policy::PolicyParams& params);

  // One update: M episodes, returns, baselines, averaged gradient, Adam.
  TrainReport step();

  // Runs options.iterations updates, handing each report to `on_report`.
  // A non-finite gradient or surrogate throws NumericError; every report
  // emitted before that is a completed update.
  std::vector<TrainReport> run(
      const std::function<void(const TrainReport&)>& on_report = {});

  const TrainerOptions& options() const { return options_; }
  std::size_t iteration() const { return iteration_; }

 private:
  TrainerOptions options_;
  EnvFactory factory_;
  policy::PolicyParams& params_;
  std::vector<nn::NamedTensor> blocks_;
  nn::AdamState adam_;
  BaselineState baseline_;
  std::size_t iteration_ = 0;
  double elapsed_ = 0.0;
};

struct EvalOptions {
  std::size_t episodes = 100;
  std::uint64_t seed = 1;
  policy::RolloutOptions rollout;
  double lambda = 0.0;
  Execution execution = Execution::kParallel;
  int workers = 0;
  // Episode tapes are dropped unless kept explicitly.
  bool keep_tapes = false;
};

struct EvalSummary {
  double mean_return = 0.0;
  double mean_aug_return = 0.0;
  double obs_fraction = 0.0;
  double mean_length = 0.0;
  double goal_rate = 0.0;
  std::vector<policy::EpisodeTrace> traces;
};

// Samples actions and acquisitions from the learned distributions (unless
// rollout.step.greedy). obs_fraction is pooled over all steps.
EvalSummary evaluate(policy::PolicyParams& params, const EnvFactory& factory,
                     const EvalOptions& options);

}  // namespace bonn::train
