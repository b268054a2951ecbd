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
#include <memory>
#include <span>
#include <vector>

#include "bonn/envs/environment.hpp"
#include "bonn/nn/layers.hpp"
#include "bonn/policy/policy.hpp"
#include "bonn/trainer/returns.hpp"

namespace bonn::train {

using EnvFactory = std::function<std::unique_ptr<envs::Environment>()>;

// How a batch of independent episodes is executed. kSerial is the reference
// path; kParallel spreads episodes over OpenMP threads and must produce
// bit-identical results.
enum class Execution { kSerial, kParallel };

struct EpisodeSeeds {
  std::uint64_t policy = 0;
  std::uint64_t env = 0;
};

// Seeds of episode `index` of iteration `iteration`. `stream` separates
// training from evaluation.
EpisodeSeeds episode_seeds(std::uint64_t root, std::uint64_t stream,
                           std::uint64_t iteration, std::size_t index);

inline constexpr std::uint64_t kTrainStream = 1;
inline constexpr std::uint64_t kEvalStream = 2;

struct Episode {
  policy::EpisodeTrace trace;
  nn::GradientSet grads;
};

// Worker cap from BONN_WORKERS, else the OpenMP default.
int default_workers();

// Rolls out one episode per seed pair, each on a fresh env from `factory`.
// With `with_grads` every episode gets its own gradient buffers, so the
// parameters are only read.
std::vector<Episode> collect_episodes(const EnvFactory& factory,
                                      policy::PolicyParams& params,
                                      const policy::RolloutOptions& options,
                                      std::span<const EpisodeSeeds> seeds,
                                      bool with_grads, Execution execution,
                                      int workers);

// Runs episode_gradient for every episode into its own buffers.
void episode_gradients(std::vector<Episode>& episodes,
                       std::span<const ReturnProfile> profiles,
                       std::span<const std::vector<double>> baselines,
                       const GradientOptions& options, Execution execution,
                       int workers);

// Sums the per-episode buffers in episode order, scales by 1/size and adds
// the result into the parameter gradients.
void reduce_gradients(std::span<const Episode> episodes,
                      std::span<const nn::NamedTensor> blocks);

}  // namespace bonn::train
