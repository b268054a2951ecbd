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

#include "bonn/trainer/batch.hpp"

#include <omp.h>

#include <cstdlib>
#include <exception>
#include <string>

#include "bonn/error.hpp"

namespace bonn::train {

namespace {

// Runs body(i) for i in [0, n). The parallel path collects the first
// exception per index and rethrows the lowest-index one afterwards, which
// is the one the serial path would have raised.
template <typename Body>
void for_each_index(std::size_t n, Execution execution, int workers,
                    Body&& body) {
  if (execution == Execution::kSerial || workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (long i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

EpisodeSeeds episode_seeds(std::uint64_t root, std::uint64_t stream,
                           std::uint64_t iteration, std::size_t index) {
  const std::uint64_t base = derive_seed(root, stream, iteration);
  return {derive_seed(base, 0x706f6c, index), derive_seed(base, 0x656e76, index)};
}

int default_workers() {
  if (const char* env = std::getenv("BONN_WORKERS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return omp_get_max_threads();
}

std::vector<Episode> collect_episodes(const EnvFactory& factory,
                                      policy::PolicyParams& params,
                                      const policy::RolloutOptions& options,
                                      std::span<const EpisodeSeeds> seeds,
                                      bool with_grads, Execution execution,
                                      int workers) {
  std::vector<Episode> episodes(seeds.size());
  const auto blocks = params.blocks();
  for_each_index(seeds.size(), execution, workers, [&](std::size_t i) {
    Episode& ep = episodes[i];
    auto env = factory();
    Rng policy_rng(seeds[i].policy);
    Rng env_rng(seeds[i].env);
    if (with_grads) {
      ep.grads = nn::GradientSet::shaped_like(blocks);
      ep.trace = policy::rollout(*env, params, options, policy_rng, env_rng,
                                 &ep.grads);
    } else {
      // Unused sinks keep the shared parameter gradients untouched.
      nn::GradientSet scratch = nn::GradientSet::shaped_like(blocks);
      ep.trace = policy::rollout(*env, params, options, policy_rng, env_rng,
                                 &scratch);
      ep.trace.tape.reset();
    }
  });
  return episodes;
}

void episode_gradients(std::vector<Episode>& episodes,
                       std::span<const ReturnProfile> profiles,
                       std::span<const std::vector<double>> baselines,
                       const GradientOptions& options, Execution execution,
                       int workers) {
  if (profiles.size() != episodes.size() ||
      baselines.size() != episodes.size()) {
    throw ShapeError("episode_gradients: per-episode inputs differ in count");
  }
  for_each_index(episodes.size(), execution, workers, [&](std::size_t i) {
    episode_gradient(episodes[i].trace, profiles[i], baselines[i], options);
    episodes[i].trace.tape.reset();
  });
}

void reduce_gradients(std::span<const Episode> episodes,
                      std::span<const nn::NamedTensor> blocks) {
  if (episodes.empty()) return;
  nn::GradientSet total = nn::GradientSet::shaped_like(blocks);
  for (const Episode& ep : episodes) total.add(ep.grads);
  const double scale = 1.0 / static_cast<double>(episodes.size());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    auto grad = blocks[k].tensor->grad();
    const auto& sum = total.buffers[k];
    for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += sum[i] * scale;
  }
}

}  // namespace bonn::train
