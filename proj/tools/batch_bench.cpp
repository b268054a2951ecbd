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

// Serial reference vs OpenMP batch rollout and gradient computation.

#include <benchmark/benchmark.h>

#include <vector>

#include "bonn/harness/config.hpp"
#include "bonn/harness/runner.hpp"
#include "bonn/trainer/batch.hpp"
#include "bonn/trainer/returns.hpp"

namespace {

using namespace bonn;

harness::TrainConfig bench_config(bool rooms) {
  harness::TrainConfig c;
  if (rooms) c.env = envs::EnvKind::kRooms;
  return harness::resolve_defaults(c);
}

void run_batch(benchmark::State& state, train::Execution execution) {
  const auto config = bench_config(state.range(1) != 0);
  auto params = harness::initial_params(config);
  const auto factory = harness::env_factory(config);
  const auto options = harness::trainer_options(config);
  const std::size_t batch = static_cast<std::size_t>(state.range(0));
  const int workers = train::default_workers();
  std::uint64_t iteration = 0;
  std::size_t steps = 0;
  for (auto _ : state) {
    std::vector<train::EpisodeSeeds> seeds(batch);
    for (std::size_t i = 0; i < batch; ++i) {
      seeds[i] = train::episode_seeds(1, train::kTrainStream, iteration, i);
    }
    auto episodes = train::collect_episodes(factory, params, options.rollout,
                                            seeds, true, execution, workers);
    std::vector<train::ReturnProfile> profiles;
    std::vector<std::vector<double>> baselines;
    for (const auto& ep : episodes) {
      profiles.push_back(train::compute_returns(ep.trace, 0.99, 0.5));
      baselines.emplace_back(ep.trace.steps.size(), 0.0);
      steps += ep.trace.steps.size();
    }
    train::episode_gradients(episodes, profiles, baselines, {}, execution,
                             workers);
    benchmark::DoNotOptimize(episodes);
    ++iteration;
  }
  state.counters["steps/s"] =
      benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}

void BM_Serial(benchmark::State& state) {
  run_batch(state, train::Execution::kSerial);
}
void BM_Parallel(benchmark::State& state) {
  run_batch(state, train::Execution::kParallel);
}

// Args: batch size, env (0 = cartpole, 1 = 2x2 rooms).
BENCHMARK(BM_Serial)->Args({16, 0})->Args({64, 0})->Args({16, 1})->Args({64, 1});
BENCHMARK(BM_Parallel)->Args({16, 0})->Args({64, 0})->Args({16, 1})->Args({64, 1});

}  // namespace

BENCHMARK_MAIN();
