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
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bonn/harness/artifacts.hpp"
#include "bonn/harness/config.hpp"
#include "bonn/harness/pareto.hpp"
#include "bonn/policy/policy.hpp"
#include "bonn/trainer/trainer.hpp"

namespace bonn::harness {

// Seed stream for parameter initialisation; training and evaluation use
// train::kTrainStream and train::kEvalStream.
inline constexpr std::uint64_t kInitStream = 0;

envs::EnvSpec env_spec(const TrainConfig& config);
train::EnvFactory env_factory(const TrainConfig& config);
policy::PolicyShape policy_shape(const TrainConfig& config);
train::TrainerOptions trainer_options(const TrainConfig& config);
train::EvalOptions eval_options(const TrainConfig& config);
policy::PolicyParams initial_params(const TrainConfig& config);

struct RunResult {
  std::vector<train::TrainReport> reports;
  train::EvalSummary eval;
};

// Trains, evaluates and writes config.txt, metrics.csv, params.bin,
// eval.csv, traces.jsonl and options.csv under config.out_dir.
// An iteration count of 0 skips training and saves the initial weights.
RunResult run_train(const TrainConfig& config);

// Loads out_dir/params.bin, evaluates and rewrites the evaluation artifacts.
train::EvalSummary run_eval(const TrainConfig& config);

struct SweepRun {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  bool failed = false;
  std::string error;
  double mean_return = 0.0;
  double obs_fraction = 0.0;
};

struct SweepResult {
  std::vector<SweepRun> runs;
  std::vector<ParetoPoint> points;  // one per lambda with a successful run
  std::vector<std::size_t> failed;  // failed runs per point
};

// Trains every (lambda, seed) under base.out_dir/lambda_<l>_seed_<s>,
// aggregates seed means per lambda and writes base.out_dir/pareto.csv.
// A failing run is recorded and the sweep continues.
SweepResult run_sweep(const TrainConfig& base, std::span<const double> lambdas,
                      std::span<const std::uint64_t> seeds);

// Writes render_<n>.svg for the first `episodes` entries of
// out_dir/traces.jsonl and returns the written paths.
std::vector<std::filesystem::path> run_render(const TrainConfig& config,
                                              std::size_t episodes);

// Wall layout seen by evaluation episode `index`.
envs::GridGeometry eval_geometry(const TrainConfig& config, std::size_t index);

}  // namespace bonn::harness
