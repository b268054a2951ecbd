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
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bonn/envs/environment.hpp"

namespace bonn::harness {

enum class OptionMode { kContinuous, kDiscrete };

// Everything a run needs. Representation sizes of -1 mean "environment
// default" and are filled in by resolve_defaults(); 0 means identity.
struct TrainConfig {
  envs::EnvKind env = envs::EnvKind::kCartPole;
  envs::ObsMode obs_mode = envs::ObsMode::kBlind;
  int k = 2;
  int room_size = 5;
  int maze_size = 9;
  double lambda = 0.5;
  double epsilon = 0.0;
  double gamma = 0.99;
  int n_x = -1;
  int n_y = -1;
  int n_gru = -1;
  OptionMode option_mode = OptionMode::kContinuous;
  int k_options = 0;
  bool option_recurrent = true;
  bool force_full_obs = false;
  double lr = 1e-3;
  double clip_norm = 5.0;
  int batch = 16;
  int iterations = 1000;
  int eval_episodes = 100;
  std::uint64_t seed = 1;
  std::string out_dir = "runs/default";
  double baseline_decay = 0.9;
  double entropy = 0.0;
  int step_cap = 0;     // 0 = environment default
  int max_steps = 1000;  // rollout safety cap
  bool greedy_eval = false;
};

using Overrides = std::vector<std::pair<std::string, std::string>>;

// Line format: `key = value`, `#` starts a comment, blank lines ignored.
// Overrides are applied after the text, so they win. Errors are ConfigError
// naming the line (or "override") and the key.
TrainConfig parse_config(std::string_view text, const Overrides& overrides = {});

// Reads `path` and parses it.
TrainConfig load_config(const std::filesystem::path& path,
                        const Overrides& overrides = {});

// Fills environment-dependent representation sizes.
TrainConfig resolve_defaults(TrainConfig config);

// Checks ranges; throws ConfigError naming the offending key.
void validate(const TrainConfig& config);

// Serialises every key, in the same format parse_config reads.
std::string to_text(const TrainConfig& config);

// All keys understood by parse_config.
const std::vector<std::string>& config_keys();

}  // namespace bonn::harness
