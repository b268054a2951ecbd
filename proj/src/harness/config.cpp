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

#include "bonn/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "bonn/error.hpp"
#include "bonn/harness/format.hpp"

namespace bonn::harness {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double to_double(std::string_view key, std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                      "' is not a number");
  }
  return v;
}

long long to_integer(std::string_view key, std::string_view text) {
  long long v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                      "' is not an integer");
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "0" || text == "no" || text == "off") return false;
  throw ConfigError("key '" + std::string(key) + "': '" + std::string(text) +
                    "' is not a boolean");
}

[[noreturn]] void out_of_range(std::string_view key, std::string_view text,
                               std::string_view rule) {
  throw ConfigError("key '" + std::string(key) + "': value " +
                    std::string(text) + " out of range (" + std::string(rule) +
                    ")");
}

int int_in(std::string_view key, std::string_view text, long long lo,
           long long hi, std::string_view rule) {
  const long long v = to_integer(key, text);
  if (v < lo || v > hi) out_of_range(key, text, rule);
  return static_cast<int>(v);
}

using Setter = std::function<void(TrainConfig&, std::string_view key,
                                  std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"env", [](TrainConfig& c, auto, auto v) { c.env = envs::parse_env_kind(v); }},
      {"obs_mode",
       [](TrainConfig& c, auto, auto v) { c.obs_mode = envs::parse_obs_mode(v); }},
      {"k", [](TrainConfig& c, auto k, auto v) {
         c.k = int_in(k, v, 1, 64, ">= 1");
       }},
      {"room_size", [](TrainConfig& c, auto k, auto v) {
         c.room_size = int_in(k, v, 3, 1001, "odd, >= 3");
         if (c.room_size % 2 == 0) out_of_range(k, v, "odd, >= 3");
       }},
      {"maze_size", [](TrainConfig& c, auto k, auto v) {
         c.maze_size = int_in(k, v, 5, 1001, "odd, >= 5");
         if (c.maze_size % 2 == 0) out_of_range(k, v, "odd, >= 5");
       }},
      {"lambda", [](TrainConfig& c, auto k, auto v) {
         c.lambda = to_double(k, v);
         if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) out_of_range(k, v, ">= 0");
       }},
      {"epsilon", [](TrainConfig& c, auto k, auto v) {
         c.epsilon = to_double(k, v);
         if (!(c.epsilon >= 0.0 && c.epsilon <= 1.0)) out_of_range(k, v, "[0, 1]");
       }},
      {"gamma", [](TrainConfig& c, auto k, auto v) {
         c.gamma = to_double(k, v);
         if (!(c.gamma > 0.0 && c.gamma <= 1.0)) out_of_range(k, v, "(0, 1]");
       }},
      {"n_x", [](TrainConfig& c, auto k, auto v) {
         c.n_x = int_in(k, v, -1, 4096, "-1 (default), 0 (identity) or a size");
       }},
      {"n_y", [](TrainConfig& c, auto k, auto v) {
         c.n_y = int_in(k, v, -1, 4096, "-1 (default), 0 (identity) or a size");
       }},
      {"n_gru", [](TrainConfig& c, auto k, auto v) {
         c.n_gru = int_in(k, v, -1, 4096, "-1 (default) or >= 1");
         if (c.n_gru == 0) out_of_range(k, v, "-1 (default) or >= 1");
       }},
      {"option_mode", [](TrainConfig& c, auto k, auto v) {
         if (v == "continuous") {
           c.option_mode = OptionMode::kContinuous;
         } else if (v == "discrete") {
           c.option_mode = OptionMode::kDiscrete;
         } else {
           throw ConfigError("key '" + std::string(k) + "': unknown option mode '" +
                             std::string(v) + "'");
         }
       }},
      {"k_options", [](TrainConfig& c, auto k, auto v) {
         c.k_options = int_in(k, v, 0, 4096, ">= 0");
         c.option_mode = c.k_options > 0 ? OptionMode::kDiscrete
                                         : OptionMode::kContinuous;
       }},
      {"option_recurrent",
       [](TrainConfig& c, auto k, auto v) { c.option_recurrent = to_bool(k, v); }},
      {"force_full_obs",
       [](TrainConfig& c, auto k, auto v) { c.force_full_obs = to_bool(k, v); }},
      {"lr", [](TrainConfig& c, auto k, auto v) {
         c.lr = to_double(k, v);
         if (!(c.lr > 0.0) || !std::isfinite(c.lr)) out_of_range(k, v, "> 0");
       }},
      {"clip_norm", [](TrainConfig& c, auto k, auto v) {
         c.clip_norm = to_double(k, v);
         if (!(c.clip_norm > 0.0)) out_of_range(k, v, "> 0");
       }},
      {"batch", [](TrainConfig& c, auto k, auto v) {
         c.batch = int_in(k, v, 1, 1 << 20, ">= 1");
       }},
      {"iterations", [](TrainConfig& c, auto k, auto v) {
         c.iterations = int_in(k, v, 0, 1 << 30, ">= 0");
       }},
      {"eval_episodes", [](TrainConfig& c, auto k, auto v) {
         c.eval_episodes = int_in(k, v, 1, 1 << 24, ">= 1");
       }},
      {"seed", [](TrainConfig& c, auto k, auto v) {
         const long long s = to_integer(k, v);
         if (s < 0) out_of_range(k, v, ">= 0");
         c.seed = static_cast<std::uint64_t>(s);
       }},
      {"out_dir", [](TrainConfig& c, auto k, auto v) {
         if (v.empty()) out_of_range(k, v, "non-empty path");
         c.out_dir = std::string(v);
       }},
      {"baseline_decay", [](TrainConfig& c, auto k, auto v) {
         c.baseline_decay = to_double(k, v);
         if (!(c.baseline_decay >= 0.0 && c.baseline_decay < 1.0)) {
           out_of_range(k, v, "[0, 1)");
         }
       }},
      {"entropy", [](TrainConfig& c, auto k, auto v) {
         c.entropy = to_double(k, v);
         if (!(c.entropy >= 0.0)) out_of_range(k, v, ">= 0");
       }},
      {"step_cap", [](TrainConfig& c, auto k, auto v) {
         c.step_cap = int_in(k, v, 0, 1 << 24, ">= 0");
       }},
      {"max_steps", [](TrainConfig& c, auto k, auto v) {
         c.max_steps = int_in(k, v, 1, 1 << 24, ">= 1");
       }},
      {"greedy_eval",
       [](TrainConfig& c, auto k, auto v) { c.greedy_eval = to_bool(k, v); }},
  };
  return table;
}

void apply(TrainConfig& config, std::string_view key, std::string_view value,
           const std::string& where) {
  const auto it = setters().find(key);
  if (it == setters().end()) {
    throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
  }
  try {
    it->second(config, key, value);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

TrainConfig parse_config(std::string_view text, const Overrides& overrides) {
  TrainConfig config;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'key = value', got '" +
                        std::string(line) + "'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    apply(config, key, value, where);
  }
  for (const auto& [key, value] : overrides) {
    apply(config, key, value, "override");
  }
  validate(config);
  return config;
}

TrainConfig load_config(const std::filesystem::path& path,
                        const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_config(buf.str(), overrides);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void validate(const TrainConfig& c) {
  if (c.option_mode == OptionMode::kDiscrete && c.k_options < 1) {
    throw ConfigError("key 'k_options': discrete options require k_options >= 1");
  }
  if (c.env == envs::EnvKind::kOracleMaze && c.obs_mode == envs::ObsMode::kSplit) {
    throw ConfigError("key 'obs_mode': the oracle maze has a single observation layout");
  }
  if (c.env == envs::EnvKind::kCartPole && c.obs_mode == envs::ObsMode::kSplit) {
    throw ConfigError("key 'obs_mode': cartpole supports the blind setting only");
  }
}

TrainConfig resolve_defaults(TrainConfig c) {
  int n_x = 0, n_y = 5, n_gru = 5;
  switch (c.env) {
    case envs::EnvKind::kCartPole:
      n_x = 0, n_y = 5, n_gru = 5;
      break;
    case envs::EnvKind::kRooms:
      if (c.obs_mode == envs::ObsMode::kSplit) {
        n_x = 10, n_y = 10, n_gru = 10;
      } else {
        n_x = 0, n_y = 20, n_gru = 10;
      }
      break;
    case envs::EnvKind::kOracleMaze:
      n_x = 10, n_y = 0, n_gru = 5;
      break;
  }
  if (c.n_gru < 0) c.n_gru = n_gru;
  if (c.n_x < 0) c.n_x = n_x;
  if (c.n_y < 0) {
    // Discrete options score y against n_gru-sized embeddings.
    c.n_y = c.option_mode == OptionMode::kDiscrete ? c.n_gru : n_y;
  }
  return c;
}

std::string to_text(const TrainConfig& c) {
  std::ostringstream out;
  out << "env = " << envs::to_string(c.env) << "\n"
      << "obs_mode = " << envs::to_string(c.obs_mode) << "\n"
      << "k = " << c.k << "\n"
      << "room_size = " << c.room_size << "\n"
      << "maze_size = " << c.maze_size << "\n"
      << "lambda = " << format_double(c.lambda) << "\n"
      << "epsilon = " << format_double(c.epsilon) << "\n"
      << "gamma = " << format_double(c.gamma) << "\n"
      << "n_x = " << c.n_x << "\n"
      << "n_y = " << c.n_y << "\n"
      << "n_gru = " << c.n_gru << "\n"
      << "option_mode = "
      << (c.option_mode == OptionMode::kDiscrete ? "discrete" : "continuous")
      << "\n"
      << "k_options = " << c.k_options << "\n"
      << "option_recurrent = " << (c.option_recurrent ? "true" : "false") << "\n"
      << "force_full_obs = " << (c.force_full_obs ? "true" : "false") << "\n"
      << "lr = " << format_double(c.lr) << "\n"
      << "clip_norm = " << format_double(c.clip_norm) << "\n"
      << "batch = " << c.batch << "\n"
      << "iterations = " << c.iterations << "\n"
      << "eval_episodes = " << c.eval_episodes << "\n"
      << "seed = " << c.seed << "\n"
      << "out_dir = " << c.out_dir << "\n"
      << "baseline_decay = " << format_double(c.baseline_decay) << "\n"
      << "entropy = " << format_double(c.entropy) << "\n"
      << "step_cap = " << c.step_cap << "\n"
      << "max_steps = " << c.max_steps << "\n"
      << "greedy_eval = " << (c.greedy_eval ? "true" : "false") << "\n";
  return out.str();
}

}  // namespace bonn::harness
