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

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bonn/error.hpp"
#include "bonn/harness/config.hpp"
#include "bonn/harness/format.hpp"
#include "bonn/harness/runner.hpp"

namespace {

using bonn::harness::format_double;

struct Flags {
  std::string config_path;
  std::optional<std::string> env, obs_mode, out_dir;
  std::optional<int> k, k_options, batch, iterations, eval_episodes;
  std::optional<double> lambda, epsilon, gamma, lr, clip;
  std::optional<std::uint64_t> seed;
  bool force_full_obs = false;
};

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "config file (key = value)");
  app->add_option("--env", f.env, "cartpole | rooms | oracle-maze");
  app->add_option("--obs-mode", f.obs_mode, "blind | split");
  app->add_option("--k", f.k, "rooms per side");
  app->add_option("--lambda", f.lambda, "acquisition cost");
  app->add_option("--epsilon", f.epsilon, "action noise probability");
  app->add_option("--gamma", f.gamma, "discount");
  app->add_option("--k-options", f.k_options, "discrete options (0 = continuous)");
  app->add_flag("--force-full-obs", f.force_full_obs,
                "acquire y every step (R-PG comparator)");
  app->add_option("--lr", f.lr, "Adam learning rate");
  app->add_option("--clip", f.clip, "gradient norm clip");
  app->add_option("--batch", f.batch, "episodes per update");
  app->add_option("--iterations", f.iterations, "training updates");
  app->add_option("--eval-episodes", f.eval_episodes, "evaluation episodes");
  app->add_option("--seed", f.seed, "root seed");
  app->add_option("--out-dir", f.out_dir, "artifact directory");
}

bonn::harness::TrainConfig build_config(const Flags& f) {
  bonn::harness::Overrides o;
  auto put = [&](const char* key, const auto& value) {
    if (!value) return;
    if constexpr (std::is_same_v<std::decay_t<decltype(*value)>, double>) {
      o.emplace_back(key, format_double(*value));
    } else if constexpr (std::is_same_v<std::decay_t<decltype(*value)>,
                                        std::string>) {
      o.emplace_back(key, *value);
    } else {
      o.emplace_back(key, std::to_string(*value));
    }
  };
  put("env", f.env);
  put("obs_mode", f.obs_mode);
  put("k", f.k);
  put("lambda", f.lambda);
  put("epsilon", f.epsilon);
  put("gamma", f.gamma);
  put("k_options", f.k_options);
  put("lr", f.lr);
  put("clip_norm", f.clip);
  put("batch", f.batch);
  put("iterations", f.iterations);
  put("eval_episodes", f.eval_episodes);
  put("seed", f.seed);
  put("out_dir", f.out_dir);
  if (f.force_full_obs) o.emplace_back("force_full_obs", "true");
  if (f.config_path.empty()) return bonn::harness::parse_config("", o);
  return bonn::harness::load_config(f.config_path, o);
}

void print_eval(const bonn::train::EvalSummary& e) {
  std::cout << "eval mean_return=" << format_double(e.mean_return)
            << " mean_aug_return=" << format_double(e.mean_aug_return)
            << " obs_fraction=" << format_double(e.obs_fraction)
            << " mean_length=" << format_double(e.mean_length)
            << " goal_rate=" << format_double(e.goal_rate) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bonn: budgeted option networks"};
  app.require_subcommand(1);
  Flags flags;
  std::vector<double> lambdas;
  std::vector<std::uint64_t> seeds;
  std::size_t render_episodes = 5;

  auto* train = app.add_subcommand("train", "train, evaluate, write artifacts");
  auto* eval = app.add_subcommand("eval", "evaluate out_dir/params.bin");
  auto* sweep = app.add_subcommand("sweep", "lambda x seed sweep with Pareto front");
  auto* render = app.add_subcommand("render", "SVG trajectories from traces.jsonl");
  for (auto* sub : {train, eval, sweep, render}) add_common(sub, flags);
  sweep->add_option("--lambdas", lambdas, "cost levels")->required()->delimiter(',');
  sweep->add_option("--seeds", seeds, "seeds")->required()->delimiter(',');
  render->add_option("--episodes", render_episodes, "episodes to draw");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const auto config = build_config(flags);
    if (train->parsed()) {
      const auto result = bonn::harness::run_train(config);
      if (!result.reports.empty()) {
        const auto& last = result.reports.back();
        std::cout << "train iterations=" << last.iteration
                  << " mean_return=" << format_double(last.mean_return)
                  << " obs_fraction=" << format_double(last.obs_fraction)
                  << '\n';
      }
      if (config.eval_episodes > 0) print_eval(result.eval);
    } else if (eval->parsed()) {
      print_eval(bonn::harness::run_eval(config));
    } else if (sweep->parsed()) {
      const auto result = bonn::harness::run_sweep(config, lambdas, seeds);
      for (const auto& run : result.runs) {
        std::cout << "lambda=" << format_double(run.lambda)
                  << " seed=" << run.seed;
        if (run.failed) {
          std::cout << " FAILED: " << run.error << '\n';
        } else {
          std::cout << " mean_return=" << format_double(run.mean_return)
                    << " obs_fraction=" << format_double(run.obs_fraction)
                    << '\n';
        }
      }
    } else if (render->parsed()) {
      for (const auto& path : bonn::harness::run_render(config, render_episodes)) {
        std::cout << path.string() << '\n';
      }
    }
  } catch (const bonn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
