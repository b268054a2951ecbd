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

#include "bonn/harness/runner.hpp"

#include <fstream>

#include "bonn/error.hpp"
#include "bonn/harness/format.hpp"
#include "bonn/harness/render.hpp"
#include "bonn/nn/serialize.hpp"

namespace bonn::harness {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create directory '" + dir.string() + "': " +
                ec.message());
  }
}

void write_eval_artifacts(const TrainConfig& config,
                          const train::EvalSummary& eval) {
  const fs::path dir = config.out_dir;
  const bool discrete = config.option_mode == OptionMode::kDiscrete;
  std::vector<TraceRecord> records;
  records.reserve(eval.traces.size());
  for (std::size_t i = 0; i < eval.traces.size(); ++i) {
    records.push_back(to_record(i, eval.traces[i], discrete));
  }
  {
    auto out = open_out(dir / "eval.csv");
    write_eval_csv(out, records, eval.traces, config.lambda);
  }
  {
    auto out = open_out(dir / "traces.jsonl");
    write_traces_jsonl(out, records);
  }
  {
    auto out = open_out(dir / "options.csv");
    dump_option_latents(out, records, static_cast<std::size_t>(config.n_gru));
  }
}

}  // namespace

envs::EnvSpec env_spec(const TrainConfig& config) {
  envs::EnvSpec spec;
  spec.kind = config.env;
  spec.obs_mode = config.obs_mode;
  spec.rooms_per_side = config.k;
  spec.room_size = config.room_size;
  spec.maze_size = config.maze_size;
  spec.epsilon = config.epsilon;
  spec.step_cap = static_cast<std::size_t>(config.step_cap);
  return spec;
}

train::EnvFactory env_factory(const TrainConfig& config) {
  const envs::EnvSpec spec = env_spec(config);
  return [spec] { return envs::make_env(spec); };
}

policy::PolicyShape policy_shape(const TrainConfig& raw) {
  const TrainConfig config = resolve_defaults(raw);
  const auto env = envs::make_env(env_spec(config));
  policy::PolicyShape shape;
  shape.x_in = env->x_dim() + env->num_actions();
  shape.y_in = env->y_dim();
  shape.n_actions = env->num_actions();
  shape.n_x = static_cast<std::size_t>(config.n_x);
  shape.n_y = static_cast<std::size_t>(config.n_y);
  shape.n_gru = static_cast<std::size_t>(config.n_gru);
  shape.k_options = config.option_mode == OptionMode::kDiscrete
                        ? static_cast<std::size_t>(config.k_options)
                        : 0;
  return shape;
}

namespace {

policy::RolloutOptions rollout_options(const TrainConfig& config) {
  policy::RolloutOptions r;
  r.step.force_full_obs = config.force_full_obs;
  r.step.option_recurrent = config.option_recurrent;
  r.step.track_entropy = config.entropy > 0.0;
  r.max_steps = static_cast<std::size_t>(config.max_steps);
  return r;
}

}  // namespace

train::TrainerOptions trainer_options(const TrainConfig& config) {
  train::TrainerOptions o;
  o.gamma = config.gamma;
  o.lambda = config.lambda;
  o.batch = static_cast<std::size_t>(config.batch);
  o.iterations = static_cast<std::size_t>(config.iterations);
  o.seed = config.seed;
  o.adam.learning_rate = config.lr;
  o.adam.clip_norm = config.clip_norm;
  o.baseline_decay = config.baseline_decay;
  o.gradient.entropy_coef = config.entropy;
  o.rollout = rollout_options(config);
  return o;
}

train::EvalOptions eval_options(const TrainConfig& config) {
  train::EvalOptions o;
  o.episodes = static_cast<std::size_t>(config.eval_episodes);
  o.seed = config.seed;
  o.rollout = rollout_options(config);
  o.rollout.step.track_entropy = false;
  o.rollout.step.greedy = config.greedy_eval;
  o.lambda = config.lambda;
  return o;
}

policy::PolicyParams initial_params(const TrainConfig& config) {
  Rng rng(derive_seed(config.seed, kInitStream));
  return policy::PolicyParams::init(policy_shape(config), rng);
}

RunResult run_train(const TrainConfig& raw) {
  validate(raw);
  const TrainConfig config = resolve_defaults(raw);
  const fs::path dir = config.out_dir;
  ensure_dir(dir);
  {
    auto out = open_out(dir / "config.txt");
    out << to_text(config);
  }

  policy::PolicyParams params = initial_params(config);
  RunResult result;
  {
    auto metrics = open_out(dir / "metrics.csv");
    write_metrics_header(metrics);
    metrics.flush();
    train::Trainer trainer(trainer_options(config), env_factory(config),
                           params);
    result.reports = trainer.run([&](const train::TrainReport& r) {
      write_metrics_row(metrics, r);
    });
  }
  nn::save_params(dir / "params.bin", params.blocks());

  if (config.eval_episodes > 0) {
    result.eval = train::evaluate(params, env_factory(config),
                                  eval_options(config));
    write_eval_artifacts(config, result.eval);
  }
  return result;
}

train::EvalSummary run_eval(const TrainConfig& raw) {
  validate(raw);
  const TrainConfig config = resolve_defaults(raw);
  if (config.eval_episodes < 1) {
    throw ConfigError("key 'eval_episodes': eval needs at least one episode");
  }
  const fs::path dir = config.out_dir;
  policy::PolicyParams params = initial_params(config);
  nn::load_params(dir / "params.bin", params.blocks());
  auto eval = train::evaluate(params, env_factory(config), eval_options(config));
  write_eval_artifacts(config, eval);
  return eval;
}

SweepResult run_sweep(const TrainConfig& base, std::span<const double> lambdas,
                      std::span<const std::uint64_t> seeds) {
  if (lambdas.empty() || seeds.empty()) {
    throw ConfigError("sweep: lambda and seed lists must be non-empty");
  }
  validate(base);
  const fs::path root = base.out_dir;
  ensure_dir(root);
  SweepResult result;
  for (double lambda : lambdas) {
    ParetoPoint point;
    point.lambda = lambda;
    std::size_t failed = 0;
    for (std::uint64_t seed : seeds) {
      SweepRun run;
      run.lambda = lambda;
      run.seed = seed;
      run.dir = root / ("lambda_" + format_double(lambda) + "_seed_" +
                        std::to_string(seed));
      TrainConfig config = base;
      config.lambda = lambda;
      config.seed = seed;
      config.out_dir = run.dir.string();
      try {
        const RunResult r = run_train(config);
        run.mean_return = r.eval.mean_return;
        run.obs_fraction = r.eval.obs_fraction;
        point.mean_return += run.mean_return;
        point.obs_fraction += run.obs_fraction;
        ++point.seeds;
      } catch (const std::exception& e) {
        run.failed = true;
        run.error = e.what();
        ++failed;
      }
      result.runs.push_back(std::move(run));
    }
    if (point.seeds == 0) continue;
    point.mean_return /= static_cast<double>(point.seeds);
    point.obs_fraction /= static_cast<double>(point.seeds);
    result.points.push_back(point);
    result.failed.push_back(failed);
  }
  auto out = open_out(root / "pareto.csv");
  write_pareto_csv(out, result.points, result.failed);
  return result;
}

envs::GridGeometry eval_geometry(const TrainConfig& raw, std::size_t index) {
  const TrainConfig config = resolve_defaults(raw);
  auto env = envs::make_env(env_spec(config));
  const auto seeds = train::episode_seeds(config.seed, train::kEvalStream, 0,
                                          index);
  Rng rng(seeds.env);
  env->reset(rng);
  auto geometry = env->geometry();
  if (!geometry) {
    throw ConfigError("render: environment '" + env->name() +
                      "' has no grid layout");
  }
  return *geometry;
}

std::vector<fs::path> run_render(const TrainConfig& config,
                                 std::size_t episodes) {
  const fs::path dir = config.out_dir;
  std::ifstream in(dir / "traces.jsonl");
  if (!in) throw Error("cannot read '" + (dir / "traces.jsonl").string() + "'");
  const auto traces = read_traces_jsonl(in);
  std::vector<fs::path> written;
  for (std::size_t i = 0; i < traces.size() && i < episodes; ++i) {
    const auto geometry = eval_geometry(config, traces[i].episode);
    const fs::path path =
        dir / ("render_" + std::to_string(traces[i].episode) + ".svg");
    auto out = open_out(path);
    out << render_trajectory_svg(traces[i], geometry);
    written.push_back(path);
  }
  return written;
}

}  // namespace bonn::harness
