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

#include "bonn/trainer/trainer.hpp"

#include <chrono>

#include "bonn/error.hpp"

namespace bonn::train {

namespace {

struct Totals {
  double reward = 0.0;
  double aug_reward = 0.0;
  double cost = 0.0;
  double steps = 0.0;
  double goals = 0.0;
};

Totals accumulate(std::span<const policy::EpisodeTrace* const> traces,
                  double lambda) {
  Totals t;
  for (const auto* tr : traces) {
    t.reward += tr->total_reward;
    t.aug_reward += tr->total_reward - lambda * static_cast<double>(tr->cost);
    t.cost += static_cast<double>(tr->cost);
    t.steps += static_cast<double>(tr->length);
    t.goals += tr->goal_reached ? 1.0 : 0.0;
  }
  return t;
}

}  // namespace

Trainer::Trainer(TrainerOptions options, EnvFactory factory,
                 policy::PolicyParams& params)
    : options_(std::move(options)),
      factory_(std::move(factory)),
      params_(params),
      blocks_(params.blocks()),
      adam_(options_.adam, blocks_),
      baseline_(options_.baseline_decay) {
  if (options_.batch == 0) throw ConfigError("batch size must be >= 1");
  if (options_.workers <= 0) options_.workers = default_workers();
  options_.rollout.step.track_entropy = options_.gradient.entropy_coef != 0.0;
}

TrainReport Trainer::step() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t m = options_.batch;

  std::vector<EpisodeSeeds> seeds(m);
  for (std::size_t i = 0; i < m; ++i) {
    seeds[i] = episode_seeds(options_.seed, kTrainStream, iteration_, i);
  }
  std::vector<Episode> episodes =
      collect_episodes(factory_, params_, options_.rollout, seeds, true,
                       options_.execution, options_.workers);

  std::vector<ReturnProfile> profiles;
  std::vector<std::vector<double>> baselines;
  profiles.reserve(m);
  baselines.reserve(m);
  for (const Episode& ep : episodes) {
    profiles.push_back(
        compute_returns(ep.trace, options_.gamma, options_.lambda));
    baselines.push_back(baseline_.update_and_fetch(profiles.back()));
  }
  episode_gradients(episodes, profiles, baselines, options_.gradient,
                    options_.execution, options_.workers);
  reduce_gradients(episodes, blocks_);
  const double norm = nn::adam_step(adam_, blocks_);

  std::vector<const policy::EpisodeTrace*> traces;
  for (const Episode& ep : episodes) traces.push_back(&ep.trace);
  const Totals totals = accumulate(traces, options_.lambda);
  const double n = static_cast<double>(m);

  elapsed_ += std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                            start)
                  .count();
  TrainReport report;
  report.iteration = iteration_;
  report.mean_return = totals.reward / n;
  report.mean_aug_return = totals.aug_reward / n;
  report.obs_fraction = totals.steps > 0 ? totals.cost / totals.steps : 0.0;
  report.mean_length = totals.steps / n;
  report.grad_norm = norm;
  report.elapsed_s = elapsed_;
  report.goal_rate = totals.goals / n;
  ++iteration_;
  return report;
}

std::vector<TrainReport> Trainer::run(
    const std::function<void(const TrainReport&)>& on_report) {
  std::vector<TrainReport> reports;
  reports.reserve(options_.iterations);
  while (iteration_ < options_.iterations) {
    reports.push_back(step());
    if (on_report) on_report(reports.back());
  }
  return reports;
}

EvalSummary evaluate(policy::PolicyParams& params, const EnvFactory& factory,
                     const EvalOptions& options) {
  if (options.episodes == 0) {
    throw ConfigError("evaluate: n_episodes must be >= 1");
  }
  std::vector<EpisodeSeeds> seeds(options.episodes);
  for (std::size_t i = 0; i < options.episodes; ++i) {
    seeds[i] = episode_seeds(options.seed, kEvalStream, 0, i);
  }
  const int workers = options.workers > 0 ? options.workers : default_workers();
  std::vector<Episode> episodes =
      collect_episodes(factory, params, options.rollout, seeds,
                       options.keep_tapes, options.execution, workers);

  EvalSummary summary;
  summary.traces.reserve(episodes.size());
  for (Episode& ep : episodes) summary.traces.push_back(std::move(ep.trace));
  std::vector<const policy::EpisodeTrace*> traces;
  for (const auto& t : summary.traces) traces.push_back(&t);
  const Totals totals = accumulate(traces, options.lambda);
  const double n = static_cast<double>(options.episodes);
  summary.mean_return = totals.reward / n;
  summary.mean_aug_return = totals.aug_reward / n;
  summary.obs_fraction = totals.steps > 0 ? totals.cost / totals.steps : 0.0;
  summary.mean_length = totals.steps / n;
  summary.goal_rate = totals.goals / n;
  return summary;
}

}  // namespace bonn::train
