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

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include "bonn/diffcore/tape.hpp"
#include "bonn/envs/environment.hpp"
#include "bonn/nn/layers.hpp"
#include "bonn/random.hpp"

namespace bonn::policy {

using diff::Tape;
using diff::Tensor;
using diff::Var;
using nn::Binder;

// Sizes of a BONN policy. A representation size of 0 passes the raw
// observation through unchanged; any other size applies linear + relu.
struct PolicyShape {
  std::size_t x_in = 0;       // raw x: env features + one-hot previous action
  std::size_t y_in = 0;       // raw y
  std::size_t n_actions = 2;
  std::size_t n_x = 0;
  std::size_t n_y = 5;
  std::size_t n_gru = 5;
  std::size_t k_options = 0;  // 0 = continuous options, K >= 1 = discrete

  bool discrete() const { return k_options > 0; }
  std::size_t x_repr_dim() const { return n_x ? n_x : x_in; }
  std::size_t y_repr_dim() const { return n_y ? n_y : y_in; }
};

// All learned weights. Discrete policies carry K option embeddings scored
// against y by dot product and have no option GRU.
struct PolicyParams {
  PolicyShape shape;
  std::optional<nn::LinearParams> repr_x;
  std::optional<nn::LinearParams> repr_y;
  nn::LinearParams f_acq;                // 1 x (n_gru + x_repr)
  std::optional<nn::GruParams> gru_opt;  // in = x_repr + y_repr
  nn::GruParams gru_act;                 // in = x_repr
  nn::LinearParams f_act;                // n_actions x n_gru
  std::optional<Tensor> option_embeddings;  // K x n_gru

  // Throws ConfigError on inconsistent sizes.
  static PolicyParams init(const PolicyShape& shape, Rng& rng);

  // Fixed block order shared by binding, optimisation and serialization.
  std::vector<nn::NamedTensor> blocks();
  std::size_t parameter_count();
};

// Parameters placed on one tape, bound in PolicyParams::blocks() order.
struct PolicyVars {
  std::optional<nn::LinearVars> repr_x;
  std::optional<nn::LinearVars> repr_y;
  nn::LinearVars f_acq;
  std::optional<nn::GruVars> gru_opt;
  nn::GruVars gru_act;
  nn::LinearVars f_act;
  std::optional<Var> option_embeddings;
  PolicyShape shape;
};

PolicyVars bind(Binder& binder, PolicyParams& params);

Var represent_x(Tape& tape, const PolicyVars& p, Var x_raw);
Var represent_y(Tape& tape, const PolicyVars& p, Var y_raw);

// Logit of P(sigma = 1) = f_acq(concat(h_prev, x_repr)).
Var acquisition_logit(Tape& tape, const PolicyVars& p, Var h_prev, Var x_repr);
// sigmoid(acquisition_logit).
Var acquisition_probability(Tape& tape, const PolicyVars& p, Var h_prev,
                            Var x_repr);

// New option state: one gru_opt step with input concat(x_repr, y_repr) and
// hidden state o_last. Throws ConfigError when y_repr is missing.
Var option_step(Tape& tape, const PolicyVars& p, Var x_repr, Var y_repr,
                Var o_last);

struct OptionChoice {
  std::size_t index;
  Var probs;  // softmax over <o^k, y_repr>
};

// Samples an option index by inverse CDF on one uniform draw.
OptionChoice select_option_discrete(Tape& tape, const PolicyVars& p,
                                    Var y_repr, Rng& rng);

// sigma = 0: gru_act(x_repr, h_prev). sigma = 1: the option node itself.
Var actor_step(Tape& tape, const PolicyVars& p, bool sigma, Var x_repr,
               Var h_prev, std::optional<Var> option);

Var action_distribution(Tape& tape, const PolicyVars& p, Var h);

// Index i with cdf(i - 1) <= u < cdf(i), falling back to the last index.
std::size_t sample_index(std::span<const double> probs, double u);

struct PolicyState {
  Var o_last;
  Var h;
  std::size_t t = 0;
};

PolicyState initial_state(Tape& tape, const PolicyShape& shape);

struct StepTrace {
  bool sigma = false;
  Var log_p_sigma;
  double p_sigma = 0.0;
  std::size_t action = 0;
  Var log_p_action;
  std::optional<std::size_t> option_index;
  std::optional<Var> log_p_option;
  double reward = 0.0;
  bool acquired_y = false;
  std::vector<double> option_snapshot;  // filled when sigma = 1
  std::optional<envs::Cell> position;   // before acting, grid envs only
  int goal_annotation = -1;
  // Entropy terms, recorded only when requested.
  std::optional<Var> action_entropy;
  std::optional<Var> sigma_entropy;
  // Graph nodes kept for inspection and tests.
  Var h;
  Var o_last;
};

struct EpisodeTrace {
  std::vector<StepTrace> steps;
  double total_reward = 0.0;  // undiscounted sum of rewards
  std::size_t cost = 0;       // number of acquisitions
  std::size_t length = 0;
  bool goal_reached = false;
  std::optional<envs::Cell> final_position;
  std::shared_ptr<Tape> tape;
};

struct StepOptions {
  bool force_full_obs = false;
  bool option_recurrent = true;
  // Take the most likely action / sigma instead of sampling.
  bool greedy = false;
  bool track_entropy = false;
};

struct StepOutcome {
  std::size_t action;
  StepTrace trace;
  PolicyState state;
};

// One pass of the inference procedure. Draw order: sigma, option index
// (discrete mode, sigma = 1), action. `x_raw` is the full low-level input
// including the previous action; y is requested from `env` only when
// sigma = 1.
StepOutcome policy_step(Tape& tape, const PolicyVars& p,
                        const PolicyState& state, std::span<const double> x_raw,
                        const envs::Environment& env, Rng& rng,
                        const StepOptions& options);

struct RolloutOptions {
  StepOptions step;
  std::size_t max_steps = 1000;
};

// Runs policy_step until the env terminates or max_steps is reached. Resets
// the env with `env_rng`, samples the policy with `policy_rng`. When
// `sinks` is given, parameter gradients of later backward passes on the
// returned tape go there instead of the parameter tensors.
EpisodeTrace rollout(envs::Environment& env, PolicyParams& params,
                     const RolloutOptions& options, Rng& policy_rng,
                     Rng& env_rng, nn::GradientSet* sinks = nullptr);

// x input for step t: env features followed by one-hot(previous action);
// all zeros for the action part when there is no previous action.
std::vector<double> low_level_input(std::span<const double> env_x,
                                    std::optional<std::size_t> previous_action,
                                    std::size_t n_actions);

}  // namespace bonn::policy
