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

#include "bonn/policy/policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bonn/error.hpp"

namespace bonn::policy {

PolicyParams PolicyParams::init(const PolicyShape& shape, Rng& rng) {
  if (shape.n_gru == 0) throw ConfigError("policy: n_gru must be >= 1");
  if (shape.n_actions == 0) throw ConfigError("policy: no actions");
  if (shape.discrete() && shape.y_repr_dim() != shape.n_gru) {
    throw ConfigError("discrete options score y by dot product: y "
                      "representation size " +
                      std::to_string(shape.y_repr_dim()) +
                      " must equal n_gru " + std::to_string(shape.n_gru));
  }

  PolicyParams p;
  p.shape = shape;
  if (shape.n_x) p.repr_x = nn::linear_init(shape.x_in, shape.n_x, rng);
  if (shape.n_y) p.repr_y = nn::linear_init(shape.y_in, shape.n_y, rng);
  p.f_acq = nn::linear_init(shape.n_gru + shape.x_repr_dim(), 1, rng);
  if (!shape.discrete()) {
    p.gru_opt = nn::gru_init(shape.x_repr_dim() + shape.y_repr_dim(),
                             shape.n_gru, rng);
  }
  p.gru_act = nn::gru_init(shape.x_repr_dim(), shape.n_gru, rng);
  p.f_act = nn::linear_init(shape.n_gru, shape.n_actions, rng);
  if (shape.discrete()) {
    Tensor e({shape.k_options, shape.n_gru});
    const double bound = 1.0;
    for (double& v : e.values()) v = uniform(rng, -bound, bound);
    p.option_embeddings = std::move(e);
  }
  return p;
}

std::vector<nn::NamedTensor> PolicyParams::blocks() {
  std::vector<nn::NamedTensor> out;
  if (repr_x) nn::append_blocks(out, "repr_x", *repr_x);
  if (repr_y) nn::append_blocks(out, "repr_y", *repr_y);
  nn::append_blocks(out, "f_acq", f_acq);
  if (gru_opt) nn::append_blocks(out, "gru_opt", *gru_opt);
  nn::append_blocks(out, "gru_act", gru_act);
  nn::append_blocks(out, "f_act", f_act);
  if (option_embeddings) out.push_back({"option_embeddings", &*option_embeddings});
  return out;
}

std::size_t PolicyParams::parameter_count() {
  std::size_t n = 0;
  for (const auto& b : blocks()) n += b.tensor->size();
  return n;
}

PolicyVars bind(Binder& binder, PolicyParams& params) {
  PolicyVars v;
  v.shape = params.shape;
  if (params.repr_x) v.repr_x = nn::bind(binder, *params.repr_x);
  if (params.repr_y) v.repr_y = nn::bind(binder, *params.repr_y);
  v.f_acq = nn::bind(binder, params.f_acq);
  if (params.gru_opt) v.gru_opt = nn::bind(binder, *params.gru_opt);
  v.gru_act = nn::bind(binder, params.gru_act);
  v.f_act = nn::bind(binder, params.f_act);
  if (params.option_embeddings) {
    v.option_embeddings = binder(*params.option_embeddings);
  }
  return v;
}

Var represent_x(Tape& tape, const PolicyVars& p, Var x_raw) {
  if (!p.repr_x) return x_raw;
  return tape.relu(nn::linear(tape, *p.repr_x, x_raw));
}

Var represent_y(Tape& tape, const PolicyVars& p, Var y_raw) {
  if (!p.repr_y) return y_raw;
  return tape.relu(nn::linear(tape, *p.repr_y, y_raw));
}

Var acquisition_logit(Tape& tape, const PolicyVars& p, Var h_prev,
                      Var x_repr) {
  return nn::linear(tape, p.f_acq, tape.concat(h_prev, x_repr));
}

Var acquisition_probability(Tape& tape, const PolicyVars& p, Var h_prev,
                            Var x_repr) {
  return tape.sigmoid(acquisition_logit(tape, p, h_prev, x_repr));
}

Var option_step(Tape& tape, const PolicyVars& p, Var x_repr, Var y_repr,
                Var o_last) {
  if (!y_repr.valid()) {
    throw ConfigError("option_step: the high-level observation is required");
  }
  if (!p.gru_opt) {
    throw ConfigError("option_step: discrete policies have no option GRU");
  }
  return nn::gru_step(tape, *p.gru_opt, tape.concat(x_repr, y_repr), o_last);
}

std::size_t sample_index(std::span<const double> probs, double u) {
  double cdf = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    cdf += probs[i];
    if (u < cdf) return i;
  }
  return probs.size() - 1;
}

OptionChoice select_option_discrete(Tape& tape, const PolicyVars& p,
                                    Var y_repr, Rng& rng) {
  if (!p.option_embeddings || p.shape.k_options == 0) {
    throw ConfigError("select_option_discrete: policy has no discrete options");
  }
  const Var probs = tape.softmax(tape.matvec(*p.option_embeddings, y_repr));
  const std::size_t index = sample_index(tape.value(probs), uniform01(rng));
  return {index, probs};
}

Var actor_step(Tape& tape, const PolicyVars& p, bool sigma, Var x_repr,
               Var h_prev, std::optional<Var> option) {
  if (sigma) {
    if (!option) throw ConfigError("actor_step: sigma = 1 without an option");
    return *option;
  }
  return nn::gru_step(tape, p.gru_act, x_repr, h_prev);
}

Var action_distribution(Tape& tape, const PolicyVars& p, Var h) {
  return tape.softmax(nn::linear(tape, p.f_act, h));
}

PolicyState initial_state(Tape& tape, const PolicyShape& shape) {
  const std::vector<double> zeros(shape.n_gru, 0.0);
  PolicyState s;
  s.o_last = tape.constant(zeros);
  s.h = tape.constant(zeros);
  s.t = 0;
  return s;
}

std::vector<double> low_level_input(std::span<const double> env_x,
                                    std::optional<std::size_t> previous_action,
                                    std::size_t n_actions) {
  std::vector<double> x(env_x.begin(), env_x.end());
  x.resize(env_x.size() + n_actions, 0.0);
  if (previous_action) x[env_x.size() + *previous_action] = 1.0;
  return x;
}

StepOutcome policy_step(Tape& tape, const PolicyVars& p,
                        const PolicyState& state, std::span<const double> x_raw,
                        const envs::Environment& env, Rng& rng,
                        const StepOptions& options) {
  StepTrace trace;
  const Var x_repr = represent_x(tape, p, tape.constant(x_raw));

  // Acquisition decision. Forced acquisitions are not sampled and carry no
  // log-probability term.
  const Var logit = acquisition_logit(tape, p, state.h, x_repr);
  const double z = tape.scalar(logit);
  trace.p_sigma = z >= 0 ? 1.0 / (1.0 + std::exp(-z))
                         : std::exp(z) / (1.0 + std::exp(z));
  if (options.force_full_obs) {
    trace.sigma = true;
  } else {
    const double u = uniform01(rng);
    trace.sigma = options.greedy ? trace.p_sigma > 0.5 : u < trace.p_sigma;
    trace.log_p_sigma = tape.log_bernoulli(logit, trace.sigma);
    if (options.track_entropy) {
      const Var prob = tape.sigmoid(logit);
      const Var one = tape.constant({1.0});
      trace.sigma_entropy =
          tape.entropy(tape.concat(tape.sub(one, prob), prob));
    }
  }

  PolicyState next = state;
  std::optional<Var> option;
  if (trace.sigma) {
    trace.acquired_y = true;
    const std::vector<double> y = env.high_level();
    const Var y_repr = represent_y(tape, p, tape.constant(y));
    if (p.shape.discrete()) {
      const OptionChoice choice = select_option_discrete(tape, p, y_repr, rng);
      trace.option_index = choice.index;
      trace.log_p_option = tape.pick_log_prob(choice.probs, choice.index);
      option = tape.row(*p.option_embeddings, choice.index);
    } else {
      Var o_last = state.o_last;
      if (!options.option_recurrent) {
        o_last = tape.constant(std::vector<double>(p.shape.n_gru, 0.0));
      }
      option = option_step(tape, p, x_repr, y_repr, o_last);
    }
    const auto snapshot = tape.value(*option);
    trace.option_snapshot.assign(snapshot.begin(), snapshot.end());
    next.o_last = *option;
  }
  next.h = actor_step(tape, p, trace.sigma, x_repr, state.h, option);
  next.t = state.t + 1;

  const Var dist = action_distribution(tape, p, next.h);
  const auto probs = tape.value(dist);
  const double u = uniform01(rng);
  trace.action =
      options.greedy
          ? static_cast<std::size_t>(std::max_element(probs.begin(), probs.end()) -
                                     probs.begin())
          : sample_index(probs, u);
  trace.log_p_action = tape.pick_log_prob(dist, trace.action);
  if (options.track_entropy) trace.action_entropy = tape.entropy(dist);
  trace.h = next.h;
  trace.o_last = next.o_last;
  trace.position = env.position();
  trace.goal_annotation = env.goal_annotation();
  return {trace.action, std::move(trace), next};
}

EpisodeTrace rollout(envs::Environment& env, PolicyParams& params,
                     const RolloutOptions& options, Rng& policy_rng,
                     Rng& env_rng, nn::GradientSet* sinks) {
  if (options.max_steps == 0) throw ConfigError("rollout: max_steps must be >= 1");
  const std::size_t expected_x = env.x_dim() + env.num_actions();
  if (params.shape.x_in != expected_x || params.shape.y_in != env.y_dim() ||
      params.shape.n_actions != env.num_actions()) {
    throw ConfigError("rollout: policy sizes (x " +
                      std::to_string(params.shape.x_in) + ", y " +
                      std::to_string(params.shape.y_in) + ", actions " +
                      std::to_string(params.shape.n_actions) +
                      ") do not match environment '" + env.name() + "'");
  }

  EpisodeTrace trace;
  trace.tape = std::make_shared<Tape>();
  Tape& tape = *trace.tape;
  Binder binder = sinks ? Binder(tape, *sinks) : Binder(tape);
  const PolicyVars vars = bind(binder, params);

  env.reset(env_rng);
  PolicyState state = initial_state(tape, params.shape);
  std::optional<std::size_t> previous;
  while (!env.done() && trace.steps.size() < options.max_steps) {
    const envs::DualObservation obs = env.observe();
    const auto x = low_level_input(obs.x, previous, env.num_actions());
    StepOutcome out =
        policy_step(tape, vars, state, x, env, policy_rng, options.step);
    const envs::StepResult result = env.step(out.action);
    out.trace.reward = result.reward;
    trace.total_reward += result.reward;
    trace.cost += out.trace.sigma ? 1 : 0;
    trace.steps.push_back(std::move(out.trace));
    state = out.state;
    previous = out.action;
  }
  trace.length = trace.steps.size();
  trace.goal_reached = env.goal_reached();
  trace.final_position = env.position();
  return trace;
}

}  // namespace bonn::policy
