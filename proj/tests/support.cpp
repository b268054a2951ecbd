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

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

namespace bonn::testing {

double relative_error(double analytic, double numeric, double floor) {
  const double scale =
      std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / scale;
}

GradCheck check_gradients(std::vector<Tensor>& params, const LossBuilder& build,
                          double step) {
  for (auto& p : params) p.zero_grad();
  {
    Tape tape;
    std::vector<Var> vars;
    for (auto& p : params) vars.push_back(tape.parameter(p));
    tape.backward(build(tape, vars));
  }
  auto evaluate = [&] {
    Tape tape;
    std::vector<Var> vars;
    for (auto& p : params) vars.push_back(tape.parameter(p));
    return tape.scalar(build(tape, vars));
  };

  GradCheck result;
  for (std::size_t k = 0; k < params.size(); ++k) {
    auto values = params[k].values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double plus = evaluate();
      values[i] = saved - step;
      const double minus = evaluate();
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * step);
      const double analytic = params[k].grad()[i];
      const double err = relative_error(analytic, numeric);
      ++result.entries;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        std::ostringstream s;
        s << "param " << k << "[" << i << "] analytic=" << analytic
          << " numeric=" << numeric;
        result.worst = s.str();
      }
    }
  }
  return result;
}

namespace {

enum class Layer { kAffineTanh, kAffineSigmoid, kGru, kConcatAffine };

Tensor random_tensor(std::vector<std::size_t> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = uniform(rng, -1.0, 1.0);
  return t;
}

}  // namespace

RandomNetwork random_network(Rng& rng) {
  RandomNetwork net;
  const std::size_t depth = 1 + uniform_index(rng, 4);
  const std::size_t in = 1 + uniform_index(rng, 8);

  struct Spec {
    Layer kind;
    std::size_t first_param;
  };
  std::vector<Spec> specs;
  std::ostringstream desc;
  desc << "in=" << in;

  // Parameter 0 is the input, so input gradients are checked as well.
  net.params.push_back(random_tensor({in}, rng));
  std::size_t width = in;
  for (std::size_t d = 0; d < depth; ++d) {
    const auto kind = static_cast<Layer>(uniform_index(rng, 4));
    const std::size_t out = 1 + uniform_index(rng, 8);
    specs.push_back({kind, net.params.size()});
    switch (kind) {
      case Layer::kAffineTanh:
      case Layer::kAffineSigmoid:
        net.params.push_back(random_tensor({out, width}, rng));
        net.params.push_back(random_tensor({out}, rng));
        desc << (kind == Layer::kAffineTanh ? " tanh" : " sigmoid") << out;
        width = out;
        break;
      case Layer::kGru: {
        // Input matrices, recurrent matrices, biases, then h_prev.
        for (int i = 0; i < 3; ++i) net.params.push_back(random_tensor({out, width}, rng));
        for (int i = 0; i < 3; ++i) net.params.push_back(random_tensor({out, out}, rng));
        for (int i = 0; i < 3; ++i) net.params.push_back(random_tensor({out}, rng));
        net.params.push_back(random_tensor({out}, rng));
        desc << " gru" << out;
        width = out;
        break;
      }
      case Layer::kConcatAffine: {
        const std::size_t extra = uniform_index(rng, 4);
        net.params.push_back(random_tensor({extra == 0 ? 1 : extra}, rng));
        net.params.push_back(random_tensor({out, width + (extra == 0 ? 1 : extra)}, rng));
        net.params.push_back(random_tensor({out}, rng));
        desc << " concat+" << (extra == 0 ? 1 : extra) << "->" << out;
        width = out;
        break;
      }
    }
  }
  const std::size_t classes = 1 + uniform_index(rng, 8);
  net.params.push_back(random_tensor({classes, width}, rng));
  net.params.push_back(random_tensor({classes}, rng));
  const std::size_t target = uniform_index(rng, classes);
  desc << " softmax" << classes << " pick " << target;
  net.description = desc.str();

  net.build = [specs, target](Tape& tape, const std::vector<Var>& v) {
    Var h = v[0];
    for (const Spec& s : specs) {
      const std::size_t p = s.first_param;
      switch (s.kind) {
        case Layer::kAffineTanh:
          h = tape.tanh(tape.affine(v[p], v[p + 1], h));
          break;
        case Layer::kAffineSigmoid:
          h = tape.sigmoid(tape.affine(v[p], v[p + 1], h));
          break;
        case Layer::kGru: {
          const Var h_prev = v[p + 9];
          const Var z = tape.sigmoid(tape.add(
              tape.affine(v[p], v[p + 6], h), tape.matvec(v[p + 3], h_prev)));
          const Var r = tape.sigmoid(tape.add(
              tape.affine(v[p + 1], v[p + 7], h), tape.matvec(v[p + 4], h_prev)));
          const Var c = tape.tanh(
              tape.add(tape.affine(v[p + 2], v[p + 8], h),
                       tape.matvec(v[p + 5], tape.mul(r, h_prev))));
          h = tape.add(h_prev, tape.mul(z, tape.sub(c, h_prev)));
          break;
        }
        case Layer::kConcatAffine:
          h = tape.affine(v[p + 1], v[p + 2], tape.concat(h, v[p]));
          break;
      }
    }
    const std::size_t last = v.size() - 2;
    const Var dist = tape.softmax(tape.affine(v[last], v[last + 1], h));
    return tape.pick_log_prob(dist, target);
  };
  return net;
}

envs::StepResult BanditEnv::step(std::size_t action) {
  done_ = true;
  return {action == 0 ? 1.0 : 0.0, true};
}

policy::PolicyShape bandit_shape() {
  BanditEnv env;
  policy::PolicyShape s;
  s.x_in = env.x_dim() + env.num_actions();
  s.y_in = env.y_dim();
  s.n_actions = env.num_actions();
  s.n_x = 0;
  s.n_y = 0;
  s.n_gru = 2;
  return s;
}

std::vector<double> bandit_action_probs(policy::PolicyParams& params) {
  Tape tape;
  nn::Binder binder(tape);
  const auto p = policy::bind(binder, params);
  const auto state = policy::initial_state(tape, params.shape);
  const Var x = policy::represent_x(
      tape, p, tape.constant(std::vector<double>(params.shape.x_in, 0.0)));
  const double p_sigma =
      tape.scalar(policy::acquisition_probability(tape, p, state.h, x));
  const Var y = policy::represent_y(tape, p, tape.constant({1.0}));
  const Var o = policy::option_step(tape, p, x, y, state.o_last);
  const auto with = tape.value(policy::action_distribution(tape, p, o));
  const std::vector<double> acquire(with.begin(), with.end());
  const Var h = policy::actor_step(tape, p, false, x, state.h, std::nullopt);
  const auto without = tape.value(policy::action_distribution(tape, p, h));
  std::vector<double> out(acquire.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = p_sigma * acquire[i] + (1.0 - p_sigma) * without[i];
  }
  return out;
}

// Connected + acyclic: BFS reaches every open cell and there are exactly
// (open cells - 1) open adjacencies.
bool maze_is_perfect(const envs::Maze& m) {
  const auto cells = m.open_cells();
  if (cells.empty()) return false;
  std::size_t edges = 0;
  for (const envs::Cell c : cells) {
    if (m.is_open({c.row, c.col + 1})) ++edges;
    if (m.is_open({c.row + 1, c.col})) ++edges;
  }
  std::set<envs::Cell> seen{cells.front()};
  std::queue<envs::Cell> q;
  q.push(cells.front());
  while (!q.empty()) {
    const envs::Cell c = q.front();
    q.pop();
    for (std::size_t a = 0; a < 4; ++a) {
      const envs::Cell n = envs::move(c, a);
      if (m.is_open(n) && seen.insert(n).second) q.push(n);
    }
  }
  return seen.size() == cells.size() && edges + 1 == cells.size();
}

// Dijkstra with unit weights, written independently of the BFS oracle.
int maze_dijkstra(const envs::Maze& m, envs::Cell from, envs::Cell to) {
  std::vector<int> dist(m.wall.size(), std::numeric_limits<int>::max());
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  auto idx = [&](envs::Cell c) { return c.row * m.width + c.col; };
  dist[idx(from)] = 0;
  pq.push({0, idx(from)});
  while (!pq.empty()) {
    const auto [d, i] = pq.top();
    pq.pop();
    if (d > dist[i]) continue;
    const envs::Cell c{i / m.width, i % m.width};
    if (c == to) return d;
    for (const envs::Cell n :
         {envs::Cell{c.row - 1, c.col}, envs::Cell{c.row + 1, c.col},
          envs::Cell{c.row, c.col - 1}, envs::Cell{c.row, c.col + 1}}) {
      if (!m.is_open(n)) continue;
      if (d + 1 < dist[idx(n)]) {
        dist[idx(n)] = d + 1;
        pq.push({d + 1, idx(n)});
      }
    }
  }
  return -1;
}

std::vector<std::size_t> pareto_brute_force(
    std::span<const harness::ParetoPoint> p) {
  const std::size_t n = p.size();
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < n; ++i) {
    bool keep = true;
    for (std::size_t j = 0; j < n && keep; ++j) {
      if (j == i) continue;
      const bool dom = p[j].obs_fraction <= p[i].obs_fraction &&
                       p[j].mean_return >= p[i].mean_return &&
                       (p[j].obs_fraction < p[i].obs_fraction ||
                        p[j].mean_return > p[i].mean_return);
      const bool earlier_duplicate = j < i &&
                                     p[j].obs_fraction == p[i].obs_fraction &&
                                     p[j].mean_return == p[i].mean_return;
      keep = !dom && !earlier_duplicate;
    }
    if (keep) front.push_back(i);
  }
  std::stable_sort(front.begin(), front.end(), [&](auto a, auto b) {
    return p[a].obs_fraction < p[b].obs_fraction;
  });
  return front;
}

}  // namespace bonn::testing
