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

#include "bonn/nn/adam.hpp"

#include <cmath>

#include "bonn/error.hpp"

namespace bonn::nn {

AdamState::AdamState(AdamOptions opts, std::span<const NamedTensor> blocks)
    : options(opts) {
  for (const auto& b : blocks) {
    m.emplace_back(b.tensor->size(), 0.0);
    v.emplace_back(b.tensor->size(), 0.0);
  }
}

double global_grad_norm(std::span<const NamedTensor> blocks) {
  double sq = 0.0;
  for (const auto& b : blocks) {
    for (double g : b.tensor->grad()) sq += g * g;
  }
  return std::sqrt(sq);
}

double clip_gradients(std::span<const NamedTensor> blocks, double clip_norm) {
  const double norm = global_grad_norm(blocks);
  if (norm > clip_norm) {
    const double factor = clip_norm / norm;
    for (const auto& b : blocks) {
      for (double& g : b.tensor->grad()) g *= factor;
    }
  }
  return norm;
}

double adam_step(AdamState& state, std::span<const NamedTensor> blocks) {
  if (state.m.size() != blocks.size()) {
    throw ShapeError("adam_step: optimizer tracks " +
                     std::to_string(state.m.size()) + " blocks, got " +
                     std::to_string(blocks.size()));
  }
  for (const auto& b : blocks) {
    for (double g : b.tensor->grad()) {
      if (!std::isfinite(g)) {
        throw NumericError("adam_step: non-finite gradient in block '" +
                           b.name + "'");
      }
    }
  }

  const AdamOptions& o = state.options;
  const double norm = clip_gradients(blocks, o.clip_norm);

  state.t += 1;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(o.beta1, t);
  const double correction2 = 1.0 - std::pow(o.beta2, t);

  for (std::size_t k = 0; k < blocks.size(); ++k) {
    Tensor& param = *blocks[k].tensor;
    auto values = param.values();
    auto grad = param.grad();
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad[i];
      m[i] = o.beta1 * m[i] + (1.0 - o.beta1) * g;
      v[i] = o.beta2 * v[i] + (1.0 - o.beta2) * g * g;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      values[i] -= o.learning_rate * m_hat / (std::sqrt(v_hat) + o.epsilon);
    }
    param.zero_grad();
  }
  return norm;
}

}  // namespace bonn::nn
