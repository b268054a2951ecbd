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
#include <span>
#include <vector>

#include "bonn/nn/layers.hpp"

namespace bonn::nn {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double clip_norm = 5.0;
};

struct AdamState {
  AdamOptions options;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::uint64_t t = 0;

  AdamState() = default;
  AdamState(AdamOptions opts, std::span<const NamedTensor> blocks);
};

// Global L2 norm over every block's gradient.
double global_grad_norm(std::span<const NamedTensor> blocks);

// Scales every gradient by clip_norm / norm when the global norm exceeds
// clip_norm. Returns the pre-clip norm.
double clip_gradients(std::span<const NamedTensor> blocks, double clip_norm);

// Clips the global gradient norm to options.clip_norm, applies one
// bias-corrected Adam update in block order, bumps t and zeroes the grads.
// Returns the pre-clip norm. Throws NumericError naming the first block
// holding a non-finite gradient, before touching any parameter.
double adam_step(AdamState& state, std::span<const NamedTensor> blocks);

}  // namespace bonn::nn
