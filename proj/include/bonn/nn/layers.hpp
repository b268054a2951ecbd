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
#include <span>
#include <string>
#include <vector>

#include "bonn/diffcore/tape.hpp"
#include "bonn/diffcore/tensor.hpp"
#include "bonn/random.hpp"

namespace bonn::nn {

using diff::Tape;
using diff::Tensor;
using diff::Var;

// A learned tensor with the stable name used for serialization.
struct NamedTensor {
  std::string name;
  Tensor* tensor;
};

// y = W x + b
struct LinearParams {
  Tensor w;  // [out x in]
  Tensor b;  // [out]

  std::size_t n_in() const { return w.cols(); }
  std::size_t n_out() const { return w.rows(); }
};

// GRU cell weights. Input matrices are [hidden x in], recurrent matrices
// [hidden x hidden], biases [hidden].
struct GruParams {
  Tensor w_z, w_r, w_h;
  Tensor u_z, u_r, u_h;
  Tensor b_z, b_r, b_h;

  std::size_t n_in() const { return w_z.cols(); }
  std::size_t n_hidden() const { return w_z.rows(); }
};

// W uniform in +-1/sqrt(max(n_in, 1)), b = 0.
LinearParams linear_init(std::size_t n_in, std::size_t n_out, Rng& rng);
// Same scheme for all nine tensors; recurrent matrices use fan-in n_hidden.
GruParams gru_init(std::size_t n_in, std::size_t n_hidden, Rng& rng);

void append_blocks(std::vector<NamedTensor>& out, const std::string& prefix,
                   LinearParams& p);
void append_blocks(std::vector<NamedTensor>& out, const std::string& prefix,
                   GruParams& p);

// Per-episode gradient buffers, one per parameter block, in block order.
struct GradientSet {
  std::vector<std::vector<double>> buffers;

  static GradientSet shaped_like(std::span<const NamedTensor> blocks);
  void zero();
  // this += other, block by block in order.
  void add(const GradientSet& other);
};

// Puts parameter tensors on a tape. Without a GradientSet gradients land in
// each tensor's own grad buffer; with one, the i-th bound tensor writes to
// buffers[i], so tensors must be bound in block order.
class Binder {
 public:
  explicit Binder(Tape& tape) : tape_(tape) {}
  Binder(Tape& tape, GradientSet& sinks) : tape_(tape), sinks_(&sinks) {}

  Var operator()(Tensor& t);
  Tape& tape() { return tape_; }

 private:
  Tape& tape_;
  GradientSet* sinks_ = nullptr;
  std::size_t next_ = 0;
};

struct LinearVars {
  Var w, b;
};

struct GruVars {
  Var w_z, w_r, w_h;
  Var u_z, u_r, u_h;
  Var b_z, b_r, b_h;
};

// Bind order matches append_blocks.
LinearVars bind(Binder& binder, LinearParams& p);
GruVars bind(Binder& binder, GruParams& p);

Var linear(Tape& tape, const LinearVars& p, Var x);

// z = sigmoid(W_z x + U_z h + b_z)
// r = sigmoid(W_r x + U_r h + b_r)
// c = tanh(W_h x + U_h (r * h) + b_h)
// h' = (1 - z) * h + z * c
Var gru_step(Tape& tape, const GruVars& p, Var input, Var h_prev);

}  // namespace bonn::nn
