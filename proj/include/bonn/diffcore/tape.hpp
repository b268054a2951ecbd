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
#include <string_view>
#include <vector>

#include "bonn/diffcore/tensor.hpp"

namespace bonn::diff {

// Handle to a node on a Tape. Only meaningful for the tape that issued it.
struct Var {
  std::uint32_t id = kInvalid;

  static constexpr std::uint32_t kInvalid = 0xffffffffu;
  bool valid() const { return id != kInvalid; }
  bool operator==(const Var&) const = default;
};

enum class Activation { kSigmoid, kTanh, kRelu };

// Parses "sigmoid" / "tanh" / "relu"; throws ConfigError otherwise.
Activation parse_activation(std::string_view name);

// Define-by-run reverse-mode differentiation tape.
//
// Every operation appends one node whose forward value is computed
// immediately. Node values and gradients live in two flat arenas, so spans
// returned by value()/grad() are invalidated by the next appended node.
// Nodes are appended in topological order by construction and backward()
// walks them once in reverse.
//
// Parameters enter through parameter(); their tape gradient is added into a
// caller-provided sink (by default the Tensor's own grad buffer) at the end
// of each backward() call, so repeated calls accumulate.
class Tape {
 public:
  Tape();

  Var constant(std::span<const double> values);
  Var constant(std::initializer_list<double> values) {
    return constant(std::span<const double>(values.begin(), values.size()));
  }
  Var constant_matrix(std::size_t rows, std::size_t cols,
                      std::span<const double> values);

  // Leaf whose gradient is added to t.grad() by backward().
  Var parameter(Tensor& t);
  // Leaf reading t's values, with gradients added to `grad_sink` instead.
  // The sink must hold t.size() doubles and outlive the backward() call.
  Var parameter(const Tensor& t, std::span<double> grad_sink);

  // W[m x n] * x[n] + b[m]
  Var affine(Var w, Var b, Var x);
  // W[m x n] * x[n]
  Var matvec(Var w, Var x);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var x, double factor);
  Var activation(Activation kind, Var x);
  Var sigmoid(Var x) { return activation(Activation::kSigmoid, x); }
  Var tanh(Var x) { return activation(Activation::kTanh, x); }
  Var relu(Var x) { return activation(Activation::kRelu, x); }
  Var softmax(Var x);
  Var concat(Var a, Var b);
  // log(dist[index]); throws when index is out of range or dist[index] <= 0.
  Var pick_log_prob(Var dist, std::size_t index);
  // log P(outcome) for a Bernoulli with P(1) = sigmoid(logit), computed in
  // the numerically stable log-sigmoid form.
  Var log_bernoulli(Var logit, bool outcome);
  // Row `index` of a matrix node, as a vector.
  Var row(Var matrix, std::size_t index);
  // -sum_i p_i log p_i over a probability vector.
  Var entropy(Var dist);
  // sum_k weights[k] * scalars[k]; every input must be scalar.
  Var weighted_sum(std::span<const Var> scalars,
                   std::span<const double> weights);

  // Reverse pass from a scalar node. Node gradients are recomputed from
  // scratch, then parameter gradients are added into their sinks.
  void backward(Var loss);

  std::span<const double> value(Var v) const;
  std::span<const double> grad(Var v) const;
  double scalar(Var v) const;
  std::size_t size(Var v) const;
  std::vector<std::size_t> shape(Var v) const;
  bool is_vector(Var v) const;
  std::size_t node_count() const { return nodes_.size(); }

 private:
  enum class Op : std::uint8_t {
    kConstant,
    kParameter,
    kAffine,
    kMatVec,
    kAdd,
    kSub,
    kMul,
    kScale,
    kSigmoid,
    kTanh,
    kRelu,
    kSoftmax,
    kConcat,
    kPickLogProb,
    kLogBernoulli,
    kRow,
    kEntropy,
    kWeightedSum,
  };

  struct Node {
    Op op;
    bool needs_grad;
    std::uint8_t rank;
    std::uint32_t a, b, c;
    std::uint32_t rows, cols;
    std::size_t offset;
    double aux;
  };

  struct Sink {
    std::uint32_t node;
    double* grad;
  };

  Var push(Op op, std::uint8_t rank, std::uint32_t rows, std::uint32_t cols,
           bool needs_grad, std::uint32_t a = Var::kInvalid,
           std::uint32_t b = Var::kInvalid, std::uint32_t c = Var::kInvalid,
           double aux = 0.0);
  const Node& node(Var v) const;
  double* val(std::uint32_t id) { return values_.data() + nodes_[id].offset; }
  double* gr(std::uint32_t id) { return grads_.data() + nodes_[id].offset; }
  std::size_t count(const Node& n) const {
    return n.rank == 2 ? std::size_t{n.rows} * n.cols : n.rows;
  }
  void require_vector(Var v, std::string_view op) const;
  void backward_node(std::uint32_t id);

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<Sink> sinks_;
  // Operand lists and weights for weighted_sum nodes.
  std::vector<std::uint32_t> list_ids_;
  std::vector<double> list_weights_;
};

}  // namespace bonn::diff
