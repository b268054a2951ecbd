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

#include "bonn/diffcore/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bonn/error.hpp"

namespace bonn::diff {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow or cancellation.
double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "tanh") return Activation::kTanh;
  if (name == "relu") return Activation::kRelu;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Tape::Tape() {
  nodes_.reserve(256);
  values_.reserve(4096);
}

Var Tape::push(Op op, std::uint8_t rank, std::uint32_t rows,
               std::uint32_t cols, bool needs_grad, std::uint32_t a,
               std::uint32_t b, std::uint32_t c, double aux) {
  Node n{op, needs_grad, rank, a, b, c, rows, cols, values_.size(), aux};
  values_.resize(values_.size() + count(n));
  nodes_.push_back(n);
  return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) {
    throw Error("variable " + std::to_string(v.id) + " is not on this tape");
  }
  return nodes_[v.id];
}

void Tape::require_vector(Var v, std::string_view op) const {
  if (node(v).rank != 1) {
    throw ShapeError(std::string(op) + ": expected a vector, got shape " +
                     shape_string(shape(v)));
  }
}

std::span<const double> Tape::value(Var v) const {
  const Node& n = node(v);
  return {values_.data() + n.offset, count(n)};
}

std::span<const double> Tape::grad(Var v) const {
  const Node& n = node(v);
  if (grads_.size() < values_.size()) {
    throw Error("grad() requested before backward()");
  }
  return {grads_.data() + n.offset, count(n)};
}

double Tape::scalar(Var v) const {
  const auto vals = value(v);
  if (vals.size() != 1) {
    throw ShapeError("expected a scalar, got shape " + shape_string(shape(v)));
  }
  return vals[0];
}

std::size_t Tape::size(Var v) const { return count(node(v)); }

std::vector<std::size_t> Tape::shape(Var v) const {
  const Node& n = node(v);
  if (n.rank == 2) return {n.rows, n.cols};
  return {n.rows};
}

bool Tape::is_vector(Var v) const { return node(v).rank == 1; }

Var Tape::constant(std::span<const double> values) {
  const Var v = push(Op::kConstant, 1,
                     static_cast<std::uint32_t>(values.size()), 1, false);
  std::copy(values.begin(), values.end(), val(v.id));
  return v;
}

Var Tape::constant_matrix(std::size_t rows, std::size_t cols,
                          std::span<const double> values) {
  if (rows * cols != values.size()) {
    throw ShapeError("constant_matrix: " + std::to_string(rows) + "x" +
                     std::to_string(cols) + " does not hold " +
                     std::to_string(values.size()) + " values");
  }
  const Var v = push(Op::kConstant, 2, static_cast<std::uint32_t>(rows),
                     static_cast<std::uint32_t>(cols), false);
  std::copy(values.begin(), values.end(), val(v.id));
  return v;
}

Var Tape::parameter(Tensor& t) { return parameter(t, t.grad()); }

Var Tape::parameter(const Tensor& t, std::span<double> grad_sink) {
  if (grad_sink.size() != t.size()) {
    throw ShapeError("parameter: gradient sink holds " +
                     std::to_string(grad_sink.size()) + " values, tensor " +
                     shape_string(t.shape()));
  }
  const Var v = push(Op::kParameter, static_cast<std::uint8_t>(t.rank()),
                     static_cast<std::uint32_t>(t.rows()),
                     static_cast<std::uint32_t>(t.cols()), true);
  std::copy(t.values().begin(), t.values().end(), val(v.id));
  sinks_.push_back({v.id, grad_sink.data()});
  return v;
}

Var Tape::matvec(Var w, Var x) {
  const Node& nw = node(w);
  require_vector(x, "matvec");
  if (nw.rank != 2 || nw.cols != node(x).rows) {
    throw ShapeError("matvec: weight " + shape_string(shape(w)) +
                     " does not conform with input " +
                     shape_string(shape(x)));
  }
  const std::uint32_t m = nw.rows, n = nw.cols;
  const Var out = push(Op::kMatVec, 1, m, 1,
                       nw.needs_grad || node(x).needs_grad, w.id, x.id);
  const double* W = val(w.id);
  const double* X = val(x.id);
  double* y = val(out.id);
  for (std::uint32_t i = 0; i < m; ++i) {
    double s = 0.0;
    const double* row = W + std::size_t{i} * n;
    for (std::uint32_t j = 0; j < n; ++j) s += row[j] * X[j];
    y[i] = s;
  }
  return out;
}

Var Tape::affine(Var w, Var b, Var x) {
  const Node& nw = node(w);
  require_vector(x, "affine");
  require_vector(b, "affine");
  if (nw.rank != 2 || nw.cols != node(x).rows || nw.rows != node(b).rows) {
    throw ShapeError("affine: weight " + shape_string(shape(w)) + ", bias " +
                     shape_string(shape(b)) + " and input " +
                     shape_string(shape(x)) + " do not conform");
  }
  const std::uint32_t m = nw.rows, n = nw.cols;
  const bool g =
      nw.needs_grad || node(b).needs_grad || node(x).needs_grad;
  const Var out = push(Op::kAffine, 1, m, 1, g, w.id, b.id, x.id);
  const double* W = val(w.id);
  const double* B = val(b.id);
  const double* X = val(x.id);
  double* y = val(out.id);
  for (std::uint32_t i = 0; i < m; ++i) {
    double s = B[i];
    const double* row = W + std::size_t{i} * n;
    for (std::uint32_t j = 0; j < n; ++j) s += row[j] * X[j];
    y[i] = s;
  }
  return out;
}

Var Tape::add(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (na.rank != nb.rank || na.rows != nb.rows || na.cols != nb.cols) {
    throw ShapeError("add: shapes " + shape_string(shape(a)) + " and " +
                     shape_string(shape(b)) + " differ");
  }
  const Var out = push(Op::kAdd, na.rank, na.rows, na.cols,
                       na.needs_grad || nb.needs_grad, a.id, b.id);
  const std::size_t n = size(out);
  const double* A = val(a.id);
  const double* B = val(b.id);
  double* y = val(out.id);
  for (std::size_t i = 0; i < n; ++i) y[i] = A[i] + B[i];
  return out;
}

Var Tape::sub(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (na.rank != nb.rank || na.rows != nb.rows || na.cols != nb.cols) {
    throw ShapeError("sub: shapes " + shape_string(shape(a)) + " and " +
                     shape_string(shape(b)) + " differ");
  }
  const Var out = push(Op::kSub, na.rank, na.rows, na.cols,
                       na.needs_grad || nb.needs_grad, a.id, b.id);
  const std::size_t n = size(out);
  const double* A = val(a.id);
  const double* B = val(b.id);
  double* y = val(out.id);
  for (std::size_t i = 0; i < n; ++i) y[i] = A[i] - B[i];
  return out;
}

Var Tape::mul(Var a, Var b) {
  const Node& na = node(a);
  const Node& nb = node(b);
  if (na.rank != nb.rank || na.rows != nb.rows || na.cols != nb.cols) {
    throw ShapeError("mul: shapes " + shape_string(shape(a)) + " and " +
                     shape_string(shape(b)) + " differ");
  }
  const Var out = push(Op::kMul, na.rank, na.rows, na.cols,
                       na.needs_grad || nb.needs_grad, a.id, b.id);
  const std::size_t n = size(out);
  const double* A = val(a.id);
  const double* B = val(b.id);
  double* y = val(out.id);
  for (std::size_t i = 0; i < n; ++i) y[i] = A[i] * B[i];
  return out;
}

Var Tape::scale(Var x, double factor) {
  const Node& nx = node(x);
  const Var out = push(Op::kScale, nx.rank, nx.rows, nx.cols, nx.needs_grad,
                       x.id, Var::kInvalid, Var::kInvalid, factor);
  const std::size_t n = size(out);
  const double* X = val(x.id);
  double* y = val(out.id);
  for (std::size_t i = 0; i < n; ++i) y[i] = factor * X[i];
  return out;
}

Var Tape::activation(Activation kind, Var x) {
  const Node& nx = node(x);
  Op op = Op::kSigmoid;
  switch (kind) {
    case Activation::kSigmoid: op = Op::kSigmoid; break;
    case Activation::kTanh: op = Op::kTanh; break;
    case Activation::kRelu: op = Op::kRelu; break;
    default: throw ConfigError("unknown activation kind");
  }
  const Var out = push(op, nx.rank, nx.rows, nx.cols, nx.needs_grad, x.id);
  const std::size_t n = size(out);
  const double* X = val(x.id);
  double* y = val(out.id);
  switch (op) {
    case Op::kSigmoid:
      for (std::size_t i = 0; i < n; ++i) y[i] = stable_sigmoid(X[i]);
      break;
    case Op::kTanh:
      for (std::size_t i = 0; i < n; ++i) y[i] = std::tanh(X[i]);
      break;
    default:
      for (std::size_t i = 0; i < n; ++i) y[i] = X[i] > 0.0 ? X[i] : 0.0;
      break;
  }
  return out;
}

Var Tape::softmax(Var x) {
  require_vector(x, "softmax");
  const Node& nx = node(x);
  if (nx.rows == 0) throw ShapeError("softmax: empty input");
  const Var out = push(Op::kSoftmax, 1, nx.rows, 1, nx.needs_grad, x.id);
  const std::size_t n = size(out);
  const double* X = val(x.id);
  double* y = val(out.id);
  const double mx = *std::max_element(X, X + n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = std::exp(X[i] - mx);
    total += y[i];
  }
  for (std::size_t i = 0; i < n; ++i) y[i] /= total;
  return out;
}

Var Tape::concat(Var a, Var b) {
  require_vector(a, "concat");
  require_vector(b, "concat");
  const Node& na = node(a);
  const Node& nb = node(b);
  const Var out = push(Op::kConcat, 1, na.rows + nb.rows, 1,
                       na.needs_grad || nb.needs_grad, a.id, b.id);
  const std::size_t n_a = nodes_[a.id].rows;
  const std::size_t n_b = nodes_[b.id].rows;
  std::copy_n(val(a.id), n_a, val(out.id));
  std::copy_n(val(b.id), n_b, val(out.id) + n_a);
  return out;
}

Var Tape::pick_log_prob(Var dist, std::size_t index) {
  require_vector(dist, "pick_log_prob");
  const Node& nd = node(dist);
  if (index >= nd.rows) {
    throw ShapeError("pick_log_prob: index " + std::to_string(index) +
                     " out of range for distribution of size " +
                     std::to_string(nd.rows));
  }
  const double p = val(dist.id)[index];
  if (!(p > 0.0)) {
    throw NumericError("pick_log_prob: probability of index " +
                       std::to_string(index) + " is " + std::to_string(p));
  }
  const Var out = push(Op::kPickLogProb, 1, 1, 1, nd.needs_grad, dist.id,
                       Var::kInvalid, Var::kInvalid,
                       static_cast<double>(index));
  val(out.id)[0] = std::log(p);
  return out;
}

Var Tape::log_bernoulli(Var logit, bool outcome) {
  const Node& nl = node(logit);
  if (count(nl) != 1) {
    throw ShapeError("log_bernoulli: logit must be scalar, got " +
                     shape_string(shape(logit)));
  }
  const Var out = push(Op::kLogBernoulli, 1, 1, 1, nl.needs_grad, logit.id,
                       Var::kInvalid, Var::kInvalid, outcome ? 1.0 : 0.0);
  const double z = val(logit.id)[0];
  val(out.id)[0] = outcome ? log_sigmoid(z) : log_sigmoid(-z);
  return out;
}

Var Tape::row(Var matrix, std::size_t index) {
  const Node& nm = node(matrix);
  if (nm.rank != 2) {
    throw ShapeError("row: expected a matrix, got " +
                     shape_string(shape(matrix)));
  }
  if (index >= nm.rows) {
    throw ShapeError("row: index " + std::to_string(index) +
                     " out of range for " + shape_string(shape(matrix)));
  }
  const std::uint32_t cols = nm.cols;
  const Var out = push(Op::kRow, 1, cols, 1, nm.needs_grad, matrix.id,
                       Var::kInvalid, Var::kInvalid,
                       static_cast<double>(index));
  std::copy_n(val(matrix.id) + index * cols, cols, val(out.id));
  return out;
}

Var Tape::entropy(Var dist) {
  require_vector(dist, "entropy");
  const Node& nd = node(dist);
  const Var out = push(Op::kEntropy, 1, 1, 1, nd.needs_grad, dist.id);
  const std::size_t n = nodes_[dist.id].rows;
  const double* p = val(dist.id);
  double h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
  }
  val(out.id)[0] = h;
  return out;
}

Var Tape::weighted_sum(std::span<const Var> scalars,
                       std::span<const double> weights) {
  if (scalars.size() != weights.size()) {
    throw ShapeError("weighted_sum: " + std::to_string(scalars.size()) +
                     " inputs but " + std::to_string(weights.size()) +
                     " weights");
  }
  bool g = false;
  double total = 0.0;
  const auto first = static_cast<std::uint32_t>(list_ids_.size());
  for (std::size_t k = 0; k < scalars.size(); ++k) {
    const Node& n = node(scalars[k]);
    if (count(n) != 1) {
      throw ShapeError("weighted_sum: input " + std::to_string(k) +
                       " has shape " + shape_string(shape(scalars[k])));
    }
    g = g || n.needs_grad;
    total += weights[k] * values_[n.offset];
    list_ids_.push_back(scalars[k].id);
    list_weights_.push_back(weights[k]);
  }
  const Var out =
      push(Op::kWeightedSum, 1, 1, 1, g, first,
           static_cast<std::uint32_t>(scalars.size()));
  val(out.id)[0] = total;
  return out;
}

void Tape::backward(Var loss) {
  const Node& nl = node(loss);
  if (count(nl) != 1) {
    throw ShapeError("backward: loss must be scalar, got shape " +
                     shape_string(shape(loss)));
  }
  grads_.assign(values_.size(), 0.0);
  gr(loss.id)[0] = 1.0;
  for (std::uint32_t id = loss.id + 1; id-- > 0;) {
    if (nodes_[id].needs_grad) backward_node(id);
  }
  for (const Sink& s : sinks_) {
    const std::size_t n = count(nodes_[s.node]);
    const double* g = gr(s.node);
    for (std::size_t i = 0; i < n; ++i) s.grad[i] += g[i];
  }
}

void Tape::backward_node(std::uint32_t id) {
  const Node& n = nodes_[id];
  const double* g = gr(id);
  const double* y = val(id);
  const std::size_t len = count(n);
  auto wants = [&](std::uint32_t input) {
    return input != Var::kInvalid && nodes_[input].needs_grad;
  };

  switch (n.op) {
    case Op::kConstant:
    case Op::kParameter:
      break;
    case Op::kAffine:
    case Op::kMatVec: {
      const std::uint32_t w = n.a;
      const std::uint32_t x = n.op == Op::kAffine ? n.c : n.b;
      const std::uint32_t m = nodes_[w].rows, cols = nodes_[w].cols;
      const double* W = val(w);
      const double* X = val(x);
      if (wants(w)) {
        double* gW = gr(w);
        for (std::uint32_t i = 0; i < m; ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          double* row = gW + std::size_t{i} * cols;
          for (std::uint32_t j = 0; j < cols; ++j) row[j] += gi * X[j];
        }
      }
      if (n.op == Op::kAffine && wants(n.b)) {
        double* gb = gr(n.b);
        for (std::uint32_t i = 0; i < m; ++i) gb[i] += g[i];
      }
      if (wants(x)) {
        double* gx = gr(x);
        for (std::uint32_t i = 0; i < m; ++i) {
          const double gi = g[i];
          if (gi == 0.0) continue;
          const double* row = W + std::size_t{i} * cols;
          for (std::uint32_t j = 0; j < cols; ++j) gx[j] += gi * row[j];
        }
      }
      break;
    }
    case Op::kAdd:
      if (wants(n.a)) {
        double* ga = gr(n.a);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i];
      }
      if (wants(n.b)) {
        double* gb = gr(n.b);
        for (std::size_t i = 0; i < len; ++i) gb[i] += g[i];
      }
      break;
    case Op::kSub:
      if (wants(n.a)) {
        double* ga = gr(n.a);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i];
      }
      if (wants(n.b)) {
        double* gb = gr(n.b);
        for (std::size_t i = 0; i < len; ++i) gb[i] -= g[i];
      }
      break;
    case Op::kMul: {
      const double* A = val(n.a);
      const double* B = val(n.b);
      if (wants(n.a)) {
        double* ga = gr(n.a);
        for (std::size_t i = 0; i < len; ++i) ga[i] += g[i] * B[i];
      }
      if (wants(n.b)) {
        double* gb = gr(n.b);
        for (std::size_t i = 0; i < len; ++i) gb[i] += g[i] * A[i];
      }
      break;
    }
    case Op::kScale: {
      double* gx = gr(n.a);
      for (std::size_t i = 0; i < len; ++i) gx[i] += n.aux * g[i];
      break;
    }
    case Op::kSigmoid: {
      double* gx = gr(n.a);
      for (std::size_t i = 0; i < len; ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
      break;
    }
    case Op::kTanh: {
      double* gx = gr(n.a);
      for (std::size_t i = 0; i < len; ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
      break;
    }
    case Op::kRelu: {
      // Subgradient at exactly 0 is 0.
      const double* X = val(n.a);
      double* gx = gr(n.a);
      for (std::size_t i = 0; i < len; ++i) {
        if (X[i] > 0.0) gx[i] += g[i];
      }
      break;
    }
    case Op::kSoftmax: {
      double dot = 0.0;
      for (std::size_t i = 0; i < len; ++i) dot += g[i] * y[i];
      double* gx = gr(n.a);
      for (std::size_t i = 0; i < len; ++i) gx[i] += y[i] * (g[i] - dot);
      break;
    }
    case Op::kConcat: {
      const std::size_t n_a = nodes_[n.a].rows;
      if (wants(n.a)) {
        double* ga = gr(n.a);
        for (std::size_t i = 0; i < n_a; ++i) ga[i] += g[i];
      }
      if (wants(n.b)) {
        double* gb = gr(n.b);
        for (std::size_t i = n_a; i < len; ++i) gb[i - n_a] += g[i];
      }
      break;
    }
    case Op::kPickLogProb: {
      const auto index = static_cast<std::size_t>(n.aux);
      gr(n.a)[index] += g[0] / val(n.a)[index];
      break;
    }
    case Op::kLogBernoulli: {
      const double p = stable_sigmoid(val(n.a)[0]);
      gr(n.a)[0] += g[0] * (n.aux > 0.5 ? 1.0 - p : -p);
      break;
    }
    case Op::kRow: {
      const auto index = static_cast<std::size_t>(n.aux);
      double* gm = gr(n.a) + index * len;
      for (std::size_t i = 0; i < len; ++i) gm[i] += g[i];
      break;
    }
    case Op::kEntropy: {
      const std::size_t k = nodes_[n.a].rows;
      const double* p = val(n.a);
      double* gp = gr(n.a);
      for (std::size_t i = 0; i < k; ++i) {
        if (p[i] > 0.0) gp[i] -= g[0] * (std::log(p[i]) + 1.0);
      }
      break;
    }
    case Op::kWeightedSum: {
      for (std::uint32_t k = 0; k < n.b; ++k) {
        const std::uint32_t input = list_ids_[n.a + k];
        if (wants(input)) gr(input)[0] += g[0] * list_weights_[n.a + k];
      }
      break;
    }
  }
}

}  // namespace bonn::diff
