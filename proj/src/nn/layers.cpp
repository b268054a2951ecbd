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

#include "bonn/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "bonn/error.hpp"

namespace bonn::nn {

namespace {

Tensor uniform_matrix(std::size_t rows, std::size_t cols, std::size_t fan_in,
                      Rng& rng) {
  Tensor t({rows, cols});
  const double bound =
      1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
  for (double& v : t.values()) v = uniform(rng, -bound, bound);
  return t;
}

}  // namespace

LinearParams linear_init(std::size_t n_in, std::size_t n_out, Rng& rng) {
  if (n_out == 0) throw ConfigError("linear_init: n_out must be >= 1");
  return {uniform_matrix(n_out, n_in, n_in, rng), Tensor({n_out})};
}

GruParams gru_init(std::size_t n_in, std::size_t n_hidden, Rng& rng) {
  if (n_hidden == 0) throw ConfigError("gru_init: n_hidden must be >= 1");
  GruParams p;
  p.w_z = uniform_matrix(n_hidden, n_in, n_in, rng);
  p.w_r = uniform_matrix(n_hidden, n_in, n_in, rng);
  p.w_h = uniform_matrix(n_hidden, n_in, n_in, rng);
  p.u_z = uniform_matrix(n_hidden, n_hidden, n_hidden, rng);
  p.u_r = uniform_matrix(n_hidden, n_hidden, n_hidden, rng);
  p.u_h = uniform_matrix(n_hidden, n_hidden, n_hidden, rng);
  p.b_z = Tensor({n_hidden});
  p.b_r = Tensor({n_hidden});
  p.b_h = Tensor({n_hidden});
  return p;
}

void append_blocks(std::vector<NamedTensor>& out, const std::string& prefix,
                   LinearParams& p) {
  out.push_back({prefix + ".w", &p.w});
  out.push_back({prefix + ".b", &p.b});
}

void append_blocks(std::vector<NamedTensor>& out, const std::string& prefix,
                   GruParams& p) {
  out.push_back({prefix + ".w_z", &p.w_z});
  out.push_back({prefix + ".w_r", &p.w_r});
  out.push_back({prefix + ".w_h", &p.w_h});
  out.push_back({prefix + ".u_z", &p.u_z});
  out.push_back({prefix + ".u_r", &p.u_r});
  out.push_back({prefix + ".u_h", &p.u_h});
  out.push_back({prefix + ".b_z", &p.b_z});
  out.push_back({prefix + ".b_r", &p.b_r});
  out.push_back({prefix + ".b_h", &p.b_h});
}

GradientSet GradientSet::shaped_like(std::span<const NamedTensor> blocks) {
  GradientSet set;
  set.buffers.reserve(blocks.size());
  for (const auto& b : blocks) set.buffers.emplace_back(b.tensor->size(), 0.0);
  return set;
}

void GradientSet::zero() {
  for (auto& buf : buffers) std::fill(buf.begin(), buf.end(), 0.0);
}

void GradientSet::add(const GradientSet& other) {
  if (other.buffers.size() != buffers.size()) {
    throw ShapeError("GradientSet::add: block count mismatch");
  }
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    auto& dst = buffers[i];
    const auto& src = other.buffers[i];
    if (src.size() != dst.size()) {
      throw ShapeError("GradientSet::add: block " + std::to_string(i) +
                       " size mismatch");
    }
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
  }
}

Var Binder::operator()(Tensor& t) {
  if (!sinks_) return tape_.parameter(t);
  if (next_ >= sinks_->buffers.size()) {
    throw ShapeError("Binder: more tensors bound than gradient buffers");
  }
  return tape_.parameter(t, sinks_->buffers[next_++]);
}

LinearVars bind(Binder& binder, LinearParams& p) {
  LinearVars v;
  v.w = binder(p.w);
  v.b = binder(p.b);
  return v;
}

GruVars bind(Binder& binder, GruParams& p) {
  GruVars v;
  v.w_z = binder(p.w_z);
  v.w_r = binder(p.w_r);
  v.w_h = binder(p.w_h);
  v.u_z = binder(p.u_z);
  v.u_r = binder(p.u_r);
  v.u_h = binder(p.u_h);
  v.b_z = binder(p.b_z);
  v.b_r = binder(p.b_r);
  v.b_h = binder(p.b_h);
  return v;
}

Var linear(Tape& tape, const LinearVars& p, Var x) {
  return tape.affine(p.w, p.b, x);
}

Var gru_step(Tape& tape, const GruVars& p, Var input, Var h_prev) {
  const Var z = tape.sigmoid(
      tape.add(tape.affine(p.w_z, p.b_z, input), tape.matvec(p.u_z, h_prev)));
  const Var r = tape.sigmoid(
      tape.add(tape.affine(p.w_r, p.b_r, input), tape.matvec(p.u_r, h_prev)));
  const Var candidate =
      tape.tanh(tape.add(tape.affine(p.w_h, p.b_h, input),
                         tape.matvec(p.u_h, tape.mul(r, h_prev))));
  // (1 - z) * h + z * c, written as h + z * (c - h).
  return tape.add(h_prev, tape.mul(z, tape.sub(candidate, h_prev)));
}

}  // namespace bonn::nn
