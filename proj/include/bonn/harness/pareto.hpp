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
#include <vector>

namespace bonn::harness {

// One cost/reward point of a lambda sweep, averaged over seeds.
struct ParetoPoint {
  double lambda = 0.0;
  double obs_fraction = 0.0;  // cost axis, lower is better
  double mean_return = 0.0;   // reward axis, higher is better
  std::size_t seeds = 0;
};

// a dominates b: cost <= and reward >=, at least one strictly.
bool dominates(const ParetoPoint& a, const ParetoPoint& b);

// Indices of the non-dominated points, ordered by cost (input order on
// ties). Exact duplicates keep only their first occurrence.
std::vector<std::size_t> pareto_front(std::span<const ParetoPoint> points);

// Spearman rank correlation with average ranks for ties. Returns 0 when
// either side is constant.
double spearman(std::span<const double> x, std::span<const double> y);

}  // namespace bonn::harness
