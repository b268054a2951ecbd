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

#include <string>

#include "bonn/envs/environment.hpp"
#include "bonn/harness/artifacts.hpp"

namespace bonn::harness {

// Colors for discrete option indices; index i uses kOptionPalette[i % 9].
inline constexpr const char* kOptionPalette[9] = {
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00",
    "#a65628", "#f781bf", "#17becf", "#999999"};

// Standalone SVG of one grid episode: walls as round-capped lines, the path
// as a polyline (one polyline per option run in discrete mode), one filled
// circle per acquisition step, start and goal as squares.
// Throws ConfigError when the trace carries no positions.
std::string render_trajectory_svg(const TraceRecord& trace,
                                  const envs::GridGeometry& geometry);

}  // namespace bonn::harness
