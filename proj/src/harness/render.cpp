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

#include "bonn/harness/render.hpp"

#include <sstream>
#include <vector>

#include "bonn/error.hpp"

namespace bonn::harness {

namespace {

constexpr int kCell = 24;

double centre(int index) { return (index + 0.5) * kCell; }

void point(std::ostringstream& out, envs::Cell c) {
  out << centre(c.col) << ',' << centre(c.row);
}

void polyline(std::ostringstream& out, const std::vector<envs::Cell>& cells,
              const char* color) {
  out << "  <polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"3\" stroke-linejoin=\"round\" points=\"";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ' ';
    point(out, cells[i]);
  }
  out << "\"/>\n";
}

}  // namespace

std::string render_trajectory_svg(const TraceRecord& trace,
                                  const envs::GridGeometry& geometry) {
  if (trace.steps.empty() || !trace.steps.front().pos) {
    throw ConfigError(
        "render: trace has no grid positions (unsupported environment)");
  }
  std::vector<envs::Cell> path;
  for (const auto& s : trace.steps) {
    if (!s.pos) throw ConfigError("render: step without a grid position");
    path.push_back(*s.pos);
  }
  if (trace.final_pos) path.push_back(*trace.final_pos);

  const int width = geometry.cols * kCell;
  const int height = geometry.rows * kCell;
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n"
      << "  <rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\""
      << height << "\" fill=\"white\"/>\n";

  // Each wall cell joins its right and lower wall neighbours; isolated
  // cells become zero-length lines that the round caps turn into dots.
  out << "  <g stroke=\"black\" stroke-width=\"" << kCell / 2
      << "\" stroke-linecap=\"round\">\n";
  for (int r = 0; r < geometry.rows; ++r) {
    for (int c = 0; c < geometry.cols; ++c) {
      const envs::Cell cell{r, c};
      if (!geometry.is_wall(cell)) continue;
      bool joined = false;
      for (const envs::Cell next : {envs::Cell{r, c + 1}, envs::Cell{r + 1, c}}) {
        if (next.row >= geometry.rows || next.col >= geometry.cols) continue;
        if (!geometry.is_wall(next)) continue;
        out << "    <line x1=\"" << centre(c) << "\" y1=\"" << centre(r)
            << "\" x2=\"" << centre(next.col) << "\" y2=\"" << centre(next.row)
            << "\"/>\n";
        joined = true;
      }
      if (!joined) {
        out << "    <line x1=\"" << centre(c) << "\" y1=\"" << centre(r)
            << "\" x2=\"" << centre(c) << "\" y2=\"" << centre(r) << "\"/>\n";
      }
    }
  }
  out << "  </g>\n";

  const double half = kCell * 0.35;
  auto square = [&](envs::Cell c, const char* color) {
    out << "  <rect x=\"" << centre(c.col) - half << "\" y=\""
        << centre(c.row) - half << "\" width=\"" << 2 * half
        << "\" height=\"" << 2 * half << "\" fill=\"" << color
        << "\" fill-opacity=\"0.5\"/>\n";
  };
  square(path.front(), "#888888");
  if (geometry.goal) square(*geometry.goal, "#ffd700");

  if (!trace.discrete) {
    polyline(out, path, "#1f77b4");
  } else {
    // Segment t -> t+1 takes the option active at step t; runs of the same
    // option share one polyline.
    std::optional<std::size_t> active;
    std::vector<envs::Cell> run;
    std::optional<std::size_t> run_option;
    auto flush = [&] {
      if (run.size() >= 2) {
        polyline(out, run,
                 run_option ? kOptionPalette[*run_option % 9] : "#000000");
      }
    };
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
      if (trace.steps[t].option) active = trace.steps[t].option;
      if (run.empty() || active != run_option) {
        flush();
        run = {path[t]};
        run_option = active;
      }
      run.push_back(path[t + 1]);
    }
    flush();
  }

  for (const auto& s : trace.steps) {
    if (!s.sigma) continue;
    const char* color = trace.discrete && s.option
                            ? kOptionPalette[*s.option % 9]
                            : "#d62728";
    out << "  <circle cx=\"" << centre(s.pos->col) << "\" cy=\""
        << centre(s.pos->row) << "\" r=\"" << kCell / 4 << "\" fill=\""
        << color << "\" stroke=\"black\"/>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace bonn::harness
