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
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bonn/envs/environment.hpp"
#include "bonn/harness/pareto.hpp"
#include "bonn/policy/policy.hpp"
#include "bonn/trainer/trainer.hpp"

namespace bonn::harness {

// Plain-data copy of an episode, independent of any tape. This is what
// traces.jsonl stores, one object per line:
//   {"episode", "return", "cost", "steps": [{"t", "sigma", "a", "r",
//    "pos" (grid envs), "opt" (discrete options), "o" (option vector when
//    sigma = 1, continuous options)}], "final_pos" (grid envs)}
struct StepRecord {
  std::size_t t = 0;
  bool sigma = false;
  std::size_t action = 0;
  double reward = 0.0;
  std::optional<envs::Cell> pos;
  std::optional<std::size_t> option;
  std::vector<double> option_vector;
  int goal_annotation = -1;
};

struct TraceRecord {
  std::size_t episode = 0;
  double total_return = 0.0;
  std::size_t cost = 0;
  std::vector<StepRecord> steps;
  std::optional<envs::Cell> final_pos;
  bool discrete = false;
};

TraceRecord to_record(std::size_t episode, const policy::EpisodeTrace& trace,
                      bool discrete);
nlohmann::json to_json(const TraceRecord& record);
TraceRecord trace_from_json(const nlohmann::json& j);

void write_traces_jsonl(std::ostream& out, std::span<const TraceRecord> traces);
std::vector<TraceRecord> read_traces_jsonl(std::istream& in);

void write_metrics_header(std::ostream& out);
void write_metrics_row(std::ostream& out, const train::TrainReport& report);

void write_eval_csv(std::ostream& out, std::span<const TraceRecord> traces,
                    std::span<const policy::EpisodeTrace> episodes,
                    double lambda);

// episode,t,goal_annotation,o_1..o_n: one row per acquisition step.
void dump_option_latents(std::ostream& out, std::span<const TraceRecord> traces,
                         std::size_t n_gru);

// pareto.csv: lambda,obs_fraction,mean_return,seeds,failed,dominated
void write_pareto_csv(std::ostream& out, std::span<const ParetoPoint> points,
                      std::span<const std::size_t> failed_runs);

// Minimal CSV reader used by tools and tests: header + rows of fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(std::istream& in);

}  // namespace bonn::harness
