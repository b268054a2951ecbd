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

#include "bonn/harness/artifacts.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "bonn/error.hpp"
#include "bonn/harness/format.hpp"

namespace bonn::harness {

TraceRecord to_record(std::size_t episode, const policy::EpisodeTrace& trace,
                      bool discrete) {
  TraceRecord r;
  r.episode = episode;
  r.total_return = trace.total_reward;
  r.cost = trace.cost;
  r.final_pos = trace.final_position;
  r.discrete = discrete;
  r.steps.reserve(trace.steps.size());
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& s = trace.steps[t];
    StepRecord step;
    step.t = t;
    step.sigma = s.sigma;
    step.action = s.action;
    step.reward = s.reward;
    step.pos = s.position;
    step.option = s.option_index;
    if (s.sigma) step.option_vector = s.option_snapshot;
    step.goal_annotation = s.goal_annotation;
    r.steps.push_back(std::move(step));
  }
  return r;
}

nlohmann::json to_json(const TraceRecord& record) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& s : record.steps) {
    nlohmann::json j = {{"t", s.t},
                        {"sigma", s.sigma ? 1 : 0},
                        {"a", s.action},
                        {"r", s.reward}};
    if (s.pos) j["pos"] = {s.pos->row, s.pos->col};
    if (record.discrete && s.option) j["opt"] = *s.option;
    if (!record.discrete && s.sigma && !s.option_vector.empty()) {
      j["o"] = s.option_vector;
    }
    steps.push_back(std::move(j));
  }
  nlohmann::json out = {{"episode", record.episode},
                        {"return", record.total_return},
                        {"cost", record.cost},
                        {"steps", std::move(steps)}};
  if (record.final_pos) {
    out["final_pos"] = {record.final_pos->row, record.final_pos->col};
  }
  return out;
}

TraceRecord trace_from_json(const nlohmann::json& j) {
  TraceRecord r;
  try {
    r.episode = j.at("episode").get<std::size_t>();
    r.total_return = j.at("return").get<double>();
    r.cost = j.at("cost").get<std::size_t>();
    if (j.contains("final_pos")) {
      r.final_pos = envs::Cell{j["final_pos"][0].get<int>(),
                               j["final_pos"][1].get<int>()};
    }
    for (const auto& s : j.at("steps")) {
      StepRecord step;
      step.t = s.at("t").get<std::size_t>();
      step.sigma = s.at("sigma").get<int>() != 0;
      step.action = s.at("a").get<std::size_t>();
      step.reward = s.at("r").get<double>();
      if (s.contains("pos")) {
        step.pos = envs::Cell{s["pos"][0].get<int>(), s["pos"][1].get<int>()};
      }
      if (s.contains("opt")) {
        step.option = s["opt"].get<std::size_t>();
        r.discrete = true;
      }
      if (s.contains("o")) step.option_vector = s["o"].get<std::vector<double>>();
      r.steps.push_back(std::move(step));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed trace record: ") + e.what());
  }
  return r;
}

void write_traces_jsonl(std::ostream& out, std::span<const TraceRecord> traces) {
  for (const auto& t : traces) out << to_json(t).dump() << '\n';
}

std::vector<TraceRecord> read_traces_jsonl(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(trace_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw Error("traces line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_metrics_header(std::ostream& out) {
  out << "iteration,mean_return,mean_aug_return,obs_fraction,mean_length,"
         "grad_norm,elapsed_s\n";
}

void write_metrics_row(std::ostream& out, const train::TrainReport& r) {
  out << r.iteration << ',' << format_double(r.mean_return) << ','
      << format_double(r.mean_aug_return) << ','
      << format_double(r.obs_fraction) << ',' << format_double(r.mean_length)
      << ',' << format_double(r.grad_norm) << ',' << format_double(r.elapsed_s)
      << '\n';
}

void write_eval_csv(std::ostream& out, std::span<const TraceRecord> traces,
                    std::span<const policy::EpisodeTrace> episodes,
                    double lambda) {
  out << "episode,return,aug_return,cost,length,obs_fraction,goal_reached\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const auto& t = traces[i];
    const std::size_t length = t.steps.size();
    const bool goal = i < episodes.size() && episodes[i].goal_reached;
    out << t.episode << ',' << format_double(t.total_return) << ','
        << format_double(t.total_return - lambda * static_cast<double>(t.cost))
        << ',' << t.cost << ',' << length << ','
        << format_double(length ? static_cast<double>(t.cost) / length : 0.0)
        << ',' << (goal ? 1 : 0) << '\n';
  }
}

void dump_option_latents(std::ostream& out, std::span<const TraceRecord> traces,
                         std::size_t n_gru) {
  out << "episode,t,goal_annotation";
  for (std::size_t i = 1; i <= n_gru; ++i) out << ",o_" << i;
  out << '\n';
  for (const auto& trace : traces) {
    for (const auto& s : trace.steps) {
      if (!s.sigma) continue;
      if (s.option_vector.size() != n_gru) {
        throw ShapeError("dump_option_latents: episode " +
                         std::to_string(trace.episode) + " step " +
                         std::to_string(s.t) + " holds " +
                         std::to_string(s.option_vector.size()) +
                         " option values, expected " + std::to_string(n_gru));
      }
      out << trace.episode << ',' << s.t << ',' << s.goal_annotation;
      for (double v : s.option_vector) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

void write_pareto_csv(std::ostream& out, std::span<const ParetoPoint> points,
                      std::span<const std::size_t> failed_runs) {
  const auto front = pareto_front(points);
  std::vector<bool> on_front(points.size(), false);
  for (std::size_t i : front) on_front[i] = true;
  out << "lambda,obs_fraction,mean_return,seeds,failed,dominated\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    const std::size_t failed = i < failed_runs.size() ? failed_runs[i] : 0;
    out << format_double(p.lambda) << ',' << format_double(p.obs_fraction)
        << ',' << format_double(p.mean_return) << ',' << p.seeds << ','
        << failed << ',' << (on_front[i] ? 0 : 1) << '\n';
  }
}

CsvTable read_csv(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw Error("CSV input is empty");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    table.rows.push_back(split(line));
  }
  return table;
}

}  // namespace bonn::harness
