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

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bonn/error.hpp"
#include "bonn/harness/artifacts.hpp"
#include "bonn/harness/config.hpp"
#include "bonn/harness/format.hpp"
#include "bonn/harness/pareto.hpp"
#include "bonn/harness/render.hpp"
#include "bonn/harness/runner.hpp"
#include "bonn/nn/serialize.hpp"
#include "support.hpp"

namespace bonn::harness {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const char* root = std::getenv("BONN_TEST_TMP");
  const fs::path dir =
      (root ? fs::path(root) : fs::temp_directory_path() / "bonn_tests") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_of(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos;
       pos = text.find(needle, pos + 1)) {
    ++n;
  }
  return n;
}

// ---- config --------------------------------------------------------------

TEST(ConfigTest, ParsesStatedFieldsAndKeepsDefaults) {
  const auto c = parse_config("env = cartpole\nlambda = 0.5\nseed = 1");
  EXPECT_EQ(c.env, envs::EnvKind::kCartPole);
  EXPECT_EQ(c.lambda, 0.5);
  EXPECT_EQ(c.seed, 1u);
  const TrainConfig d;
  EXPECT_EQ(c.batch, d.batch);
  EXPECT_EQ(c.lr, d.lr);
}

TEST(ConfigTest, EmptyTextGivesDefaults) {
  EXPECT_EQ(to_text(parse_config("")), to_text(TrainConfig{}));
}

TEST(ConfigTest, RangeErrorNamesKeyAndLine) {
  try {
    parse_config("# header\n\nlambda = -1\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("lambda"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
  }
}

TEST(ConfigTest, MalformedAndUnknownLines) {
  EXPECT_THROW(parse_config("lambda 0.5"), ConfigError);
  EXPECT_THROW(parse_config("colour = blue"), ConfigError);
  EXPECT_THROW(parse_config("batch = many"), ConfigError);
  EXPECT_THROW(parse_config("epsilon = 1.5"), ConfigError);
  EXPECT_THROW(parse_config("option_mode = discrete"), ConfigError);
  EXPECT_THROW(parse_config("env = cartpole\nobs_mode = split"), ConfigError);
  try {
    parse_config("seed = 1", {{"nope", "1"}});
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("override"), std::string::npos);
  }
}

TEST(ConfigTest, OverridesWinAndCommentsAreIgnored) {
  const auto c = parse_config("lambda = 0.1  # cost\nenv = rooms\n",
                              {{"lambda", "2"}, {"k_options", "9"}});
  EXPECT_EQ(c.lambda, 2.0);
  EXPECT_EQ(c.env, envs::EnvKind::kRooms);
  EXPECT_EQ(c.option_mode, OptionMode::kDiscrete);
  EXPECT_EQ(c.k_options, 9);
}

TEST(ConfigTest, TextRoundTrip) {
  auto c = parse_config("env = oracle-maze\nlambda = 0.3\nepsilon = 0.25\nlr = 0.003\n"
                        "n_x = 10\nforce_full_obs = true\nout_dir = a/b\n");
  EXPECT_EQ(to_text(parse_config(to_text(c))), to_text(c));
  for (const auto& key : config_keys()) {
    EXPECT_NE(to_text(c).find(key + " = "), std::string::npos) << key;
  }
}

TEST(ConfigTest, EnvironmentDefaults) {
  auto c = resolve_defaults(parse_config("env = cartpole"));
  EXPECT_EQ(c.n_x, 0);
  EXPECT_EQ(c.n_y, 5);
  EXPECT_EQ(c.n_gru, 5);
  c = resolve_defaults(parse_config("env = rooms"));
  EXPECT_EQ(c.n_y, 20);
  EXPECT_EQ(c.n_gru, 10);
  c = resolve_defaults(parse_config("env = maze"));
  EXPECT_EQ(c.n_x, 10);
  EXPECT_EQ(c.n_gru, 5);
  c = resolve_defaults(parse_config("env = rooms\nk_options = 9"));
  EXPECT_EQ(c.n_y, c.n_gru);
  c = resolve_defaults(parse_config("env = rooms\nn_y = 3"));
  EXPECT_EQ(c.n_y, 3);
}

// ---- pareto --------------------------------------------------------------

ParetoPoint pt(double cost, double reward) { return {0.0, cost, reward, 1}; }

TEST(ParetoTest, SinglePoint) {
  const std::vector<ParetoPoint> p{pt(0.3, 1.0)};
  EXPECT_EQ(pareto_front(p), (std::vector<std::size_t>{0}));
}

TEST(ParetoTest, DominatedMiddlePoint) {
  const std::vector<ParetoPoint> p{pt(0.1, 5), pt(0.2, 4), pt(0.3, 6)};
  EXPECT_EQ(pareto_front(p), (std::vector<std::size_t>{0, 2}));
}

TEST(ParetoTest, DuplicatesKeepFirst) {
  const std::vector<ParetoPoint> p{pt(0.5, 2), pt(0.1, 1), pt(0.5, 2), pt(0.1, 1)};
  EXPECT_EQ(pareto_front(p), (std::vector<std::size_t>{1, 0}));
}

TEST(ParetoTest, MatchesBruteForce) {
  Rng rng(2718);
  for (int set = 0; set < 1000; ++set) {
    const std::size_t n = 1 + uniform_index(rng, 25);
    std::vector<ParetoPoint> p;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid so ties and duplicates are common.
      p.push_back(pt(static_cast<double>(uniform_index(rng, 6)) / 5.0,
                     static_cast<double>(uniform_index(rng, 6))));
    }
    const auto expected = testing::pareto_brute_force(p);
    const auto front = pareto_front(p);
    ASSERT_EQ(front, expected) << "set " << set;
    // Every excluded point is dominated by, or duplicates, a front member.
    for (std::size_t i = 0; i < n; ++i) {
      if (std::find(front.begin(), front.end(), i) != front.end()) continue;
      bool covered = false;
      for (std::size_t f : front) {
        covered = covered || dominates(p[f], p[i]) ||
                  (p[f].obs_fraction == p[i].obs_fraction &&
                   p[f].mean_return == p[i].mean_return);
      }
      EXPECT_TRUE(covered);
    }
  }
}

TEST(ParetoTest, Spearman) {
  const std::vector<double> x{0.1, 0.5, 1, 5};
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{0.4, 0.3, 0.2, 0.1}), -1.0);
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{1, 2, 3, 4}), 1.0);
  EXPECT_DOUBLE_EQ(spearman(x, std::vector<double>{1, 1, 1, 1}), 0.0);
  // Ties get average ranks: ranks y = [1.5, 1.5, 3, 4].
  const double r = spearman(x, std::vector<double>{1, 1, 2, 3});
  EXPECT_NEAR(r, 0.9486832980505138, 1e-12);
}

// ---- artifacts -----------------------------------------------------------

TraceRecord grid_record(std::vector<int> sigmas, bool discrete) {
  TraceRecord r;
  r.discrete = discrete;
  for (std::size_t t = 0; t < sigmas.size(); ++t) {
    StepRecord s;
    s.t = t;
    s.sigma = sigmas[t] != 0;
    s.action = t % 4;
    s.reward = -1.0;
    s.pos = envs::Cell{1, static_cast<int>(1 + t)};
    if (s.sigma) {
      if (discrete) s.option = t % 9;
      s.option_vector = {0.1 * static_cast<double>(t), -1.0 / 3.0};
    }
    r.steps.push_back(s);
  }
  r.cost = static_cast<std::size_t>(std::count(sigmas.begin(), sigmas.end(), 1));
  r.total_return = -static_cast<double>(sigmas.size());
  r.final_pos = envs::Cell{1, static_cast<int>(1 + sigmas.size())};
  return r;
}

envs::GridGeometry small_grid() {
  envs::EnvSpec spec;
  spec.kind = envs::EnvKind::kRooms;
  auto env = envs::make_env(spec);
  Rng rng(1);
  env->reset(rng);
  return *env->geometry();
}

TEST(ArtifactsTest, TraceJsonRoundTrip) {
  const auto rec = grid_record({1, 0, 1, 1}, false);
  std::stringstream buf;
  write_traces_jsonl(buf, std::vector<TraceRecord>{rec});
  const auto line = buf.str();
  EXPECT_NE(line.find("\"sigma\":1"), std::string::npos);
  EXPECT_NE(line.find("\"pos\":[1,1]"), std::string::npos);
  EXPECT_EQ(line.find("\"opt\""), std::string::npos);
  const auto back = read_traces_jsonl(buf);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].cost, 3u);
  ASSERT_EQ(back[0].steps.size(), 4u);
  EXPECT_EQ(back[0].steps[2].option_vector, rec.steps[2].option_vector);
  EXPECT_EQ(back[0].final_pos, rec.final_pos);

  std::stringstream disc;
  write_traces_jsonl(disc, std::vector<TraceRecord>{grid_record({1, 0}, true)});
  EXPECT_NE(disc.str().find("\"opt\":0"), std::string::npos);

  std::stringstream bad("{\"episode\": 1}\n");
  EXPECT_THROW(read_traces_jsonl(bad), Error);
}

TEST(ArtifactsTest, OptionLatentsSchema) {
  auto rec = grid_record({1, 0, 1, 1, 0}, false);
  for (auto& s : rec.steps) {
    if (s.sigma) s.option_vector.resize(10, 0.25);
  }
  std::stringstream out;
  dump_option_latents(out, std::vector<TraceRecord>{rec}, 10);
  const auto table = read_csv(out);
  EXPECT_EQ(table.header.size(), 13u);
  EXPECT_EQ(table.header[3], "o_1");
  EXPECT_EQ(table.rows.size(), 3u);
  for (const auto& row : table.rows) EXPECT_EQ(row.size(), 13u);
  std::stringstream sink;
  EXPECT_THROW(dump_option_latents(sink, std::vector<TraceRecord>{rec}, 4),
               ShapeError);
}

TEST(ArtifactsTest, ParetoCsvFlagsDominatedRows) {
  std::vector<ParetoPoint> p{pt(0.1, 5), pt(0.2, 4), pt(0.3, 6)};
  std::stringstream out;
  write_pareto_csv(out, p, std::vector<std::size_t>{0, 1, 0});
  const auto t = read_csv(out);
  EXPECT_EQ(t.header, (std::vector<std::string>{"lambda", "obs_fraction",
                                                "mean_return", "seeds",
                                                "failed", "dominated"}));
  EXPECT_EQ(t.rows[0][5], "0");
  EXPECT_EQ(t.rows[1][5], "1");
  EXPECT_EQ(t.rows[1][4], "1");
  EXPECT_EQ(t.rows[2][5], "0");
}

TEST(FormatTest, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(-100.0), "-100");
  const double third = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_double(third)), third);
}

// ---- render --------------------------------------------------------------

// Minimal well-formedness check: balanced tags, a single root element.
bool well_formed_single_root(const std::string& xml, std::string& root) {
  std::vector<std::string> stack;
  std::size_t roots = 0;
  std::size_t i = 0;
  while ((i = xml.find('<', i)) != std::string::npos) {
    const std::size_t end = xml.find('>', i);
    if (end == std::string::npos) return false;
    const std::string tag = xml.substr(i + 1, end - i - 1);
    i = end + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    const std::string name = tag.substr(0, tag.find_first_of(" /"));
    if (stack.empty()) {
      ++roots;
      root = name;
    }
    if (tag.back() != '/') stack.push_back(name);
  }
  return stack.empty() && roots == 1;
}

TEST(RenderTest, OneStepCircleIffAcquired) {
  const auto geometry = small_grid();
  for (int sigma : {0, 1}) {
    const auto svg = render_trajectory_svg(grid_record({sigma}, false), geometry);
    EXPECT_EQ(count_of(svg, "<circle"), static_cast<std::size_t>(sigma));
  }
}

TEST(RenderTest, WellFormedSvgDocument) {
  const auto geometry = small_grid();
  for (bool discrete : {false, true}) {
    const auto svg =
        render_trajectory_svg(grid_record({1, 0, 0, 1, 1, 0}, discrete), geometry);
    std::string root;
    EXPECT_TRUE(well_formed_single_root(svg, root));
    EXPECT_EQ(root, "svg");
    EXPECT_EQ(count_of(svg, "<circle"), 3u);
    EXPECT_GE(count_of(svg, "<line"), 1u);
    EXPECT_GE(count_of(svg, "<polyline"), 1u);
  }
}

TEST(RenderTest, DiscreteRunsUsePalette) {
  const auto svg =
      render_trajectory_svg(grid_record({1, 0, 1, 0, 1}, true), small_grid());
  // Options 0, 2 and 4 are active in turn: three coloured runs.
  EXPECT_EQ(count_of(svg, "<polyline"), 3u);
  for (std::size_t k : {0u, 2u, 4u}) {
    EXPECT_NE(svg.find(kOptionPalette[k]), std::string::npos) << k;
  }
}

TEST(RenderTest, TraceWithoutPositionsIsUnsupported) {
  TraceRecord r;
  StepRecord s;
  r.steps.push_back(s);
  EXPECT_THROW(render_trajectory_svg(r, small_grid()), ConfigError);
}

// ---- runner --------------------------------------------------------------

TrainConfig quick_rooms(const fs::path& dir, int iterations) {
  return parse_config("env = rooms\nlambda = 0.5\nbatch = 4\neval_episodes = 6\n"
                      "seed = 3\nlr = 0.003\n",
                      {{"iterations", std::to_string(iterations)},
                       {"out_dir", dir.string()}});
}

TEST(RunnerTest, ZeroIterationsWritesHeaderAndInitialParameters) {
  const auto dir = scratch("zero");
  const auto config = quick_rooms(dir, 0);
  run_train(config);
  std::ifstream metrics(dir / "metrics.csv");
  const auto table = read_csv(metrics);
  EXPECT_EQ(table.header.size(), 7u);
  EXPECT_TRUE(table.rows.empty());

  auto init = initial_params(config);
  std::stringstream expected;
  nn::write_params(expected, init.blocks());
  EXPECT_EQ(slurp(dir / "params.bin"), expected.str());
  for (const char* f : {"config.txt", "eval.csv", "traces.jsonl", "options.csv"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
}

std::vector<std::vector<std::string>> numeric_metrics(const fs::path& file) {
  std::ifstream in(file);
  auto t = read_csv(in);
  const auto elapsed = static_cast<std::size_t>(
      std::find(t.header.begin(), t.header.end(), "elapsed_s") - t.header.begin());
  for (auto& row : t.rows) row.erase(row.begin() + elapsed);
  return t.rows;
}

TEST(RunnerTest, SameSeedReproducesArtifacts) {
  const auto a = scratch("repro_a");
  const auto b = scratch("repro_b");
  run_train(quick_rooms(a, 5));
  run_train(quick_rooms(b, 5));
  const auto ma = numeric_metrics(a / "metrics.csv");
  EXPECT_EQ(ma.size(), 5u);
  EXPECT_EQ(ma, numeric_metrics(b / "metrics.csv"));
  EXPECT_EQ(slurp(a / "params.bin"), slurp(b / "params.bin"));
  EXPECT_EQ(slurp(a / "eval.csv"), slurp(b / "eval.csv"));
  EXPECT_EQ(slurp(a / "traces.jsonl"), slurp(b / "traces.jsonl"));
  EXPECT_EQ(slurp(a / "options.csv"), slurp(b / "options.csv"));
}

TEST(RunnerTest, ArtifactsAgreeOnAcquisitionCounts) {
  const auto dir = scratch("counts");
  const auto config = quick_rooms(dir, 3);
  const auto result = run_train(config);
  std::ifstream tin(dir / "traces.jsonl");
  const auto traces = read_traces_jsonl(tin);
  ASSERT_EQ(traces.size(), result.eval.traces.size());
  std::ifstream oin(dir / "options.csv");
  const auto options = read_csv(oin);
  std::size_t rows = 0;
  for (std::size_t i = 0; i < traces.size(); ++i) {
    std::size_t sigmas = 0;
    for (const auto& s : traces[i].steps) sigmas += s.sigma ? 1 : 0;
    EXPECT_EQ(sigmas, traces[i].cost);
    EXPECT_EQ(traces[i].cost, result.eval.traces[i].cost);
    const auto svg = render_trajectory_svg(traces[i], eval_geometry(config, i));
    EXPECT_EQ(count_of(svg, "<circle"), traces[i].cost);
    rows += traces[i].cost;
  }
  EXPECT_EQ(options.rows.size(), rows);
  // options.csv and traces.jsonl carry the same option values bit for bit.
  std::size_t r = 0;
  for (const auto& t : traces) {
    for (const auto& s : t.steps) {
      if (!s.sigma) continue;
      for (std::size_t k = 0; k < s.option_vector.size(); ++k) {
        EXPECT_EQ(std::stod(options.rows[r][3 + k]), s.option_vector[k]);
      }
      ++r;
    }
  }
}

TEST(RunnerTest, RenderWritesOneSvgPerEpisode) {
  const auto dir = scratch("render");
  auto config = quick_rooms(dir, 1);
  run_train(config);
  const auto files = run_render(config, 3);
  EXPECT_EQ(files.size(), 3u);
  for (const auto& f : files) EXPECT_TRUE(fs::exists(f));

  const auto cp_dir = scratch("render_cartpole");
  auto cp = parse_config("iterations = 1\neval_episodes = 2",
                         {{"out_dir", cp_dir.string()}});
  run_train(cp);
  EXPECT_THROW(run_render(cp, 1), ConfigError);
}

TEST(RunnerTest, EvalReloadsParameters) {
  const auto dir = scratch("eval");
  const auto config = quick_rooms(dir, 2);
  const auto trained = run_train(config);
  const auto again = run_eval(config);
  EXPECT_EQ(again.mean_return, trained.eval.mean_return);
  EXPECT_EQ(again.obs_fraction, trained.eval.obs_fraction);
}

TEST(RunnerTest, SingleRunSweepIsNonDominated) {
  const auto dir = scratch("sweep");
  const std::vector<double> lambdas{0.5};
  const std::vector<std::uint64_t> seeds{1};
  const auto result = run_sweep(quick_rooms(dir, 1), lambdas, seeds);
  ASSERT_EQ(result.points.size(), 1u);
  std::ifstream in(dir / "pareto.csv");
  const auto t = read_csv(in);
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][5], "0");
  EXPECT_TRUE(fs::exists(dir / "lambda_0.5_seed_1" / "metrics.csv"));
  EXPECT_THROW(run_sweep(quick_rooms(dir, 1), {}, seeds), ConfigError);
}

}  // namespace
}  // namespace bonn::harness
