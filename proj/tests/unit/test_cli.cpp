// Copyright 2026 The Storyline Authors
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

#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "pipeline.hpp"
#include "storyline/error.hpp"
#include "storyline/synthetic.hpp"

using namespace storyline;
using namespace storyline::cli;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(STORYLINE_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

struct Workspace {
  fs::path dir;
  fs::path corpus;
  SyntheticCorpus truth;

  explicit Workspace(const std::string& name) {
    dir = fs::temp_directory_path() / ("storyline_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    corpus = dir / "corpus.jsonl";
    SyntheticSpec spec;
    spec.rng_seed = 2;
    spec.background_probability = 0.0;
    truth = generate_synthetic_corpus(spec);
    write_synthetic_corpus(truth, corpus, dir / "truth.json");
  }
  ~Workspace() { fs::remove_all(dir); }

  RunConfig config(const std::string& out) const {
    RunConfig c;
    c.corpus_path = corpus;
    c.seed_ids = {truth.seed_id};
    c.optimizer.restarts = 3;
    c.optimizer.max_iterations = 400;
    c.evaluation = default_evaluation();
    c.evaluation.significance_samples = 2000;
    c.output_dir = dir / out;
    return c;
  }

  fs::path write_config(const RunConfig& c, const std::string& name) const {
    const auto path = dir / name;
    write_text(path, dump(to_json(c)));
    return path;
  }
};

}  // namespace

TEST_CASE("parse_grid") {
  CHECK(parse_grid("0:1:0.25") == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
  CHECK(parse_grid("5") == std::vector<double>{5});
  const auto g = parse_grid("10:100:10");
  REQUIRE(g.size() == 10);
  CHECK(g.back() == doctest::Approx(100.0));
  CHECK_THROWS_AS(parse_grid("1:0:0.1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a:b"), ConfigError);
}

TEST_CASE("config json round trip and hash") {
  Workspace ws("roundtrip");
  RunConfig c = ws.config("out");
  c.candidates.alpha = 0.25;
  c.lookback_days = 30;
  c.segmentation.num_segments = 4;
  const json j = to_json(c);
  const RunConfig back = run_config_from_json(j, ws.dir);
  CHECK(to_json(back) == j);
  CHECK(config_hash(back) == config_hash(c));
  CHECK(config_hash(c).size() == 16);
  c.optimizer.restarts += 1;
  CHECK(config_hash(back) != config_hash(c));

  // Relative paths resolve against the config file's directory.
  json rel = j;
  rel["corpus"] = "corpus.jsonl";
  CHECK(run_config_from_json(rel, ws.dir).corpus_path == ws.corpus);
  CHECK_NOTHROW(validate(back));
  json bad = j;
  bad["variant"] = "F9";
  CHECK_THROWS_AS(run_config_from_json(bad, ws.dir), ConfigError);
}

TEST_CASE("missing corpus exits 2 without artifacts") {
  Workspace ws("missing");
  RunConfig c = ws.config("out");
  c.corpus_path = ws.dir / "absent.jsonl";
  const auto cfg = ws.write_config(c, "run.json");
  CHECK(run_cli("run --config " + cfg.string()) == 2);
  CHECK_FALSE(fs::exists(ws.dir / "out"));
  CHECK(run_cli("run --no-such-flag") == 2);
  CHECK(run_cli("fit --corpus " + ws.corpus.string() + " --seed-ids " +
                ws.truth.seed_id + " --segments 0 --out " +
                (ws.dir / "s.json").string()) == 2);
}

TEST_CASE("stage failure exits 3 and marks artifacts partial") {
  Workspace ws("partial");
  RunConfig c = ws.config("out");
  // A non-empty directory where story.json belongs makes the fit stage's
  // write fail after candidates.json is already written.
  fs::create_directories(ws.dir / "out" / "story.json");
  write_text(ws.dir / "out" / "story.json" / "blocker", "x");
  const auto cfg = ws.write_config(c, "run.json");
  CHECK(run_cli("run --config " + cfg.string()) == 3);
  CHECK(fs::exists(ws.dir / "out" / "candidates.json.partial"));
  CHECK_FALSE(fs::exists(ws.dir / "out" / "candidates.json"));
  REQUIRE(fs::exists(ws.dir / "out" / "manifest.json.partial"));
  const auto manifest = json::parse(slurp(ws.dir / "out" / "manifest.json.partial"));
  CHECK(manifest["failed_stage"] == "fit");
  CHECK_FALSE(manifest["error"].get<std::string>().empty());
}

TEST_CASE("malformed corpus is an ingest failure") {
  Workspace ws("ingest");
  write_text(ws.corpus, "{\"id\":\"a\",\"date\":\"2015-01-01\"}\n{broken\n");
  RunConfig c = ws.config("out");
  c.seed_ids = {"a"};
  const auto cfg = ws.write_config(c, "run.json");
  CHECK(run_cli("run --config " + cfg.string()) == 3);
  const auto manifest = json::parse(slurp(ws.dir / "out" / "manifest.json.partial"));
  CHECK(manifest["failed_stage"] == "ingest");
  CHECK(manifest["artifacts"].empty());
}

TEST_CASE("end to end run is deterministic and finds the planted story") {
  Workspace ws("e2e");
  const auto cfg = ws.write_config(ws.config("first"), "run.json");
  REQUIRE(run_cli("run --config " + cfg.string()) == 0);
  REQUIRE(run_cli("run --config " + cfg.string() + " --output " +
                  (ws.dir / "second").string()) == 0);
  const std::string a = slurp(ws.dir / "first" / "story.json");
  CHECK_FALSE(a.empty());
  CHECK(a == slurp(ws.dir / "second" / "story.json"));

  const auto manifest = json::parse(slurp(ws.dir / "first" / "manifest.json"));
  for (const auto& name : manifest["artifacts"])
    CHECK(fs::exists(ws.dir / "first" / name.get<std::string>()));
  CHECK(manifest["artifacts"] ==
        json({"candidates.json", "story.json", "terms.json", "chains.json",
              "dispersion.csv", "significance.csv", "repeatability.csv",
              "prediction.json"}));

  const Story story = story_from_json(json::parse(a));
  REQUIRE(story.turning_points.size() == 2);
  CHECK(std::abs(story.turning_points[0] - ws.truth.planted_boundaries[0]) <= 5.0);
  CHECK(std::abs(story.turning_points[1] - ws.truth.planted_boundaries[1]) <= 5.0);
  CHECK(story.seed_ids == std::vector<std::string>{ws.truth.seed_id});

  // Subcommands write the same story as the pipeline stage.
  const fs::path story_path = ws.dir / "fit.json";
  CHECK(run_cli("fit --corpus " + ws.corpus.string() + " --seed-ids " +
                ws.truth.seed_id + " --restarts 3 --max-iterations 400 --out " +
                story_path.string()) == 0);
  CHECK(slurp(story_path) == a);
  CHECK(run_cli("evaluate significance --story " + story_path.string() +
                " --samples 1000 --out " + (ws.dir / "sig.csv").string()) == 0);
  CHECK(slurp(ws.dir / "sig.csv").rfind("parameter,x,value\n", 0) == 0);
}
