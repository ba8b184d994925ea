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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "storyline/candidates.hpp"
#include "storyline/corpus.hpp"
#include "storyline/evaluation.hpp"
#include "storyline/objective.hpp"
#include "storyline/optimizer.hpp"
#include "storyline/prediction.hpp"
#include "storyline/topic_model.hpp"

namespace storyline::cli {

using json = nlohmann::json;

enum ExitCode : int { kOk = 0, kConfigError = 2, kStageFailure = 3 };

// Where topic distributions come from. With neither set, topics are taken
// from the corpus records when present.
struct TopicsSource {
  std::optional<std::filesystem::path> file;
  int lda_k = 0;  // 0 disables the reference sampler
  int lda_iterations = 200;
  std::uint64_t lda_seed = 0;
};

struct EvaluationConfig {
  std::vector<double> theta_grid;         // dispersion
  std::vector<double> beta_grid;          // significance tolerance sweep
  std::vector<double> date_max_grid;      // significance scale sweep
  double significance_beta = 1.0;         // fixed beta for the scale sweep
  std::size_t significance_samples = 100000;
  std::uint64_t significance_seed = 0;
  std::vector<double> zeta_grid;          // repeatability
  int min_matches = 1;
  std::uint64_t kmeans_seed = 0;
};

struct PredictionConfig {
  bool enabled = true;
  double gap_days = 7.0;
  std::size_t top = 20;
};

struct RunConfig {
  std::filesystem::path corpus_path;
  TopicsSource topics;
  std::vector<std::string> seed_ids;
  CandidateFilterConfig candidates;
  std::optional<int> lookback_days;
  SegmentationConfig segmentation;
  OptimizerConfig optimizer;
  ObjectiveVariant variant = ObjectiveVariant::kF5;
  std::size_t top_k = 10;
  EvaluationConfig evaluation;
  PredictionConfig prediction;
  std::filesystem::path output_dir = "storyline-out";
};

// "lo:hi:step" inclusive of hi (within half a step). A bare number is a
// one-point grid.
std::vector<double> parse_grid(const std::string& text);

EvaluationConfig default_evaluation();

// Relative paths in the file resolve against `base_dir`.
RunConfig run_config_from_json(const json& j,
                               const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);
json to_json(const RunConfig& config);
// Throws ConfigError; checks referenced files exist.
void validate(const RunConfig& config);
// FNV-1a 64 over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const RunConfig& config);

// Topic distributions aligned with corpus.documents, or empty when the
// filter does not need them and none are available.
std::vector<TopicDistribution> load_topics(const Corpus& corpus,
                                           const TopicsSource& source,
                                           bool required,
                                           std::vector<std::string>& warnings);
CandidateFilterConfig resolve_filter(const Corpus& corpus,
                                     const RunConfig& config);
CandidateSet select_candidates(const Corpus& corpus, const RunConfig& config,
                               std::vector<std::string>& warnings);

json candidates_to_json(const CandidateSet& candidates, const Corpus& corpus);
json story_to_json(const Story& story);
Story story_from_json(const json& j);
json terms_to_json(const ObjectiveTerms& terms, const StoryResult& result);
json prediction_to_json(
    const std::vector<std::pair<std::string, double>>& entities,
    double gap_days, bool no_shared_entities);

// Highest-ranked document of every non-empty segment, oldest first.
Chain diffusion_chain(const Story& story, const CandidateSet& candidates);

struct DispersionRow {
  double theta;
  double mean_psi;
  std::string method;
};
std::vector<DispersionRow> dispersion_sweep(
    const std::vector<std::pair<std::string, std::vector<Chain>>>& methods,
    const Corpus& corpus, const std::vector<double>& thetas);
std::string dispersion_csv(const std::vector<DispersionRow>& rows);

struct SweepPoint {
  std::string parameter;
  double x;
  double value;
};
// p-values over the beta grid at the story's scale, then over the
// date_max grid with turning points rescaled proportionally.
std::vector<SweepPoint> significance_sweep(
    const std::vector<double>& turning_points, double date_max,
    const EvaluationConfig& config);
std::vector<SweepPoint> repeatability_sweep(
    const std::vector<std::vector<double>>& vectors,
    const EvaluationConfig& config);
std::string sweep_csv(const std::vector<SweepPoint>& points);

struct PredictionOutcome {
  std::vector<std::pair<std::string, double>> entities;
  bool no_shared_entities = false;
  std::size_t training_docs = 0;
};
PredictionOutcome predict_from_story(const Story& story, const Corpus& corpus,
                                     double gap_days, std::size_t top);

// Runs every stage, writing artifacts into config.output_dir. On a stage
// failure the artifacts already written get a ".partial" suffix.
int run_pipeline(const RunConfig& config, std::ostream& log);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string dump(const json& j);

}  // namespace storyline::cli
