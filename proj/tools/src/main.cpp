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

// storyline command-line tool.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pipeline.hpp"
#include "storyline/error.hpp"
#include "storyline/synthetic.hpp"

namespace fs = std::filesystem;
using namespace storyline;
using namespace storyline::cli;

namespace {

// Flag values shared by the subcommands that select and fit candidates.
struct CommonFlags {
  std::string corpus;
  std::vector<std::string> seed_ids;
  std::string topics_file;
  int lda_k = 0;
  int lda_iters = 200;
  std::uint64_t lda_seed = 0;
  std::string alpha = "inf";
  std::string t_min;
  int lookback_days = -1;
  double date_max = 100.0;
  int segments = SegmentationConfig{}.num_segments;
  double sigma_hat2 = SegmentationConfig{}.gamma_variance;
  double overlap_sigma = SegmentationConfig{}.overlap_sigma;
  int restarts = OptimizerConfig{}.restarts;
  std::uint64_t seed = OptimizerConfig{}.rng_seed;
  int max_iterations = OptimizerConfig{}.max_iterations;
  std::string variant = "F5";
  std::size_t top_k = 10;
};

void add_corpus_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--corpus", f.corpus, "JSONL corpus")->required();
}

void add_topic_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--topics-file", f.topics_file, "topics sidecar JSONL");
  app->add_option("--lda-k", f.lda_k, "reference LDA topic count");
  app->add_option("--lda-iters", f.lda_iters, "Gibbs sweeps");
  app->add_option("--lda-seed", f.lda_seed, "LDA rng seed");
}

void add_filter_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed-ids", f.seed_ids, "seed document ids")
      ->required()
      ->delimiter(',');
  app->add_option("--alpha", f.alpha, "KL bound (inf disables)");
  app->add_option("--t-min", f.t_min, "exclusive lower date YYYY-MM-DD");
  app->add_option("--lookback-days", f.lookback_days,
                  "t_min as days before the newest seed");
  app->add_option("--date-max", f.date_max, "scaled timeline length");
}

void add_fit_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--segments", f.segments, "number of segments |S|");
  app->add_option("--restarts", f.restarts, "optimizer restarts");
  app->add_option("--seed", f.seed, "optimizer rng seed");
  app->add_option("--sigma-hat2", f.sigma_hat2, "membership variance");
  app->add_option("--overlap-sigma", f.overlap_sigma, "overlap kernel width");
  app->add_option("--max-iterations", f.max_iterations, "per restart");
  app->add_option("--variant", f.variant, "F1..F5");
  app->add_option("--top-k", f.top_k, "documents kept per segment");
}

double parse_alpha(const std::string& s) {
  if (s == "inf" || s == "Inf" || s == "infinity")
    return std::numeric_limits<double>::infinity();
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("bad --alpha '" + s + "'");
}

RunConfig config_from_flags(const CommonFlags& f) {
  RunConfig c;
  c.evaluation = default_evaluation();
  c.corpus_path = f.corpus;
  c.seed_ids = f.seed_ids;
  if (!f.topics_file.empty()) c.topics.file = f.topics_file;
  c.topics.lda_k = f.lda_k;
  c.topics.lda_iterations = f.lda_iters;
  c.topics.lda_seed = f.lda_seed;
  c.candidates.alpha = parse_alpha(f.alpha);
  if (!f.t_min.empty()) c.candidates.t_min = Date::parse(f.t_min);
  if (f.lookback_days >= 0) c.lookback_days = f.lookback_days;
  c.candidates.date_max = f.date_max;
  c.segmentation.num_segments = f.segments;
  c.segmentation.gamma_variance = f.sigma_hat2;
  c.segmentation.overlap_sigma = f.overlap_sigma;
  c.segmentation.date_max = f.date_max;
  c.optimizer.restarts = f.restarts;
  c.optimizer.rng_seed = f.seed;
  c.optimizer.max_iterations = f.max_iterations;
  c.variant = parse_objective_variant(f.variant);
  c.top_k = f.top_k;
  return c;
}

void require_file(const std::string& path, const char* what) {
  if (!fs::is_regular_file(path))
    throw ConfigError(std::string(what) + " not found: " + path);
}

void write_or_print(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text(path, text);
}

json read_json(const std::string& path) {
  require_file(path, "input");
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstructs how a news story evolved over time."};
  app.require_subcommand(1);
  CommonFlags f;
  std::string out_path;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "validate and normalize a corpus");
  add_corpus_flags(ingest, f);
  ingest->add_option("--out", out_path, "normalized JSONL");

  // topics
  auto* topics = app.add_subcommand("topics", "fit reference LDA topics");
  add_corpus_flags(topics, f);
  topics->add_option("--lda-k", f.lda_k, "topic count")->required();
  topics->add_option("--lda-iters", f.lda_iters, "Gibbs sweeps");
  topics->add_option("--lda-seed", f.lda_seed, "rng seed");
  topics->add_option("--out", out_path, "sidecar JSONL")->required();

  // candidates
  auto* candidates = app.add_subcommand("candidates", "select candidates");
  add_corpus_flags(candidates, f);
  add_topic_flags(candidates, f);
  add_filter_flags(candidates, f);
  candidates->add_option("--out", out_path, "candidates JSON (default stdout)");

  // fit
  auto* fit = app.add_subcommand("fit", "fit the story segmentation");
  std::string terms_path;
  add_corpus_flags(fit, f);
  add_topic_flags(fit, f);
  add_filter_flags(fit, f);
  add_fit_flags(fit, f);
  fit->add_option("--out", out_path, "story JSON (default stdout)");
  fit->add_option("--dump-terms", terms_path, "objective factors as JSON");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "evaluation sweeps");
  evaluate->require_subcommand(1);
  std::string chains_path, story_path, vectors_path;
  std::string theta_grid = "0:1:0.05", beta_grid = "0:10:0.5",
              date_max_grid = "10:100:10", zeta_grid = "0:100:1";
  double beta = 1.0;
  std::size_t samples = 100000;
  std::uint64_t eval_seed = 0;
  int min_matches = 1;
  double story_date_max = 100.0;

  auto* dispersion = evaluate->add_subcommand("dispersion", "psi over theta");
  dispersion->add_option("--chains", chains_path, "chains JSON")->required();
  add_corpus_flags(dispersion, f);
  dispersion->add_option("--theta-grid", theta_grid, "lo:hi:step");
  dispersion->add_option("--out", out_path, "CSV (default stdout)");

  auto* significance =
      evaluate->add_subcommand("significance", "p-value sweeps");
  significance->add_option("--story", story_path, "story JSON")->required();
  significance->add_option("--beta-grid", beta_grid, "lo:hi:step");
  significance->add_option("--date-max-grid", date_max_grid, "lo:hi:step");
  significance->add_option("--beta", beta, "beta for the date_max sweep");
  significance->add_option("--samples", samples, "Monte-Carlo samples");
  significance->add_option("--seed", eval_seed, "rng seed");
  significance->add_option("--date-max", story_date_max, "story timeline");
  significance->add_option("--out", out_path, "CSV (default stdout)");

  auto* repeatability =
      evaluate->add_subcommand("repeatability", "bucket counts over zeta");
  repeatability
      ->add_option("--vectors", vectors_path,
                   "terms JSON from fit, or a JSON list of vectors")
      ->required();
  repeatability->add_option("--zeta-grid", zeta_grid, "lo:hi:step");
  repeatability->add_option("--min-matches", min_matches, "positions");
  repeatability->add_option("--out", out_path, "CSV (default stdout)");

  // predict
  auto* predict = app.add_subcommand("predict", "forecast entity weights");
  double gap_days = 0.0;
  std::size_t top = 20;
  predict->add_option("--story", story_path, "story JSON")->required();
  add_corpus_flags(predict, f);
  predict->add_option("--gap-days", gap_days, "forecast horizon")->required();
  predict->add_option("--top", top, "entities to report");
  predict->add_option("--out", out_path, "JSON (default stdout)");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a planted corpus");
  SyntheticSpec spec;
  std::string truth_path;
  synth->add_option("--out", out_path, "JSONL corpus")->required();
  synth->add_option("--truth", truth_path, "ground-truth JSON")->required();
  synth->add_option("--clusters", spec.clusters);
  synth->add_option("--docs-per-cluster", spec.docs_per_cluster);
  synth->add_option("--vocab", spec.core_vocab_size, "core entities per cluster");
  synth->add_option("--background-vocab", spec.background_vocab_size);
  synth->add_option("--background-probability", spec.background_probability);
  synth->add_option("--total-days", spec.total_days);
  synth->add_option("--start-date", spec.start_date);
  synth->add_option("--seed", spec.rng_seed);

  // run
  auto* run = app.add_subcommand("run", "full pipeline from a config file");
  std::string config_path, run_out;
  std::vector<std::string> run_seeds;
  int run_restarts = -1;
  long long run_seed = -1;
  run->add_option("--config", config_path, "config JSON")->required();
  run->add_option("--output", run_out, "output directory override");
  run->add_option("--corpus", f.corpus, "corpus override");
  run->add_option("--seed-ids", run_seeds, "seed override")->delimiter(',');
  run->add_option("--restarts", run_restarts, "restart override");
  run->add_option("--seed", run_seed, "optimizer seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    if (*ingest) {
      require_file(f.corpus, "corpus");
      Corpus corpus = parse_corpus(f.corpus);
      for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
      if (!out_path.empty()) write_corpus_jsonl(corpus, out_path);
      std::cout << dump({{"documents", corpus.size()},
                         {"entities", corpus.vocabulary.size()},
                         {"warnings", corpus.warnings}});
    } else if (*topics) {
      require_file(f.corpus, "corpus");
      Corpus corpus = parse_corpus(f.corpus);
      LdaOptions opt;
      opt.num_topics = f.lda_k;
      opt.iterations = f.lda_iters;
      opt.rng_seed = f.lda_seed;
      auto lda = fit_reference_lda(corpus, opt);
      for (const auto& w : lda.warnings) std::cerr << "warning: " << w << "\n";
      std::vector<std::string> ids;
      for (const auto& d : corpus.documents) ids.push_back(d.id);
      write_topics_sidecar(out_path, ids, lda.distributions);
    } else if (*candidates || *fit) {
      RunConfig c = config_from_flags(f);
      require_file(f.corpus, "corpus");
      if (c.topics.file) require_file(c.topics.file->string(), "topics file");
      c.candidates.validate();
      Corpus corpus = parse_corpus(f.corpus);
      std::vector<std::string> warnings;
      CandidateSet cands = select_candidates(corpus, c, warnings);
      for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
      if (*candidates) {
        write_or_print(out_path, dump(candidates_to_json(cands, corpus)));
      } else {
        c.segmentation.validate();
        c.optimizer.validate();
        StoryResult result =
            fit_story(cands, c.segmentation, c.optimizer, c.variant);
        Story story = extract_story(result, cands, c.segmentation, c.top_k);
        write_or_print(out_path, dump(story_to_json(story)));
        if (!terms_path.empty()) {
          PairwiseGeometry geometry(cands);
          auto terms = objective_terms(c.variant, geometry, c.segmentation,
                                       result.best_solution);
          write_text(terms_path, dump(terms_to_json(terms, result)));
        }
      }
    } else if (*dispersion) {
      require_file(f.corpus, "corpus");
      json j = read_json(chains_path);
      Corpus corpus = parse_corpus(f.corpus);
      std::vector<std::pair<std::string, std::vector<Chain>>> methods;
      for (const auto& c : j.at("chains")) {
        const auto method = c.at("method").get<std::string>();
        Chain chain;
        chain.doc_ids = c.at("doc_ids").get<std::vector<std::string>>();
        auto it = std::find_if(methods.begin(), methods.end(),
                               [&](const auto& m) { return m.first == method; });
        if (it == methods.end())
          methods.push_back({method, {chain}});
        else
          it->second.push_back(chain);
      }
      write_or_print(out_path, dispersion_csv(dispersion_sweep(
                                   methods, corpus, parse_grid(theta_grid))));
    } else if (*significance) {
      Story story = story_from_json(read_json(story_path));
      EvaluationConfig ev;
      ev.beta_grid = parse_grid(beta_grid);
      ev.date_max_grid = parse_grid(date_max_grid);
      ev.significance_beta = beta;
      ev.significance_samples = samples;
      ev.significance_seed = eval_seed;
      if (samples < 1) throw ConfigError("--samples must be >= 1");
      write_or_print(out_path, sweep_csv(significance_sweep(
                                   story.turning_points, story_date_max, ev)));
    } else if (*repeatability) {
      json j = read_json(vectors_path);
      std::vector<std::vector<double>> vectors;
      if (j.is_object()) {
        for (const auto& r : j.at("restarts"))
          vectors.push_back(r.at("turning_points").get<std::vector<double>>());
      } else {
        vectors = j.get<std::vector<std::vector<double>>>();
      }
      if (min_matches < 1) throw ConfigError("--min-matches must be >= 1");
      EvaluationConfig ev;
      ev.zeta_grid = parse_grid(zeta_grid);
      ev.min_matches = min_matches;
      write_or_print(out_path, sweep_csv(repeatability_sweep(vectors, ev)));
    } else if (*predict) {
      require_file(f.corpus, "corpus");
      Story story = story_from_json(read_json(story_path));
      Corpus corpus = parse_corpus(f.corpus);
      auto outcome = predict_from_story(story, corpus, gap_days, top);
      if (outcome.no_shared_entities)
        std::cerr << "warning: seed shares no entity with the training "
                     "segments; nothing to predict\n";
      write_or_print(out_path,
                     dump(prediction_to_json(outcome.entities, gap_days,
                                             outcome.no_shared_entities)));
    } else if (*synth) {
      auto corpus = generate_synthetic_corpus(spec);
      write_synthetic_corpus(corpus, out_path, truth_path);
    } else if (*run) {
      RunConfig c = load_run_config(config_path);
      if (!run_out.empty()) c.output_dir = run_out;
      if (!f.corpus.empty()) c.corpus_path = f.corpus;
      if (!run_seeds.empty()) c.seed_ids = run_seeds;
      if (run_restarts >= 0) c.optimizer.restarts = run_restarts;
      if (run_seed >= 0) c.optimizer.rng_seed = std::uint64_t(run_seed);
      return run_pipeline(c, std::cerr);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kStageFailure;
  }
  return kOk;
}
