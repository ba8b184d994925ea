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

#include "pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

#include "storyline/error.hpp"

namespace storyline::cli {
namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

const char* const kArtifacts[] = {
    "candidates.json",  "story.json",        "terms.json",
    "chains.json",      "dispersion.csv",    "significance.csv",
    "repeatability.csv", "prediction.json",  "manifest.json"};

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json grid_to_json(const std::vector<double>& grid) { return grid; }

std::vector<double> grid_from_json(const json& j) {
  if (j.is_string()) return parse_grid(j.get<std::string>());
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError("grid must be \"lo:hi:step\" or a list");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(v.get<double>());
  return out;
}

fs::path resolve(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

// Newest seed document, which anchors lookback windows and prediction.
std::size_t newest_seed(const Corpus& corpus,
                        const std::vector<std::string>& seed_ids) {
  std::optional<std::size_t> best;
  for (const auto& id : seed_ids) {
    auto pos = corpus.find(id);
    if (!pos) throw ConfigError("unknown seed id '" + id + "'");
    if (!best || corpus.documents[*pos].timestamp >
                     corpus.documents[*best].timestamp)
      best = pos;
  }
  if (!best) throw ConfigError("no seed ids given");
  return *best;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad grid '" + text + "'");
    }
  }
  if (parts.size() == 1) return parts;
  if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0])
    throw ConfigError("grid must be lo:hi:step with step > 0, got '" + text +
                      "'");
  std::vector<double> out;
  const double lo = parts[0], hi = parts[1], step = parts[2];
  for (long i = 0;; ++i) {
    double v = lo + double(i) * step;
    if (v > hi + 0.5 * step) break;
    out.push_back(std::min(v, hi));
    if (v >= hi) break;
  }
  return out;
}

EvaluationConfig default_evaluation() {
  EvaluationConfig e;
  e.theta_grid = parse_grid("0:1:0.05");
  e.beta_grid = parse_grid("0:10:0.5");
  e.date_max_grid = parse_grid("10:100:10");
  e.zeta_grid = parse_grid("0:100:1");
  return e;
}

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  RunConfig c;
  c.evaluation = default_evaluation();
  try {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    if (j.contains("corpus"))
      c.corpus_path = resolve(j.at("corpus").get<std::string>(), base_dir);
    if (j.contains("output_dir"))
      c.output_dir = resolve(j.at("output_dir").get<std::string>(), base_dir);
    if (j.contains("seed_ids"))
      c.seed_ids = j.at("seed_ids").get<std::vector<std::string>>();
    if (j.contains("variant"))
      c.variant = parse_objective_variant(j.at("variant").get<std::string>());
    c.top_k = j.value("top_k", c.top_k);

    if (auto it = j.find("topics"); it != j.end()) {
      const json& t = *it;
      if (t.contains("file") && !t.at("file").is_null())
        c.topics.file = resolve(t.at("file").get<std::string>(), base_dir);
      c.topics.lda_k = t.value("lda_k", c.topics.lda_k);
      c.topics.lda_iterations = t.value("lda_iterations", c.topics.lda_iterations);
      c.topics.lda_seed = t.value("lda_seed", c.topics.lda_seed);
    }
    if (auto it = j.find("candidates"); it != j.end()) {
      const json& f = *it;
      if (f.contains("alpha") && !f.at("alpha").is_null())
        c.candidates.alpha = f.at("alpha").get<double>();
      if (f.contains("t_min") && !f.at("t_min").is_null())
        c.candidates.t_min = Date::parse(f.at("t_min").get<std::string>());
      if (f.contains("lookback_days") && !f.at("lookback_days").is_null())
        c.lookback_days = f.at("lookback_days").get<int>();
      c.candidates.date_max = f.value("date_max", c.candidates.date_max);
    }
    if (auto it = j.find("segmentation"); it != j.end()) {
      const json& s = *it;
      auto& seg = c.segmentation;
      seg.num_segments = s.value("num_segments", seg.num_segments);
      seg.gamma_variance = s.value("gamma_variance", seg.gamma_variance);
      seg.overlap_sigma = s.value("overlap_sigma", seg.overlap_sigma);
    }
    if (auto it = j.find("optimizer"); it != j.end()) {
      const json& o = *it;
      auto& opt = c.optimizer;
      opt.max_iterations = o.value("max_iterations", opt.max_iterations);
      opt.gradient_step = o.value("gradient_step", opt.gradient_step);
      opt.convergence_tolerance =
          o.value("convergence_tolerance", opt.convergence_tolerance);
      opt.relative_reduction_tolerance = o.value(
          "relative_reduction_tolerance", opt.relative_reduction_tolerance);
      opt.restarts = o.value("restarts", opt.restarts);
      opt.rng_seed = o.value("rng_seed", opt.rng_seed);
      opt.memory_pairs = o.value("memory_pairs", opt.memory_pairs);
      opt.max_line_search_steps =
          o.value("max_line_search_steps", opt.max_line_search_steps);
    }
    if (auto it = j.find("evaluation"); it != j.end()) {
      const json& e = *it;
      auto& ev = c.evaluation;
      if (e.contains("theta_grid")) ev.theta_grid = grid_from_json(e["theta_grid"]);
      if (e.contains("beta_grid")) ev.beta_grid = grid_from_json(e["beta_grid"]);
      if (e.contains("date_max_grid"))
        ev.date_max_grid = grid_from_json(e["date_max_grid"]);
      if (e.contains("zeta_grid")) ev.zeta_grid = grid_from_json(e["zeta_grid"]);
      ev.significance_beta = e.value("significance_beta", ev.significance_beta);
      ev.significance_samples =
          e.value("significance_samples", ev.significance_samples);
      ev.significance_seed = e.value("significance_seed", ev.significance_seed);
      ev.min_matches = e.value("min_matches", ev.min_matches);
      ev.kmeans_seed = e.value("kmeans_seed", ev.kmeans_seed);
    }
    if (auto it = j.find("prediction"); it != j.end()) {
      const json& p = *it;
      c.prediction.enabled = p.value("enabled", c.prediction.enabled);
      c.prediction.gap_days = p.value("gap_days", c.prediction.gap_days);
      c.prediction.top = p.value("top", c.prediction.top);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  c.segmentation.date_max = c.candidates.date_max;
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " +
                      e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

json to_json(const RunConfig& c) {
  json j;
  j["corpus"] = c.corpus_path.string();
  j["output_dir"] = c.output_dir.string();
  j["seed_ids"] = c.seed_ids;
  j["variant"] = std::string(to_string(c.variant));
  j["top_k"] = c.top_k;
  json topics = {{"lda_k", c.topics.lda_k},
                 {"lda_iterations", c.topics.lda_iterations},
                 {"lda_seed", c.topics.lda_seed}};
  topics["file"] = c.topics.file ? json(c.topics.file->string()) : json();
  j["topics"] = topics;
  json cand;
  cand["alpha"] = std::isfinite(c.candidates.alpha) ? json(c.candidates.alpha)
                                                    : json();
  cand["t_min"] = c.candidates.t_min ? json(c.candidates.t_min->to_string())
                                     : json();
  cand["lookback_days"] = c.lookback_days ? json(*c.lookback_days) : json();
  cand["date_max"] = c.candidates.date_max;
  j["candidates"] = cand;
  j["segmentation"] = {{"num_segments", c.segmentation.num_segments},
                       {"gamma_variance", c.segmentation.gamma_variance},
                       {"overlap_sigma", c.segmentation.overlap_sigma}};
  const auto& o = c.optimizer;
  j["optimizer"] = {{"max_iterations", o.max_iterations},
                    {"gradient_step", o.gradient_step},
                    {"convergence_tolerance", o.convergence_tolerance},
                    {"relative_reduction_tolerance",
                     o.relative_reduction_tolerance},
                    {"restarts", o.restarts},
                    {"rng_seed", o.rng_seed},
                    {"memory_pairs", o.memory_pairs},
                    {"max_line_search_steps", o.max_line_search_steps}};
  const auto& e = c.evaluation;
  j["evaluation"] = {{"theta_grid", grid_to_json(e.theta_grid)},
                     {"beta_grid", grid_to_json(e.beta_grid)},
                     {"date_max_grid", grid_to_json(e.date_max_grid)},
                     {"zeta_grid", grid_to_json(e.zeta_grid)},
                     {"significance_beta", e.significance_beta},
                     {"significance_samples", e.significance_samples},
                     {"significance_seed", e.significance_seed},
                     {"min_matches", e.min_matches},
                     {"kmeans_seed", e.kmeans_seed}};
  j["prediction"] = {{"enabled", c.prediction.enabled},
                     {"gap_days", c.prediction.gap_days},
                     {"top", c.prediction.top}};
  return j;
}

void validate(const RunConfig& c) {
  if (c.corpus_path.empty()) throw ConfigError("no corpus given");
  if (!fs::is_regular_file(c.corpus_path))
    throw ConfigError("corpus file not found: " + c.corpus_path.string());
  if (c.topics.file && !fs::is_regular_file(*c.topics.file))
    throw ConfigError("topics file not found: " + c.topics.file->string());
  if (c.topics.file && c.topics.lda_k > 0)
    throw ConfigError("choose either a topics file or the LDA sampler");
  if (c.topics.lda_k < 0 || c.topics.lda_iterations < 1)
    throw ConfigError("LDA needs k >= 0 and at least one iteration");
  if (c.seed_ids.empty()) throw ConfigError("no seed ids given");
  if (c.candidates.t_min && c.lookback_days)
    throw ConfigError("t_min and lookback_days are mutually exclusive");
  if (c.lookback_days && *c.lookback_days < 0)
    throw ConfigError("lookback_days must be >= 0");
  if (c.output_dir.empty()) throw ConfigError("no output directory given");
  if (c.top_k < 1) throw ConfigError("top_k must be >= 1");
  c.candidates.validate();
  c.segmentation.validate();
  c.optimizer.validate();
  const auto& e = c.evaluation;
  if (e.significance_samples < 1)
    throw ConfigError("significance_samples must be >= 1");
  if (e.significance_beta < 0) throw ConfigError("significance_beta must be >= 0");
  for (double b : e.beta_grid)
    if (b < 0) throw ConfigError("beta grid values must be >= 0");
  for (double d : e.date_max_grid)
    if (!(d > 0)) throw ConfigError("date_max grid values must be > 0");
  for (double z : e.zeta_grid)
    if (z < 0) throw ConfigError("zeta grid values must be >= 0");
  if (e.min_matches < 1) throw ConfigError("min_matches must be >= 1");
  if (c.prediction.enabled && !(c.prediction.gap_days > 0))
    throw ConfigError("prediction gap_days must be > 0");
}

std::string config_hash(const RunConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::vector<TopicDistribution> load_topics(const Corpus& corpus,
                                           const TopicsSource& source,
                                           bool required,
                                           std::vector<std::string>& warnings) {
  if (source.file) {
    auto by_id = read_topics_sidecar(*source.file);
    std::vector<TopicDistribution> out;
    out.reserve(corpus.size());
    for (const auto& doc : corpus.documents) {
      auto it = by_id.find(doc.id);
      if (it == by_id.end())
        throw Error("topics file has no entry for '" + doc.id + "'");
      out.push_back(it->second);
    }
    return out;
  }
  if (source.lda_k > 0) {
    LdaOptions opt;
    opt.num_topics = source.lda_k;
    opt.iterations = source.lda_iterations;
    opt.rng_seed = source.lda_seed;
    auto lda = fit_reference_lda(corpus, opt);
    warnings.insert(warnings.end(), lda.warnings.begin(), lda.warnings.end());
    return std::move(lda.distributions);
  }
  auto embedded = embedded_topics(corpus);
  if (embedded.empty() && required)
    throw ConfigError(
        "a finite alpha needs topics: pass a topics file, an LDA k, or a "
        "corpus with embedded topics");
  return embedded;
}

CandidateFilterConfig resolve_filter(const Corpus& corpus,
                                     const RunConfig& config) {
  CandidateFilterConfig f = config.candidates;
  if (config.lookback_days) {
    const auto seed = newest_seed(corpus, config.seed_ids);
    f.t_min = corpus.documents[seed].timestamp.plus_days(-*config.lookback_days);
  }
  return f;
}

CandidateSet select_candidates(const Corpus& corpus, const RunConfig& config,
                               std::vector<std::string>& warnings) {
  const auto filter = resolve_filter(corpus, config);
  const bool need_topics = std::isfinite(filter.alpha);
  auto topics = need_topics
                    ? load_topics(corpus, config.topics, true, warnings)
                    : std::vector<TopicDistribution>{};
  return filter_candidates(corpus, topics, config.seed_ids, filter);
}

json candidates_to_json(const CandidateSet& candidates, const Corpus& corpus) {
  json j;
  j["date_max"] = candidates.date_max;
  json seeds = json::array();
  for (auto i : candidates.seed_indices)
    seeds.push_back(candidates.documents[i].doc_id);
  j["seed_ids"] = seeds;
  json docs = json::array();
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto& doc = corpus.documents[candidates.corpus_indices[i]];
    const bool seed = std::find(candidates.seed_indices.begin(),
                                candidates.seed_indices.end(),
                                i) != candidates.seed_indices.end();
    docs.push_back({{"id", doc.id},
                    {"date", doc.timestamp.to_string()},
                    {"scaled_time", candidates.scaled_times[i]},
                    {"seed", seed}});
  }
  j["candidates"] = docs;
  return j;
}

json story_to_json(const Story& story) {
  json segments = json::array();
  for (const auto& seg : story.segments) {
    json docs = json::array();
    for (const auto& d : seg.docs)
      docs.push_back({{"id", d.doc_id},
                      {"weight", d.weight},
                      {"membership", d.membership}});
    segments.push_back(
        {{"bounds", {seg.bounds.lower, seg.bounds.upper}}, {"docs", docs}});
  }
  return {{"turning_points", story.turning_points},
          {"segments", segments},
          {"seed_ids", story.seed_ids}};
}

Story story_from_json(const json& j) {
  Story story;
  try {
    story.turning_points = j.at("turning_points").get<std::vector<double>>();
    for (const auto& s : j.at("segments")) {
      StorySegment seg;
      const auto& b = s.at("bounds");
      if (!b.is_array() || b.size() != 2)
        throw Error("segment bounds must be [lo, hi]");
      seg.bounds = {b[0].get<double>(), b[1].get<double>()};
      for (const auto& d : s.at("docs")) {
        RankedDocument doc;
        doc.doc_id = d.at("id").get<std::string>();
        doc.weight = d.at("weight").get<double>();
        doc.membership = d.at("membership").get<double>();
        seg.docs.push_back(std::move(doc));
      }
      story.segments.push_back(std::move(seg));
    }
    if (j.contains("seed_ids"))
      story.seed_ids = j.at("seed_ids").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw Error(std::string("malformed story: ") + e.what());
  }
  return story;
}

json terms_to_json(const ObjectiveTerms& terms, const StoryResult& result) {
  json segments = json::array();
  for (const auto& s : terms.segments)
    segments.push_back({{"bounds", {s.bounds.lower, s.bounds.upper}},
                        {"incoherence", s.incoherence},
                        {"cross_term", s.cross_term},
                        {"degenerate", s.degenerate},
                        {"contribution", s.contribution}});
  json restarts = json::array();
  for (const auto& r : result.restarts) {
    auto tp = r.solution.interior_turning_points;
    std::sort(tp.begin(), tp.end());
    restarts.push_back({{"value", r.value},
                        {"iterations", r.iterations},
                        {"status", std::string(to_string(r.status))},
                        {"aborted", r.aborted},
                        {"turning_points", tp}});
  }
  return {{"variant", std::string(to_string(terms.variant))},
          {"value", terms.value},
          {"segment_sum", terms.segment_sum},
          {"overlap", terms.overlap},
          {"uniformity", terms.uniformity},
          {"segments", segments},
          {"best_restart", result.best_restart},
          {"restarts", restarts}};
}

json prediction_to_json(
    const std::vector<std::pair<std::string, double>>& entities,
    double gap_days, bool no_shared_entities) {
  json list = json::array();
  for (const auto& [name, w] : entities)
    list.push_back({{"name", name}, {"predicted_weight", w}});
  return {{"entities", list},
          {"gap_days", gap_days},
          {"no_shared_entities", no_shared_entities}};
}

Chain diffusion_chain(const Story& story, const CandidateSet& candidates) {
  std::vector<std::size_t> picks;
  for (const auto& seg : story.segments)
    if (!seg.docs.empty()) picks.push_back(seg.docs.front().candidate_index);
  std::sort(picks.begin(), picks.end());  // candidates are date-ordered
  picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
  Chain chain;
  for (auto i : picks) chain.doc_ids.push_back(candidates.documents[i].doc_id);
  chain.truncated = chain.size() < story.segments.size();
  return chain;
}

std::vector<DispersionRow> dispersion_sweep(
    const std::vector<std::pair<std::string, std::vector<Chain>>>& methods,
    const Corpus& corpus, const std::vector<double>& thetas) {
  std::vector<DispersionRow> rows;
  for (const auto& [method, chains] : methods) {
    std::vector<const Chain*> usable;
    for (const auto& c : chains)
      if (c.size() >= 3) usable.push_back(&c);
    if (usable.empty()) continue;
    for (double theta : thetas) {
      double sum = 0.0;
      for (const auto* c : usable)
        sum += dispersion_coefficient(*c, corpus, theta);
      rows.push_back({theta, sum / double(usable.size()), method});
    }
  }
  return rows;
}

std::string dispersion_csv(const std::vector<DispersionRow>& rows) {
  std::string out = "theta,mean_psi,method\n";
  for (const auto& r : rows)
    out += format_number(r.theta) + "," + format_number(r.mean_psi) + "," +
           r.method + "\n";
  return out;
}

std::vector<SweepPoint> significance_sweep(
    const std::vector<double>& turning_points, double date_max,
    const EvaluationConfig& config) {
  std::vector<SweepPoint> out;
  auto tp = turning_points;
  std::sort(tp.begin(), tp.end());
  const auto samples =
      draw_turning_point_samples(tp.size(), date_max,
                                 config.significance_samples,
                                 config.significance_seed);
  for (double beta : config.beta_grid)
    out.push_back({"beta", beta, significance_p_value(tp, samples, beta)});
  for (double d : config.date_max_grid) {
    std::vector<double> scaled(tp.size());
    for (std::size_t i = 0; i < tp.size(); ++i) scaled[i] = tp[i] * d / date_max;
    SignificanceConfig sc;
    sc.num_samples = config.significance_samples;
    sc.tolerance = config.significance_beta;
    out.push_back({"date_max", d,
                   significance_p_value(scaled, d, sc, config.significance_seed)});
  }
  return out;
}

std::vector<SweepPoint> repeatability_sweep(
    const std::vector<std::vector<double>>& vectors,
    const EvaluationConfig& config) {
  std::vector<SweepPoint> out;
  for (double zeta : config.zeta_grid) {
    RepeatabilityConfig rc;
    rc.distance_threshold = zeta;
    rc.min_matches = config.min_matches;
    out.push_back({"zeta", zeta, double(repeatability_buckets(vectors, rc))});
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepPoint>& points) {
  std::string out = "parameter,x,value\n";
  for (const auto& p : points)
    out += p.parameter + "," + format_number(p.x) + "," +
           format_number(p.value) + "\n";
  return out;
}

PredictionOutcome predict_from_story(const Story& story, const Corpus& corpus,
                                     double gap_days, std::size_t top) {
  if (!(gap_days > 0)) throw ConfigError("gap_days must be > 0");
  if (story.seed_ids.empty()) throw Error("story has no seed ids");
  const auto seed = newest_seed(corpus, story.seed_ids);
  const auto split = split_story(story, corpus);
  PredictionOutcome out;
  out.training_docs = split.training.size();
  const auto table = build_pair_table(split.training);
  if (table.empty()) {
    out.no_shared_entities = true;
    return out;
  }
  const auto models = fit_term_models(table);
  const auto prediction =
      predict_future_weights(corpus.weighted[seed], gap_days, models);
  out.no_shared_entities = prediction.no_shared_entities;
  out.entities = top_predictions(prediction, corpus.vocabulary, top);
  return out;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed for " + path.string());
}

int run_pipeline(const RunConfig& config, std::ostream& log) {
  try {
    validate(config);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (ec) {
    log << "cannot create " << config.output_dir.string() << ": "
        << ec.message() << "\n";
    return kStageFailure;
  }
  for (const char* name : kArtifacts) {
    fs::remove(config.output_dir / name, ec);
    fs::remove(config.output_dir / (std::string(name) + ".partial"), ec);
  }

  std::vector<std::string> written;
  std::vector<std::string> warnings;
  std::string stage = "ingest";
  auto emit = [&](const std::string& name, const std::string& text) {
    write_text(config.output_dir / name, text);
    written.push_back(name);
  };

  try {
    const Corpus corpus = parse_corpus(config.corpus_path);
    warnings.insert(warnings.end(), corpus.warnings.begin(),
                    corpus.warnings.end());

    stage = "candidates";
    const CandidateSet candidates =
        select_candidates(corpus, config, warnings);
    emit("candidates.json", dump(candidates_to_json(candidates, corpus)));
    log << "candidates: " << candidates.size() << "\n";

    stage = "fit";
    const StoryResult result = fit_story(candidates, config.segmentation,
                                         config.optimizer, config.variant);
    const Story story = extract_story(result, candidates, config.segmentation,
                                      config.top_k);
    emit("story.json", dump(story_to_json(story)));
    const PairwiseGeometry geometry(candidates);
    const auto terms = objective_terms(config.variant, geometry,
                                       config.segmentation,
                                       result.best_solution);
    emit("terms.json", dump(terms_to_json(terms, result)));
    log << "objective: " << result.objective_value << "\n";

    stage = "evaluate";
    const Chain diffusion = diffusion_chain(story, candidates);
    const auto& seed_id =
        corpus.documents[newest_seed(corpus, config.seed_ids)].id;
    const std::size_t length = diffusion.size();
    std::vector<std::pair<std::string, std::vector<Chain>>> methods;
    methods.push_back({"diffusion", {diffusion}});
    if (length >= 3) {
      methods.push_back(
          {"similarity", {similarity_chain_baseline(corpus, seed_id, length)}});
      methods.push_back({"kmeans",
                         {kmeans_chain_baseline(corpus, seed_id, length,
                                                config.evaluation.kmeans_seed)}});
    } else {
      warnings.push_back("story chain shorter than 3; dispersion skipped");
    }
    json chains = json::array();
    for (const auto& [method, list] : methods)
      for (const auto& c : list)
        chains.push_back({{"method", method},
                          {"doc_ids", c.doc_ids},
                          {"truncated", c.truncated}});
    emit("chains.json", dump({{"chains", chains}}));
    emit("dispersion.csv",
         dispersion_csv(dispersion_sweep(methods, corpus,
                                         config.evaluation.theta_grid)));
    emit("significance.csv",
         sweep_csv(significance_sweep(story.turning_points,
                                      candidates.date_max, config.evaluation)));
    std::vector<std::vector<double>> restart_points;
    for (const auto& r : result.restarts) {
      auto tp = r.solution.interior_turning_points;
      std::sort(tp.begin(), tp.end());
      restart_points.push_back(std::move(tp));
    }
    emit("repeatability.csv",
         sweep_csv(repeatability_sweep(restart_points, config.evaluation)));

    if (config.prediction.enabled) {
      stage = "predict";
      const auto outcome = predict_from_story(
          story, corpus, config.prediction.gap_days, config.prediction.top);
      if (outcome.no_shared_entities)
        warnings.push_back("seed shares no entity with the training segments");
      emit("prediction.json",
           dump(prediction_to_json(outcome.entities, config.prediction.gap_days,
                                   outcome.no_shared_entities)));
    }

    json manifest = {{"tool", "storyline"},
                     {"version", kVersion},
                     {"config_hash", config_hash(config)},
                     {"config", to_json(config)},
                     {"artifacts", written},
                     {"warnings", warnings}};
    emit("manifest.json", dump(manifest));
    return kOk;
  } catch (const std::exception& e) {
    const bool config_error = dynamic_cast<const ConfigError*>(&e) != nullptr;
    log << stage << " failed: " << e.what() << "\n";
    for (const auto& name : written)
      fs::rename(config.output_dir / name,
                 config.output_dir / (name + ".partial"), ec);
    json manifest = {{"tool", "storyline"},
                     {"version", kVersion},
                     {"config_hash", config_hash(config)},
                     {"config", to_json(config)},
                     {"artifacts", written},
                     {"warnings", warnings},
                     {"failed_stage", stage},
                     {"error", e.what()}};
    try {
      write_text(config.output_dir / "manifest.json.partial", dump(manifest));
    } catch (const std::exception&) {
    }
    return config_error ? kConfigError : kStageFailure;
  }
}

}  // namespace storyline::cli
