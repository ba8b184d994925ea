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

#include "storyline/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "storyline/error.hpp"
#include "storyline/random.hpp"

namespace storyline {

std::vector<std::pair<double, double>> SyntheticSpec::resolved_ranges() const {
  if (!day_ranges.empty()) {
    if (day_ranges.size() != clusters) {
      throw ConfigError("day_ranges must have one entry per cluster");
    }
    return day_ranges;
  }
  constexpr double kGap = 5.0;
  const double width =
      (double(total_days) - kGap * double(clusters - 1)) / double(clusters);
  if (!(width > 0.0)) throw ConfigError("too many clusters for total_days");
  std::vector<std::pair<double, double>> out;
  for (std::size_t c = 0; c < clusters; ++c) {
    const double lo = double(c) * (width + kGap);
    out.emplace_back(lo, lo + width);
  }
  return out;
}

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.clusters < 1 || spec.docs_per_cluster < 1) {
    throw ConfigError("synthetic corpus needs clusters and documents");
  }
  if (spec.min_entities_per_doc < 1 ||
      spec.max_entities_per_doc < spec.min_entities_per_doc ||
      spec.max_entities_per_doc > spec.core_vocab_size) {
    throw ConfigError("invalid entities-per-document range");
  }
  const auto ranges = spec.resolved_ranges();
  const Date start = Date::parse(spec.start_date);
  Rng rng(spec.rng_seed);
  static constexpr EntityType kTypes[] = {
      EntityType::kPerson, EntityType::kOrganization, EntityType::kLocation};

  SyntheticCorpus out;
  std::vector<std::pair<Document, std::size_t>> docs;
  for (std::size_t c = 0; c < spec.clusters; ++c) {
    const auto [lo, hi] = ranges[c];
    for (std::size_t i = 0; i < spec.docs_per_cluster; ++i) {
      const double frac = spec.docs_per_cluster == 1
                              ? 0.0
                              : double(i) / double(spec.docs_per_cluster - 1);
      const long long day = std::llround(lo + (hi - lo) * frac);
      char id[32];
      std::snprintf(id, sizeof(id), "c%zu-%03zu", c, i);
      Document doc;
      doc.id = id;
      doc.timestamp = start.plus_days(day);
      doc.title = "Cluster " + std::to_string(c) + " report " + std::to_string(i);

      std::vector<std::size_t> pool(spec.core_vocab_size);
      for (std::size_t k = 0; k < pool.size(); ++k) pool[k] = k;
      const std::size_t span =
          spec.max_entities_per_doc - spec.min_entities_per_doc + 1;
      const std::size_t m = spec.min_entities_per_doc + rng.below(span);
      for (std::size_t k = 0; k < m; ++k) {
        const std::size_t pick = k + rng.below(pool.size() - k);
        std::swap(pool[k], pool[pick]);
        const std::size_t e = pool[k];
        doc.entities.push_back({"c" + std::to_string(c) + "_e" + std::to_string(e),
                                kTypes[e % 3], int(1 + rng.below(3))});
      }
      if (spec.background_vocab_size > 0 &&
          rng.uniform() < spec.background_probability) {
        const auto b = rng.below(spec.background_vocab_size);
        doc.entities.push_back(
            {"bg_" + std::to_string(b), EntityType::kOther, 1});
      }
      docs.emplace_back(std::move(doc), c);
    }
  }
  std::stable_sort(docs.begin(), docs.end(), [](const auto& a, const auto& b) {
    if (a.first.timestamp != b.first.timestamp) {
      return a.first.timestamp < b.first.timestamp;
    }
    return a.first.id < b.first.id;
  });
  for (auto& [doc, c] : docs) {
    out.documents.push_back(std::move(doc));
    out.cluster_of.push_back(c);
  }
  for (std::size_t c = 0; c + 1 < spec.clusters; ++c) {
    out.planted_boundaries.push_back(0.5 * (ranges[c].second + ranges[c + 1].first));
  }
  out.seed_id = out.documents.back().id;
  return out;
}

void write_synthetic_corpus(const SyntheticCorpus& corpus,
                            const std::filesystem::path& jsonl_path,
                            const std::filesystem::path& truth_path) {
  std::ofstream out(jsonl_path, std::ios::binary);
  if (!out) throw Error("cannot write " + jsonl_path.string());
  for (const auto& doc : corpus.documents) {
    nlohmann::json rec = {{"id", doc.id},
                          {"date", doc.timestamp.to_string()},
                          {"title", doc.title}};
    nlohmann::json ents = nlohmann::json::array();
    for (const auto& e : doc.entities) {
      ents.push_back(
          {{"name", e.name}, {"type", to_string(e.type)}, {"count", e.count}});
    }
    rec["entities"] = std::move(ents);
    out << rec.dump() << '\n';
  }
  nlohmann::json truth = {{"planted_boundaries", corpus.planted_boundaries},
                          {"seed_id", corpus.seed_id}};
  nlohmann::json clusters = nlohmann::json::object();
  for (std::size_t i = 0; i < corpus.documents.size(); ++i) {
    clusters[corpus.documents[i].id] = corpus.cluster_of[i];
  }
  truth["clusters"] = std::move(clusters);
  std::ofstream t(truth_path, std::ios::binary);
  if (!t) throw Error("cannot write " + truth_path.string());
  t << truth.dump(2) << '\n';
}

}  // namespace storyline
