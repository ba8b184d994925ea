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
#include <string>
#include <utility>
#include <vector>

#include "storyline/corpus.hpp"

namespace storyline {

// Planted-story generator: clusters occupy disjoint time ranges and draw
// from disjoint core vocabularies, optionally sprinkled with shared
// background entities.
struct SyntheticSpec {
  std::size_t clusters = 3;
  std::size_t docs_per_cluster = 20;
  std::size_t core_vocab_size = 12;
  std::size_t background_vocab_size = 6;
  double background_probability = 0.3;
  std::size_t min_entities_per_doc = 4;
  std::size_t max_entities_per_doc = 7;
  // Day ranges [lo, hi] per cluster, relative to start_date. Empty means
  // equal-width ranges over [0, total_days] separated by 5-day gaps.
  std::vector<std::pair<double, double>> day_ranges;
  int total_days = 100;
  std::string start_date = "2015-01-01";
  std::uint64_t rng_seed = 0;

  std::vector<std::pair<double, double>> resolved_ranges() const;
};

struct SyntheticCorpus {
  std::vector<Document> documents;  // sorted by date
  std::vector<std::size_t> cluster_of;
  // Midpoints of the gaps between consecutive clusters, in days from
  // start_date (equal to scaled time when total_days == date_max).
  std::vector<double> planted_boundaries;
  std::string seed_id;  // the newest document
};

SyntheticCorpus generate_synthetic_corpus(const SyntheticSpec& spec);

// Writes the JSONL corpus and a JSON ground-truth file with the planted
// boundaries, the seed id and the cluster of every document.
void write_synthetic_corpus(const SyntheticCorpus& corpus,
                            const std::filesystem::path& jsonl_path,
                            const std::filesystem::path& truth_path);

}  // namespace storyline
