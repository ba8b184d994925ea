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
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "storyline/corpus.hpp"
#include "storyline/topic_model.hpp"

namespace storyline {

struct CandidateFilterConfig {
  // Maximum KL(T_d || T_seed) against every seed. Infinity disables the
  // topical filter (and topics are then not required).
  double alpha = std::numeric_limits<double>::infinity();
  // Exclusive lower bound on publication date; none means unbounded.
  std::optional<Date> t_min;
  // Upper end of the scaled timeline.
  double date_max = 100.0;

  void validate() const;
};

// Documents eligible for story fitting, sorted by date, with their
// positions on the scaled timeline [0, date_max].
struct CandidateSet {
  std::vector<WeightedDocument> documents;
  std::vector<double> scaled_times;
  std::vector<std::size_t> seed_indices;
  // Position of each candidate in the source corpus.
  std::vector<std::size_t> corpus_indices;
  double date_max = 100.0;

  std::size_t size() const noexcept { return documents.size(); }
};

// Includes d iff t_min < t_d < max(t_seed) and KL(T_d || T_s) <= alpha for
// every seed s. Seeds are always included. `topics` is aligned with
// corpus.documents and may be empty when alpha is infinite.
CandidateSet filter_candidates(const Corpus& corpus,
                               std::span<const TopicDistribution> topics,
                               std::span<const std::string> seed_ids,
                               const CandidateFilterConfig& config);

// Affine map of min date -> 0 and max date -> date_max. A single distinct
// date maps to 0.
std::vector<double> normalize_dates(std::span<const Date> dates,
                                    double date_max);

// Candidate set built directly from documents and already-scaled times,
// used by tests and synthetic experiments.
CandidateSet make_candidate_set(std::vector<WeightedDocument> documents,
                                std::vector<double> scaled_times,
                                double date_max,
                                std::vector<std::size_t> seed_indices = {});

}  // namespace storyline
