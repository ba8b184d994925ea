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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "storyline/corpus.hpp"
#include "storyline/optimizer.hpp"

namespace storyline {

// One (past entity, future entity) co-occurrence across a time-ordered
// document pair.
struct PairRow {
  EntityIndex past_entity = 0;
  EntityIndex future_entity = 0;
  double past_weight = 0.0;
  double future_weight = 0.0;
  double date_gap = 0.0;  // days, > 0
};

// Linear model future_weight ~ intercept + weight_coefficient * past_weight
// + gap_coefficient * date_gap for one future entity.
struct TermModel {
  EntityIndex future_entity = 0;
  double intercept = 0.0;
  double weight_coefficient = 0.0;
  double gap_coefficient = 0.0;
  std::size_t training_rows = 0;
  // Past entities seen in this model's rows, sorted.
  std::vector<EntityIndex> past_entities;

  double predict(double past_weight, double date_gap) const {
    return intercept + weight_coefficient * past_weight +
           gap_coefficient * date_gap;
  }
};

struct TermModels {
  std::map<EntityIndex, TermModel> models;
  // Future entities with fewer than two rows.
  std::vector<EntityIndex> skipped;
};

// Every ordered pair (d_i, d_j) with t_i < t_j contributes one row per
// (entity of d_i, entity of d_j).
std::vector<PairRow> build_pair_table(
    std::span<const WeightedDocument> training_docs);

// Per-future-entity least squares with intercept; rank-deficient designs
// get the minimum-norm solution.
TermModels fit_term_models(std::span<const PairRow> table);

struct Prediction {
  std::map<EntityIndex, double> weights;
  // True when no seed entity appears among any model's past entities.
  bool no_shared_entities = false;
};

// For each model sharing at least one past entity with the seed, averages
// the model's output over those seed entities and clamps to [0, 1].
// Throws ConfigError unless date_gap > 0.
Prediction predict_future_weights(const WeightedDocument& seed,
                                  double date_gap, const TermModels& models);

// Highest predicted weights first, ties by name.
std::vector<std::pair<std::string, double>> top_predictions(
    const Prediction& prediction, const EntityVocabulary& vocabulary,
    std::size_t top);

struct TrainTestSplit {
  std::vector<WeightedDocument> training;
  std::vector<WeightedDocument> testing;
};

// Documents of the earliest |S| - 1 story segments train; the final
// segment tests.
TrainTestSplit split_story(const Story& story, const Corpus& corpus);

}  // namespace storyline
