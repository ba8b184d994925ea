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

#include "storyline/prediction.hpp"

#include <algorithm>
#include <set>

#include <Eigen/Dense>

#include "storyline/error.hpp"

namespace storyline {

std::vector<PairRow> build_pair_table(
    std::span<const WeightedDocument> training_docs) {
  std::vector<PairRow> rows;
  for (const auto& past : training_docs) {
    for (const auto& future : training_docs) {
      if (!(past.timestamp < future.timestamp)) continue;
      const double gap =
          double(future.timestamp.day_number() - past.timestamp.day_number());
      for (const auto& [pe, pw] : past.weights.entries()) {
        for (const auto& [fe, fw] : future.weights.entries()) {
          rows.push_back({pe, fe, pw, fw, gap});
        }
      }
    }
  }
  return rows;
}

TermModels fit_term_models(std::span<const PairRow> table) {
  if (table.empty()) throw Error("pair table is empty");
  std::map<EntityIndex, std::vector<const PairRow*>> by_entity;
  for (const auto& row : table) by_entity[row.future_entity].push_back(&row);

  TermModels out;
  for (const auto& [entity, rows] : by_entity) {
    if (rows.size() < 2) {
      out.skipped.push_back(entity);
      continue;
    }
    const Eigen::Index n = Eigen::Index(rows.size());
    Eigen::MatrixXd x(n, 3);
    Eigen::VectorXd y(n);
    std::set<EntityIndex> past;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& r = *rows[std::size_t(i)];
      x(i, 0) = 1.0;
      x(i, 1) = r.past_weight;
      x(i, 2) = r.date_gap;
      y[i] = r.future_weight;
      past.insert(r.past_entity);
    }
    const Eigen::VectorXd beta =
        x.completeOrthogonalDecomposition().solve(y);
    TermModel model;
    model.future_entity = entity;
    model.intercept = beta[0];
    model.weight_coefficient = beta[1];
    model.gap_coefficient = beta[2];
    model.training_rows = rows.size();
    model.past_entities.assign(past.begin(), past.end());
    out.models.emplace(entity, std::move(model));
  }
  return out;
}

Prediction predict_future_weights(const WeightedDocument& seed,
                                  double date_gap, const TermModels& models) {
  if (!(date_gap > 0.0)) throw ConfigError("date_gap must be > 0");
  Prediction out;
  for (const auto& [entity, model] : models.models) {
    double sum = 0.0;
    std::size_t used = 0;
    for (const auto& [idx, w] : seed.weights.entries()) {
      if (std::binary_search(model.past_entities.begin(),
                             model.past_entities.end(), idx)) {
        sum += model.predict(w, date_gap);
        ++used;
      }
    }
    if (used == 0) continue;
    out.weights[entity] = std::clamp(sum / double(used), 0.0, 1.0);
  }
  out.no_shared_entities = out.weights.empty();
  return out;
}

std::vector<std::pair<std::string, double>> top_predictions(
    const Prediction& prediction, const EntityVocabulary& vocabulary,
    std::size_t top) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& [idx, w] : prediction.weights) {
    out.emplace_back(vocabulary.name(idx), w);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (out.size() > top) out.resize(top);
  return out;
}

TrainTestSplit split_story(const Story& story, const Corpus& corpus) {
  TrainTestSplit split;
  for (std::size_t s = 0; s < story.segments.size(); ++s) {
    const bool last = s + 1 == story.segments.size();
    for (const auto& doc : story.segments[s].docs) {
      auto pos = corpus.find(doc.doc_id);
      if (!pos) throw Error("story references unknown document '" + doc.doc_id + "'");
      (last ? split.testing : split.training).push_back(corpus.weighted[*pos]);
    }
  }
  return split;
}

}  // namespace storyline
