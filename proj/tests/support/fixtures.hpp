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

// Glue between the dense oracle world and library types.

#include <string>
#include <vector>

#include "oracles.hpp"
#include "storyline/candidates.hpp"
#include "storyline/corpus.hpp"
#include "storyline/sparse_vector.hpp"
#include "storyline/synthetic.hpp"

namespace fixtures {

inline storyline::SparseVector to_sparse(const oracle::Dense& d) {
  std::vector<storyline::SparseVector::Entry> entries;
  for (std::size_t e = 0; e < d.size(); ++e)
    if (d[e] != 0.0) entries.push_back({storyline::EntityIndex(e), d[e]});
  return storyline::SparseVector(std::move(entries));
}

inline oracle::Dense to_dense(const storyline::SparseVector& v,
                              std::size_t dim) {
  oracle::Dense d(dim, 0.0);
  for (const auto& [i, w] : v.entries()) d.at(i) = w;
  return d;
}

inline storyline::Document doc(
    std::string id, std::string date,
    std::vector<std::pair<std::string, int>> entities) {
  storyline::Document d;
  d.id = std::move(id);
  d.timestamp = storyline::Date::parse(date);
  d.title = d.id;
  for (auto& [name, count] : entities)
    d.entities.push_back({name, storyline::EntityType::kOther, count});
  return d;
}

// Candidate set over dense vectors at the given scaled times.
inline storyline::CandidateSet candidates(const std::vector<oracle::Dense>& docs,
                                          const std::vector<double>& times,
                                          double date_max = 100.0) {
  std::vector<storyline::WeightedDocument> wd;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    storyline::WeightedDocument w;
    w.doc_id = "d" + std::to_string(i);
    w.timestamp = storyline::Date::from_day_number(long(i));
    w.weights = to_sparse(docs[i]);
    wd.push_back(std::move(w));
  }
  return storyline::make_candidate_set(std::move(wd), times, date_max);
}

struct Planted {
  storyline::SyntheticCorpus truth;
  storyline::Corpus corpus;
  storyline::CandidateSet candidates;
};

// The 3-cluster, 60-document planted corpus with the newest document as
// the seed and no topical filtering.
inline Planted planted(std::uint64_t seed, double background = 0.0) {
  storyline::SyntheticSpec spec;
  spec.rng_seed = seed;
  spec.background_probability = background;
  Planted p{storyline::generate_synthetic_corpus(spec), {}, {}};
  p.corpus = storyline::build_corpus(p.truth.documents);
  const std::vector<std::string> seeds{p.truth.seed_id};
  p.candidates = storyline::filter_candidates(p.corpus, {}, seeds, {});
  return p;
}

// Dense tf-idf vectors of a candidate set, for the oracles.
inline std::vector<oracle::Dense> dense_docs(
    const storyline::CandidateSet& c, std::size_t dim) {
  std::vector<oracle::Dense> out;
  for (const auto& d : c.documents) out.push_back(to_dense(d.weights, dim));
  return out;
}

}  // namespace fixtures
