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

#include "storyline/candidates.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "storyline/error.hpp"

namespace storyline {

void CandidateFilterConfig::validate() const {
  if (!(alpha >= 0.0)) throw ConfigError("alpha must be >= 0");
  if (!(date_max > 0.0) || !std::isfinite(date_max)) {
    throw ConfigError("date_max must be a positive finite number");
  }
}

std::vector<double> normalize_dates(std::span<const Date> dates,
                                    double date_max) {
  std::vector<double> out(dates.size(), 0.0);
  if (dates.empty()) return out;
  const auto [lo, hi] = std::minmax_element(dates.begin(), dates.end());
  const double span = double(hi->day_number() - lo->day_number());
  if (span <= 0.0) return out;
  for (std::size_t i = 0; i < dates.size(); ++i) {
    out[i] = double(dates[i].day_number() - lo->day_number()) / span * date_max;
  }
  return out;
}

CandidateSet filter_candidates(const Corpus& corpus,
                               std::span<const TopicDistribution> topics,
                               std::span<const std::string> seed_ids,
                               const CandidateFilterConfig& config) {
  config.validate();
  if (seed_ids.empty()) throw ConfigError("at least one seed id is required");
  const bool topical = std::isfinite(config.alpha);
  if (topical && topics.size() != corpus.size()) {
    throw ConfigError(
        "a finite alpha needs one topic distribution per document");
  }

  std::vector<std::size_t> seeds;
  for (const auto& id : seed_ids) {
    auto pos = corpus.find(id);
    if (!pos) throw ConfigError("unknown seed id '" + id + "'");
    if (std::find(seeds.begin(), seeds.end(), *pos) == seeds.end()) {
      seeds.push_back(*pos);
    }
  }
  Date newest_seed = corpus.documents[seeds.front()].timestamp;
  for (auto s : seeds) {
    newest_seed = std::max(newest_seed, corpus.documents[s].timestamp);
  }

  std::vector<std::size_t> keep;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const bool is_seed = std::find(seeds.begin(), seeds.end(), d) != seeds.end();
    if (is_seed) {
      keep.push_back(d);
      continue;
    }
    const Date t = corpus.documents[d].timestamp;
    if (!(t < newest_seed)) continue;
    if (config.t_min && !(*config.t_min < t)) continue;
    if (topical) {
      bool ok = true;
      for (auto s : seeds) {
        if (kl_divergence(topics[d], topics[s]) > config.alpha) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
    }
    keep.push_back(d);
  }
  // Corpus order is already (date, id).
  std::sort(keep.begin(), keep.end());

  CandidateSet set;
  set.date_max = config.date_max;
  std::vector<Date> dates;
  for (auto d : keep) {
    set.documents.push_back(corpus.weighted[d]);
    set.corpus_indices.push_back(d);
    dates.push_back(corpus.documents[d].timestamp);
    if (std::find(seeds.begin(), seeds.end(), d) != seeds.end()) {
      set.seed_indices.push_back(set.documents.size() - 1);
    }
  }
  if (set.documents.empty()) {
    throw Error("no candidates survive filtering; try a larger alpha");
  }
  set.scaled_times = normalize_dates(dates, config.date_max);
  return set;
}

CandidateSet make_candidate_set(std::vector<WeightedDocument> documents,
                                std::vector<double> scaled_times,
                                double date_max,
                                std::vector<std::size_t> seed_indices) {
  if (documents.size() != scaled_times.size()) {
    throw Error("documents and scaled times differ in length");
  }
  CandidateSet set;
  set.documents = std::move(documents);
  set.scaled_times = std::move(scaled_times);
  set.date_max = date_max;
  set.seed_indices = std::move(seed_indices);
  set.corpus_indices.resize(set.documents.size());
  std::iota(set.corpus_indices.begin(), set.corpus_indices.end(), 0);
  return set;
}

}  // namespace storyline
