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

#include "storyline/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "storyline/candidates.hpp"
#include "storyline/error.hpp"
#include "storyline/objective.hpp"
#include "storyline/random.hpp"

namespace storyline {

double dispersion_coefficient(std::span<const SparseVector> chain,
                              double theta) {
  const std::size_t n = chain.size();
  if (n < 3) {
    throw Error("dispersion needs a chain of at least 3 documents, got " +
                std::to_string(n));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i + 2 < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (soergel(chain[i], chain[j]) < theta) {
        sum += 1.0 / double(n + i - j);
      }
    }
  }
  return 1.0 - sum / double(n - 2);
}

double dispersion_coefficient(const Chain& chain, const Corpus& corpus,
                              double theta) {
  std::vector<SparseVector> vectors;
  for (const auto& id : chain.doc_ids) {
    auto pos = corpus.find(id);
    if (!pos) throw Error("chain references unknown document '" + id + "'");
    vectors.push_back(corpus.weighted[*pos].weights);
  }
  return dispersion_coefficient(vectors, theta);
}

Chain similarity_chain_baseline(const Corpus& corpus, std::string_view seed_id,
                                std::size_t length) {
  auto seed = corpus.find(seed_id);
  if (!seed) throw ConfigError("unknown seed id '" + std::string(seed_id) + "'");
  std::vector<std::size_t> picked{*seed};
  std::vector<bool> used(corpus.size(), false);
  used[*seed] = true;
  Chain chain;
  while (picked.size() < length) {
    const std::size_t head = picked.back();
    const auto& head_doc = corpus.weighted[head];
    std::size_t best = corpus.size();
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      if (used[i] || !(corpus.weighted[i].timestamp < head_doc.timestamp)) {
        continue;
      }
      const double d = soergel(head_doc.weights, corpus.weighted[i].weights);
      if (d < best_d ||
          (d == best_d && corpus.documents[i].id < corpus.documents[best].id)) {
        best_d = d;
        best = i;
      }
    }
    if (best == corpus.size()) {
      chain.truncated = true;
      break;
    }
    used[best] = true;
    picked.push_back(best);
  }
  for (auto it = picked.rbegin(); it != picked.rend(); ++it) {
    chain.doc_ids.push_back(corpus.documents[*it].id);
  }
  return chain;
}

namespace {

using Dense = std::vector<std::vector<double>>;

double squared_distance(const std::vector<double>& a,
                        const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

Dense time_entity_features(std::span<const WeightedDocument> docs,
                           std::span<const double> times) {
  std::unordered_map<EntityIndex, std::size_t> column;
  for (const auto& d : docs) {
    for (const auto& [idx, _] : d.weights.entries()) {
      column.emplace(idx, column.size());
    }
  }
  const std::size_t dims = column.size() + 1;
  double mean = 0.0;
  for (double t : times) mean += t;
  mean /= double(times.size());
  double var = 0.0;
  for (double t : times) var += (t - mean) * (t - mean);
  const double sd = std::sqrt(var / double(times.size()));

  Dense out(docs.size(), std::vector<double>(dims, 0.0));
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const auto& [idx, w] : docs[i].weights.entries()) {
      out[i][column.at(idx)] = w;
    }
    out[i][dims - 1] = sd > 0.0 ? (times[i] - mean) / sd : 0.0;
  }
  return out;
}

}  // namespace

KMeansResult kmeans_time_entity(std::span<const WeightedDocument> docs,
                                std::span<const double> times, std::size_t k,
                                std::uint64_t rng_seed) {
  if (k < 2) throw ConfigError("k-means needs k >= 2");
  if (docs.size() < k) {
    throw ConfigError("k-means needs at least k documents");
  }
  if (times.size() != docs.size()) throw Error("times/docs length mismatch");
  const Dense x = time_entity_features(docs, times);
  const std::size_t n = x.size();
  Rng rng(rng_seed);

  // k-means++ seeding.
  Dense centroids;
  centroids.push_back(x[rng.below(n)]);
  std::vector<double> d2(n);
  while (centroids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& c : centroids) best = std::min(best, squared_distance(x[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (u < acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    centroids.push_back(x[pick]);
  }

  KMeansResult result;
  result.assignment.assign(n, 0);
  bool reseeded = false;
  for (int it = 0; it < 100; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = squared_distance(x[i], centroids[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = squared_distance(x[i], centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (result.assignment[i] != best) {
        changed = true;
        result.assignment[i] = best;
      }
    }
    Dense sums(k, std::vector<double>(x[0].size(), 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto& s = sums[result.assignment[i]];
      for (std::size_t j = 0; j < s.size(); ++j) s[j] += x[i][j];
      ++counts[result.assignment[i]];
    }
    bool empty = false;
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        empty = true;
        if (reseeded) throw Error("k-means produced an empty cluster twice");
        // Re-seed on the point farthest from its current centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = squared_distance(x[i], centroids[result.assignment[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids[c] = x[far];
        reseeded = true;
      } else {
        for (auto& v : sums[c]) v /= double(counts[c]);
        centroids[c] = std::move(sums[c]);
      }
    }
    result.iterations = it + 1;
    if (!changed && !empty && it > 0) break;
  }

  result.representatives.assign(k, 0);
  for (std::size_t c = 0; c < k; ++c) {
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (result.assignment[i] != c) continue;
      const double d = squared_distance(x[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        result.representatives[c] = i;
      }
    }
    if (!std::isfinite(best_d)) throw Error("k-means left a cluster empty");
  }
  return result;
}

Chain kmeans_chain_baseline(const Corpus& corpus, std::string_view seed_id,
                            std::size_t k, std::uint64_t rng_seed) {
  auto seed = corpus.find(seed_id);
  if (!seed) throw ConfigError("unknown seed id '" + std::string(seed_id) + "'");
  const Date seed_date = corpus.documents[*seed].timestamp;
  std::vector<WeightedDocument> docs;
  std::vector<Date> dates;
  std::vector<std::size_t> index;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus.documents[i].timestamp <= seed_date) {
      docs.push_back(corpus.weighted[i]);
      dates.push_back(corpus.documents[i].timestamp);
      index.push_back(i);
    }
  }
  const auto times = normalize_dates(dates, 1.0);
  const auto km = kmeans_time_entity(docs, times, k, rng_seed);
  std::vector<std::size_t> reps;
  for (auto r : km.representatives) reps.push_back(index[r]);
  // Corpus order is (date, id).
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  Chain chain;
  for (auto r : reps) chain.doc_ids.push_back(corpus.documents[r].id);
  return chain;
}

std::vector<std::vector<double>> draw_turning_point_samples(
    std::size_t k, double date_max, std::size_t m, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  std::vector<std::vector<double>> out(m, std::vector<double>(k));
  for (auto& sample : out) {
    for (double& v : sample) v = rng.uniform() * date_max;
    std::sort(sample.begin(), sample.end());
  }
  return out;
}

double significance_p_value(std::span<const double> turning_points,
                            std::span<const std::vector<double>> samples,
                            double tolerance) {
  if (samples.empty()) throw ConfigError("significance needs m >= 1 samples");
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  std::vector<double> t(turning_points.begin(), turning_points.end());
  std::sort(t.begin(), t.end());
  std::size_t hits = 0;
  for (const auto& s : samples) {
    if (s.size() != t.size()) throw Error("sample length mismatch");
    bool all = true;
    for (std::size_t i = 0; i < t.size() && all; ++i) {
      all = std::abs(s[i] - t[i]) <= tolerance;
    }
    if (all) ++hits;
  }
  return double(hits) / double(samples.size());
}

double significance_p_value(std::span<const double> turning_points,
                            double date_max, const SignificanceConfig& config,
                            std::uint64_t rng_seed) {
  if (config.num_samples < 1) {
    throw ConfigError("significance needs m >= 1 samples");
  }
  const auto samples = draw_turning_point_samples(
      turning_points.size(), date_max, config.num_samples, rng_seed);
  return significance_p_value(turning_points, samples, config.tolerance);
}

std::size_t repeatability_buckets(
    std::span<const std::vector<double>> vectors,
    const RepeatabilityConfig& config) {
  if (vectors.empty()) throw ConfigError("repeatability needs >= 1 vector");
  if (!(config.distance_threshold >= 0.0)) {
    throw ConfigError("zeta must be >= 0");
  }
  if (config.min_matches < 1) throw ConfigError("min_matches must be >= 1");
  const std::size_t len = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != len) throw Error("turning-point vectors differ in length");
  }
  const std::size_t n = vectors.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  std::size_t components = n;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      int matches = 0;
      for (std::size_t i = 0; i < len; ++i) {
        if (std::abs(vectors[a][i] - vectors[b][i]) < config.distance_threshold) {
          ++matches;
        }
      }
      if (matches < config.min_matches) continue;
      const auto ra = root(a), rb = root(b);
      if (ra != rb) {
        parent[std::max(ra, rb)] = std::min(ra, rb);
        --components;
      }
    }
  }
  return components;
}

}  // namespace storyline
