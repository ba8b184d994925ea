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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "storyline/corpus.hpp"

namespace storyline {

// Ordered document ids, oldest first.
struct Chain {
  std::vector<std::string> doc_ids;
  // Set when a baseline could not reach the requested length.
  bool truncated = false;

  std::size_t size() const noexcept { return doc_ids.size(); }
};

// psi = 1 - 1/(n-2) * sum_{i=0}^{n-3} sum_{j=i+2}^{n-1} disp(d_i, d_j), with
// disp = 1/(n+i-j) when soergel(d_i, d_j) < theta and 0 otherwise.
// Throws Error for chains shorter than 3.
double dispersion_coefficient(std::span<const SparseVector> chain,
                              double theta);
double dispersion_coefficient(const Chain& chain, const Corpus& corpus,
                              double theta);

// Starting from the seed, repeatedly steps to the Soergel-nearest unused
// document strictly older than the current oldest one (ties by id). The
// chain is returned oldest first.
Chain similarity_chain_baseline(const Corpus& corpus, std::string_view seed_id,
                                std::size_t length);

struct KMeansResult {
  std::vector<std::size_t> assignment;       // cluster per input document
  std::vector<std::size_t> representatives;  // input index closest to each centroid
  int iterations = 0;
};

// k-means++ seeded Lloyd iterations (at most 100) on entity weights joined
// with the standardized time coordinate.
KMeansResult kmeans_time_entity(std::span<const WeightedDocument> docs,
                                std::span<const double> times, std::size_t k,
                                std::uint64_t rng_seed);

// Clusters the documents no newer than the seed and returns one
// representative per cluster, ordered by date.
Chain kmeans_chain_baseline(const Corpus& corpus, std::string_view seed_id,
                            std::size_t k, std::uint64_t rng_seed);

struct SignificanceConfig {
  std::size_t num_samples = 100000;  // m
  double tolerance = 1.0;            // beta
};

// m sorted vectors of k uniform draws on [0, date_max). Draws are made on
// [0, 1) and scaled, so the same seed gives coupled samples across
// date_max values.
std::vector<std::vector<double>> draw_turning_point_samples(
    std::size_t k, double date_max, std::size_t m, std::uint64_t rng_seed);

// Fraction of samples whose every coordinate is within `tolerance` of the
// sorted turning points.
double significance_p_value(std::span<const double> turning_points,
                            std::span<const std::vector<double>> samples,
                            double tolerance);
double significance_p_value(std::span<const double> turning_points,
                            double date_max, const SignificanceConfig& config,
                            std::uint64_t rng_seed);

struct RepeatabilityConfig {
  double distance_threshold = 1.0;  // zeta
  int min_matches = 1;
};

// Two vectors are similar when at least min_matches positions differ by
// less than zeta. Returns the number of connected components of that
// relation. Throws Error on length mismatch.
std::size_t repeatability_buckets(
    std::span<const std::vector<double>> vectors,
    const RepeatabilityConfig& config);

}  // namespace storyline
