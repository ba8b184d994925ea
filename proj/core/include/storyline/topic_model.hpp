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

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "storyline/corpus.hpp"

namespace storyline {

// Dense distribution over K topics; sums to 1 within 1e-6.
using TopicDistribution = std::vector<double>;

struct LdaOptions {
  int num_topics = 10;
  int iterations = 200;
  std::uint64_t rng_seed = 0;
};

struct LdaResult {
  // Aligned with corpus.documents.
  std::vector<TopicDistribution> distributions;
  double alpha_prior = 0.0;
  double beta_prior = 0.0;
  std::vector<std::string> warnings;
};

// Collapsed Gibbs sampler over entity occurrences (each mention counted
// `count` times). Symmetric priors alpha = 50/K, beta = 0.01. Document
// distributions come from the final sample's counts plus alpha.
LdaResult fit_reference_lda(const Corpus& corpus, const LdaOptions& options);

// KL(p || q) in nats. Components are floored at 1e-10 and both arguments
// renormalized first. Throws Error on dimension mismatch.
double kl_divergence(const TopicDistribution& p, const TopicDistribution& q);

// Throws Error unless non-negative and summing to 1 within 1e-6.
void validate_topic_distribution(const TopicDistribution& p);

// Sidecar JSONL: {"id": str, "topics": [float]} per line.
std::unordered_map<std::string, TopicDistribution> read_topics_sidecar(
    const std::filesystem::path& path);
void write_topics_sidecar(const std::filesystem::path& path,
                          const std::vector<std::string>& ids,
                          const std::vector<TopicDistribution>& topics);

// Topics embedded in the corpus records, if every document carries them;
// otherwise an empty vector.
std::vector<TopicDistribution> embedded_topics(const Corpus& corpus);

}  // namespace storyline
