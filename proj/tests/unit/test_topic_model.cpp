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

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "storyline/error.hpp"
#include "storyline/synthetic.hpp"
#include "storyline/topic_model.hpp"

using namespace storyline;

namespace {

Corpus two_clusters(std::uint64_t seed) {
  SyntheticSpec spec;
  spec.clusters = 2;
  spec.docs_per_cluster = 25;
  spec.background_probability = 0.0;
  spec.rng_seed = seed;
  auto syn = generate_synthetic_corpus(spec);
  // Longer documents give the sampler enough tokens to overcome the
  // strong symmetric document prior.
  for (auto& d : syn.documents)
    for (auto& e : d.entities) e.count *= 8;
  return build_corpus(syn.documents);
}

std::size_t argmax(const TopicDistribution& p) {
  return std::size_t(std::max_element(p.begin(), p.end()) - p.begin());
}

}  // namespace

TEST_CASE("kl divergence examples") {
  CHECK(kl_divergence({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.0));
  CHECK(kl_divergence({1.0, 0.0}, {0.5, 0.5}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-8));
  CHECK_THROWS_AS(kl_divergence({1.0}, {0.5, 0.5}), Error);
}

TEST_CASE("kl is non-negative and zero on the diagonal") {
  oracle::Lcg rng(3);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + rng.below(8);
    TopicDistribution p(k), q(k);
    for (auto& x : p) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    for (auto& x : q) x = rng.uniform() < 0.2 ? 0.0 : rng.uniform();
    p[0] += 1e-3;
    q[0] += 1e-3;
    const double sp = std::accumulate(p.begin(), p.end(), 0.0);
    const double sq = std::accumulate(q.begin(), q.end(), 0.0);
    for (auto& x : p) x /= sp;
    for (auto& x : q) x /= sq;
    CHECK(kl_divergence(p, q) >= 0.0);
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("validate_topic_distribution") {
  CHECK_NOTHROW(validate_topic_distribution({0.2, 0.8}));
  CHECK_THROWS_AS(validate_topic_distribution({0.2, 0.7}), Error);
  CHECK_THROWS_AS(validate_topic_distribution({-0.2, 1.2}), Error);
}

TEST_CASE("lda distributions are normalized and reproducible") {
  Corpus corpus = build_corpus(generate_synthetic_corpus({}).documents);
  LdaOptions opt;
  opt.num_topics = 4;
  opt.iterations = 50;
  opt.rng_seed = 11;
  auto a = fit_reference_lda(corpus, opt);
  auto b = fit_reference_lda(corpus, opt);
  REQUIRE(a.distributions.size() == corpus.size());
  CHECK(a.alpha_prior == doctest::Approx(50.0 / 4));
  CHECK(a.beta_prior == doctest::Approx(0.01));
  for (const auto& p : a.distributions) {
    CHECK(p.size() == 4);
    CHECK(std::accumulate(p.begin(), p.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-6));
  }
  CHECK(a.distributions == b.distributions);
}

TEST_CASE("lda recovers a planted two-cluster partition") {
  Corpus corpus = two_clusters(5);
  LdaOptions opt;
  opt.num_topics = 2;
  opt.iterations = 200;
  opt.rng_seed = 1;
  auto fit = fit_reference_lda(corpus, opt);
  // Cluster from the id prefix "c0-" / "c1-"; topics are unlabeled, so
  // score the better of the two label assignments.
  std::size_t same = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::size_t planted = corpus.documents[i].id[1] == '0' ? 0 : 1;
    if (argmax(fit.distributions[i]) == planted) ++same;
  }
  const std::size_t agree = std::max(same, corpus.size() - same);
  CHECK(double(agree) >= 0.9 * double(corpus.size()));
}

TEST_CASE("lda configuration errors") {
  std::vector<Document> docs{fixtures::doc("a", "2015-01-01", {{"X", 1}, {"Y", 1}}),
                             fixtures::doc("b", "2015-01-02", {{"Z", 2}})};
  Corpus corpus = build_corpus(docs);
  LdaOptions opt;
  opt.num_topics = 4;  // vocabulary has 3 entities
  CHECK_THROWS_AS(fit_reference_lda(corpus, opt), ConfigError);
  opt.num_topics = 1;
  CHECK_THROWS_AS(fit_reference_lda(corpus, opt), ConfigError);
}

TEST_CASE("document without entities gets a uniform distribution") {
  std::vector<Document> docs{fixtures::doc("a", "2015-01-01", {{"X", 2}, {"Y", 1}}),
                             fixtures::doc("b", "2015-01-02", {}),
                             fixtures::doc("c", "2015-01-03", {{"Z", 1}})};
  Corpus corpus = build_corpus(docs);
  LdaOptions opt;
  opt.num_topics = 2;
  opt.iterations = 10;
  auto fit = fit_reference_lda(corpus, opt);
  CHECK(fit.distributions[1] == TopicDistribution{0.5, 0.5});
  CHECK_FALSE(fit.warnings.empty());
}

TEST_CASE("topics sidecar round trip") {
  const auto path =
      std::filesystem::temp_directory_path() / "storyline_topics_test.jsonl";
  std::vector<std::string> ids{"a", "b"};
  std::vector<TopicDistribution> topics{{0.25, 0.75}, {1.0, 0.0}};
  write_topics_sidecar(path, ids, topics);
  auto back = read_topics_sidecar(path);
  CHECK(back.at("a") == topics[0]);
  CHECK(back.at("b") == topics[1]);
  std::filesystem::remove(path);
}

TEST_CASE("embedded topics are used only when every record has them") {
  auto syn = generate_synthetic_corpus({});
  Corpus none = build_corpus(syn.documents);
  CHECK(embedded_topics(none).empty());
  for (auto& d : syn.documents) d.topics = {0.5, 0.5};
  Corpus all = build_corpus(syn.documents);
  CHECK(embedded_topics(all).size() == all.size());
}
