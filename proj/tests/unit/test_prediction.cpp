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

#include "fixtures.hpp"
#include "oracles.hpp"
#include "storyline/error.hpp"
#include "storyline/prediction.hpp"

using namespace storyline;

namespace {

WeightedDocument wdoc(long day, std::vector<SparseVector::Entry> entries) {
  WeightedDocument d;
  d.doc_id = "w" + std::to_string(day);
  d.timestamp = Date::from_day_number(day);
  d.weights = SparseVector(std::move(entries));
  return d;
}

PairRow row(EntityIndex future, double x1, double x2, double y) {
  return {0, future, x1, y, x2};
}

}  // namespace

TEST_CASE("pair table rows") {
  // Two entities in each of two documents: 2 x 2 rows.
  std::vector<WeightedDocument> two{wdoc(10, {{0, 0.6}, {1, 0.8}}),
                                    wdoc(13, {{2, 0.6}, {3, 0.8}})};
  auto t = build_pair_table(two);
  REQUIRE(t.size() == 4);
  for (const auto& r : t) {
    CHECK(r.date_gap == 3.0);
    CHECK(r.past_entity < 2);
    CHECK(r.future_entity >= 2);
  }

  // One past entity against three future ones; input order does not matter.
  std::vector<WeightedDocument> three{wdoc(20, {{5, 0.2}, {6, 0.3}, {7, 0.9}}),
                                      wdoc(1, {{4, 1.0}})};
  auto u = build_pair_table(three);
  REQUIRE(u.size() == 3);
  for (const auto& r : u) {
    CHECK(r.past_entity == 4);
    CHECK(r.past_weight == 1.0);
    CHECK(r.date_gap == 19.0);
  }

  std::vector<WeightedDocument> same_day{wdoc(5, {{0, 1.0}}), wdoc(5, {{1, 1.0}})};
  CHECK(build_pair_table(same_day).empty());
  CHECK_THROWS_AS(fit_term_models(build_pair_table(same_day)), Error);
}

TEST_CASE("exact plane is recovered") {
  // y = 0.1 + 0.5 x1 - 0.01 x2.
  std::vector<PairRow> t;
  oracle::Lcg rng(2);
  for (int i = 0; i < 12; ++i) {
    const double x1 = rng.uniform(), x2 = 1.0 + double(rng.below(30));
    t.push_back(row(9, x1, x2, 0.1 + 0.5 * x1 - 0.01 * x2));
  }
  auto m = fit_term_models(t);
  REQUIRE(m.models.count(9) == 1);
  const auto& model = m.models.at(9);
  CHECK(model.intercept == doctest::Approx(0.1).epsilon(1e-8));
  CHECK(model.weight_coefficient == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(model.gap_coefficient == doctest::Approx(-0.01).epsilon(1e-8));
  CHECK(model.training_rows == 12);
}

TEST_CASE("constant future weight gives a flat model") {
  std::vector<PairRow> t;
  oracle::Lcg rng(5);
  for (int i = 0; i < 20; ++i) t.push_back(row(1, rng.uniform(), 1.0 + rng.below(10), 0.4));
  const auto& model = fit_term_models(t).models.at(1);
  CHECK(model.intercept == doctest::Approx(0.4));
  CHECK(std::fabs(model.weight_coefficient) < 1e-10);
  CHECK(std::fabs(model.gap_coefficient) < 1e-10);
}

TEST_CASE("noisy rows match the ordinary least squares oracle") {
  std::vector<PairRow> t;
  std::vector<double> x1, x2, y;
  oracle::Lcg rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(), b = 1.0 + double(rng.below(60));
    const double noise = rng.uniform(-0.05, 0.05);
    const double target = 0.2 + 0.3 * a + 0.002 * b + noise;
    t.push_back(row(3, a, b, target));
    x1.push_back(a);
    x2.push_back(b);
    y.push_back(target);
  }
  const auto& model = fit_term_models(t).models.at(3);
  const auto plane = oracle::ols_plane(x1, x2, y);
  CHECK(model.intercept == doctest::Approx(plane.intercept).epsilon(1e-8));
  CHECK(model.weight_coefficient == doctest::Approx(plane.b1).epsilon(1e-8));
  CHECK(model.gap_coefficient == doctest::Approx(plane.b2).epsilon(1e-8));
  CHECK(std::fabs(model.intercept - 0.2) < 0.01);
  CHECK(std::fabs(model.weight_coefficient - 0.3) < 0.01);
  CHECK(std::fabs(model.gap_coefficient - 0.002) < 0.01);
}

TEST_CASE("single-row entities are skipped") {
  std::vector<PairRow> t{row(1, 0.5, 2, 0.3), row(2, 0.5, 2, 0.3), row(2, 0.7, 4, 0.4)};
  auto m = fit_term_models(t);
  CHECK(m.skipped == std::vector<EntityIndex>{1});
  CHECK(m.models.count(2) == 1);
}

TEST_CASE("prediction averages over shared seed entities and clamps") {
  TermModels models;
  TermModel a;
  a.future_entity = 10;
  a.intercept = 0.1;
  a.weight_coefficient = 1.0;
  a.gap_coefficient = 0.0;
  a.past_entities = {1, 2};
  models.models[10] = a;
  TermModel b = a;
  b.future_entity = 11;
  b.intercept = 2.0;
  b.past_entities = {2};
  models.models[11] = b;
  TermModel c = a;
  c.future_entity = 12;
  c.past_entities = {7};
  models.models[12] = c;

  auto seed = wdoc(50, {{1, 0.2}, {2, 0.4}, {3, 0.9}});
  auto p = predict_future_weights(seed, 7.0, models);
  CHECK_FALSE(p.no_shared_entities);
  CHECK(p.weights.at(10) == doctest::Approx((0.3 + 0.5) / 2));
  CHECK(p.weights.at(11) == 1.0);  // clamped
  CHECK(p.weights.count(12) == 0);

  auto stranger = wdoc(50, {{30, 1.0}});
  auto none = predict_future_weights(stranger, 7.0, models);
  CHECK(none.no_shared_entities);
  CHECK(none.weights.empty());

  CHECK_THROWS_AS(predict_future_weights(seed, 0.0, models), ConfigError);
  CHECK_THROWS_AS(predict_future_weights(seed, -3.0, models), ConfigError);
}

TEST_CASE("top predictions and story split") {
  std::vector<Document> docs{fixtures::doc("a", "2015-01-01", {{"X", 1}, {"Y", 1}}),
                             fixtures::doc("b", "2015-01-05", {{"Y", 1}, {"Z", 2}}),
                             fixtures::doc("c", "2015-01-09", {{"Z", 1}, {"W", 1}})};
  Corpus corpus = build_corpus(docs);
  Prediction p;
  p.weights[corpus.vocabulary.find("Z")->index] = 0.5;
  p.weights[corpus.vocabulary.find("X")->index] = 0.5;
  p.weights[corpus.vocabulary.find("W")->index] = 0.9;
  auto top = top_predictions(p, corpus.vocabulary, 2);
  REQUIRE(top.size() == 2);
  CHECK(top[0].first == "W");
  CHECK(top[1].first == "X");  // tie broken by name

  Story story;
  story.turning_points = {50.0};
  story.segments.resize(2);
  story.segments[0].docs = {{"a", 0, 1.0, 1.0}, {"b", 1, 1.0, 1.0}};
  story.segments[1].docs = {{"c", 2, 1.0, 1.0}};
  auto split = split_story(story, corpus);
  REQUIRE(split.training.size() == 2);
  REQUIRE(split.testing.size() == 1);
  CHECK(split.testing[0].doc_id == "c");
  story.segments[1].docs[0].doc_id = "missing";
  CHECK_THROWS_AS(split_story(story, corpus), Error);
}
