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
#include <cstdio>
#include <limits>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "storyline/corpus.hpp"
#include "storyline/error.hpp"

using namespace storyline;

namespace {

std::string record(const std::string& id, const std::string& date,
                   const std::string& entities) {
  return R"({"id":")" + id + R"(","date":")" + date +
         R"(","title":"t","entities":[)" + entities + "]}\n";
}

std::string ent(const std::string& name, int count) {
  return R"({"name":")" + name + R"(","type":"person","count":)" +
         std::to_string(count) + "}";
}

}  // namespace

TEST_CASE("date parsing is strict") {
  CHECK(Date::parse("2016-02-29").to_string() == "2016-02-29");
  CHECK(Date::parse("1970-01-02").day_number() == 1);
  CHECK_THROWS_AS(Date::parse("2015-02-29"), ParseError);
  CHECK_THROWS_AS(Date::parse("2015-1-01"), ParseError);
  CHECK_THROWS_AS(Date::parse("2015-01-01T00:00"), ParseError);
  CHECK(Date::parse("2015-01-01").plus_days(31).to_string() == "2015-02-01");
}

TEST_CASE("sparse vector merges and sorts") {
  SparseVector v({{3, 0.5}, {1, 0.25}, {3, 0.25}});
  REQUIRE(v.size() == 2);
  CHECK(v.entries()[0].first == 1);
  CHECK(v.at(3) == doctest::Approx(0.75));
  CHECK(v.at(2) == 0.0);
  CHECK_FALSE(v.contains(0));
  CHECK(v.sum() == doctest::Approx(1.0));
}

TEST_CASE("parse_corpus sorts three valid lines by date") {
  const std::string text = record("b", "2015-03-02", ent("X", 1)) +
                           record("a", "2015-03-01", ent("Y", 2)) +
                           record("c", "2015-03-03", ent("X", 1) + "," + ent("Z", 1));
  Corpus c = parse_corpus_jsonl(text);
  REQUIRE(c.size() == 3);
  CHECK(c.documents[0].id == "a");
  CHECK(c.documents[1].id == "b");
  CHECK(c.documents[2].id == "c");
  CHECK(c.find("c") == std::optional<std::size_t>(2));
}

TEST_CASE("missing date is reported at its line") {
  const std::string text = record("a", "2015-03-01", ent("X", 1)) +
                           R"({"id":"b","title":"t","entities":[]})" "\n";
  try {
    parse_corpus_jsonl(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("date") != std::string::npos);
  }
}

TEST_CASE("duplicate id error names the id") {
  const std::string text = record("a1", "2015-03-01", ent("X", 1)) +
                           record("a1", "2015-03-02", ent("Y", 1));
  try {
    parse_corpus_jsonl(text);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("a1") != std::string::npos);
  }
}

TEST_CASE("malformed input") {
  CHECK_THROWS_AS(parse_corpus_jsonl(""), Error);
  CHECK_THROWS_AS(parse_corpus_jsonl("\n\n"), Error);
  try {
    parse_corpus_jsonl(record("a", "2015-03-01", ent("X", 1)) + "{not json\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_corpus_jsonl(record("a", "2015-03-01", ent("X", 0))),
                  ParseError);
  CHECK_THROWS_AS(parse_corpus_jsonl(R"({"id":"a","date":"2015-03-01","entities":[{"name":"X","type":"alien","count":1}]})"),
                  ParseError);
  CHECK_THROWS_AS(parse_corpus(std::filesystem::path("/nonexistent/x.jsonl")),
                  Error);
}

TEST_CASE("tf-idf: entity in every document is dropped") {
  std::vector<Document> docs{fixtures::doc("a", "2015-01-01", {{"X", 1}}),
                             fixtures::doc("b", "2015-01-02", {{"X", 1}})};
  Corpus c = build_corpus(docs);
  CHECK(c.weighted[0].weights.empty());
  CHECK(c.weighted[1].weights.empty());
}

TEST_CASE("tf-idf: counts {a:2, b:1} normalize to (2,1)/sqrt(5)") {
  std::vector<Document> docs{
      fixtures::doc("d1", "2015-01-01", {{"a", 2}, {"b", 1}}),
      fixtures::doc("d2", "2015-01-02", {{"c", 1}})};
  Corpus c = build_corpus(docs);
  const auto ia = c.vocabulary.find("a")->index;
  const auto ib = c.vocabulary.find("b")->index;
  CHECK(c.weighted[0].weights.at(ia) == doctest::Approx(2.0 / std::sqrt(5.0)));
  CHECK(c.weighted[0].weights.at(ib) == doctest::Approx(1.0 / std::sqrt(5.0)));
}

TEST_CASE("tf-idf matches the dense oracle and has unit norm") {
  oracle::Lcg rng(7);
  const std::size_t n_docs = 25, dim = 15;
  std::vector<std::vector<int>> counts(n_docs, std::vector<int>(dim, 0));
  std::vector<Document> docs;
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::vector<std::pair<std::string, int>> ents;
    for (std::size_t e = 0; e < dim; ++e) {
      if (rng.uniform() < 0.3) {
        counts[d][e] = 1 + int(rng.below(4));
        char name[8];
        std::snprintf(name, sizeof name, "e%02zu", e);
        ents.push_back({name, counts[d][e]});
      }
    }
    char id[8];
    std::snprintf(id, sizeof id, "d%02zu", d);
    docs.push_back(fixtures::doc(id, "2015-01-01", ents));
  }
  const auto expected = oracle::tf_idf(counts);
  Corpus c = build_corpus(docs);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const auto pos = *c.find(docs[d].id);
    const auto& w = c.weighted[pos].weights;
    double norm = w.l2_norm();
    if (!w.empty()) CHECK(norm == doctest::Approx(1.0).epsilon(1e-9));
    for (const auto& [idx, weight] : w.entries()) CHECK(weight > 0.0);
    for (std::size_t e = 0; e < dim; ++e) {
      char name[8];
      std::snprintf(name, sizeof name, "e%02zu", e);
      auto entry = c.vocabulary.find(name);
      const double got = entry ? w.at(entry->index) : 0.0;
      CHECK(got == doctest::Approx(expected[d][e]).epsilon(1e-12));
    }
  }
}

TEST_CASE("idf does not increase with document frequency") {
  // Entity "k" appears in the first k+1 of 6 documents.
  std::vector<Document> docs;
  for (int d = 0; d < 6; ++d) {
    std::vector<std::pair<std::string, int>> ents;
    for (int k = d; k < 6; ++k) ents.push_back({"f" + std::to_string(k), 1});
    docs.push_back(fixtures::doc("d" + std::to_string(d), "2015-01-01", ents));
  }
  auto vocab = EntityVocabulary::build(docs);
  // A one-document probe with every entity once exposes idf directly.
  std::vector<EntityMention> all;
  for (int k = 0; k < 6; ++k) all.push_back({"f" + std::to_string(k), EntityType::kOther, 1});
  auto res = compute_tf_idf(RawCounts{all}, vocab);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 6; ++k) {
    const auto idx = vocab.find("f" + std::to_string(k))->index;
    CHECK(vocab.find("f" + std::to_string(k))->document_frequency == std::size_t(k + 1));
    const double w = res.vectors[0].at(idx);
    CHECK(w <= prev);
    prev = w;
  }
}

TEST_CASE("tf-idf rejects entities outside the vocabulary") {
  std::vector<Document> docs{fixtures::doc("a", "2015-01-01", {{"X", 1}})};
  auto vocab = EntityVocabulary::build(docs);
  RawCounts raw{{{"Y", EntityType::kOther, 1}}};
  CHECK_THROWS_AS(compute_tf_idf(raw, vocab), Error);
}

TEST_CASE("document without entities gets an empty vector and a warning") {
  std::vector<Document> docs{fixtures::doc("a", "2015-01-01", {{"X", 1}}),
                             fixtures::doc("b", "2015-01-02", {})};
  Corpus c = build_corpus(docs);
  CHECK(c.weighted[1].weights.empty());
  CHECK_FALSE(c.warnings.empty());
}

TEST_CASE("vocabulary indices are dense and df bounded") {
  std::vector<Document> docs{
      fixtures::doc("a", "2015-01-01", {{"b", 1}, {"a", 3}}),
      fixtures::doc("b", "2015-01-02", {{"c", 1}, {"a", 1}})};
  auto vocab = EntityVocabulary::build(docs);
  REQUIRE(vocab.size() == 3);
  CHECK(vocab.name(0) == "a");
  CHECK(vocab.name(2) == "c");
  for (const auto& [name, entry] : vocab.entries()) {
    CHECK(entry.index < vocab.size());
    CHECK(entry.document_frequency >= 1);
    CHECK(entry.document_frequency <= vocab.corpus_size());
  }
  CHECK(vocab.find("a")->document_frequency == 2);
}

TEST_CASE("fallback entity extractor") {
  using V = std::vector<EntityMention>;
  CHECK(fallback_extract_entities("Angela Merkel met Angela Merkel") ==
        V{{"Angela Merkel", EntityType::kOther, 2}});
  CHECK(fallback_extract_entities("the cat sat").empty());
  CHECK(fallback_extract_entities("").empty());
  CHECK(fallback_extract_entities("Talks in Berlin with NATO") ==
        V{{"Berlin", EntityType::kOther, 1}, {"NATO", EntityType::kOther, 1}});
}

TEST_CASE("records with text only go through the extractor") {
  Corpus c = parse_corpus_jsonl(
      R"({"id":"a","date":"2015-01-01","title":"t","text":"Talks in Berlin with NATO"})"
      "\n"
      R"({"id":"b","date":"2015-01-02","title":"t","text":"Paris hosted it"})"
      "\n");
  REQUIRE(c.documents[0].entities.size() == 2);
  CHECK(c.documents[0].entities[0].name == "Berlin");
  CHECK(c.documents[1].entities.empty());  // sentence-initial only
}

TEST_CASE("parse, serialize, parse is the identity") {
  auto syn = generate_synthetic_corpus({});
  Corpus first = build_corpus(syn.documents);
  first.documents[3].raw_text = "Some text with \"quotes\"";
  first.documents[4].topics = {0.25, 0.75};
  Corpus second = parse_corpus_jsonl(serialize_corpus_jsonl(first));
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i)
    CHECK(second.documents[i] == first.documents[i]);
}
