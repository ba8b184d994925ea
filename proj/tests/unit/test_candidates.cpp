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

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "storyline/candidates.hpp"
#include "storyline/error.hpp"
#include "storyline/topic_model.hpp"

using namespace storyline;

namespace {

// Ten documents on consecutive days; the seed "s" is on day 9.
struct TenDocs {
  Corpus corpus;
  std::vector<TopicDistribution> topics;
};

TenDocs ten_docs() {
  std::vector<Document> docs;
  for (int i = 0; i < 9; ++i)
    docs.push_back(fixtures::doc("d" + std::to_string(i),
                                 Date::parse("2015-01-01").plus_days(i).to_string(),
                                 {{"e" + std::to_string(i % 3), 1}, {"z", 1}}));
  docs.push_back(fixtures::doc("s", "2015-01-10", {{"e0", 1}}));
  TenDocs t{build_corpus(docs), {}};
  // d0..d3 close to the seed topics, d4..d8 far away.
  for (const auto& d : t.corpus.documents) {
    const int i = d.id == "s" ? -1 : d.id[1] - '0';
    if (i < 0)
      t.topics.push_back({0.8, 0.2});
    else if (i < 4)
      t.topics.push_back({0.75, 0.25});
    else
      t.topics.push_back({0.1, 0.9});
  }
  return t;
}

std::set<std::string> ids(const CandidateSet& c) {
  std::set<std::string> out;
  for (const auto& d : c.documents) out.insert(d.doc_id);
  return out;
}

}  // namespace

TEST_CASE("infinite alpha keeps everything older than the seed") {
  auto t = ten_docs();
  CandidateFilterConfig cfg;
  cfg.t_min = Date::from_day_number(0);
  const std::vector<std::string> seeds{"s"};
  auto c = filter_candidates(t.corpus, {}, seeds, cfg);
  CHECK(c.size() == 10);
  REQUIRE(c.seed_indices.size() == 1);
  CHECK(c.documents[c.seed_indices[0]].doc_id == "s");
}

TEST_CASE("alpha zero keeps only exact topic matches") {
  auto t = ten_docs();
  CandidateFilterConfig cfg;
  cfg.alpha = 0.0;
  const std::vector<std::string> seeds{"s"};
  auto c = filter_candidates(t.corpus, t.topics, seeds, cfg);
  CHECK(ids(c) == std::set<std::string>{"s"});
}

TEST_CASE("planted 10-doc filter matches brute force") {
  auto t = ten_docs();
  CandidateFilterConfig cfg;
  cfg.alpha = 0.05;
  cfg.t_min = Date::parse("2015-01-01");  // excludes d0 (strict bound)
  const std::vector<std::string> seeds{"s"};
  auto c = filter_candidates(t.corpus, t.topics, seeds, cfg);

  // Brute force straight from the definition.
  const auto seed = *t.corpus.find("s");
  std::set<std::string> expected{"s"};
  for (std::size_t i = 0; i < t.corpus.size(); ++i) {
    const auto& d = t.corpus.documents[i];
    if (i == seed) continue;
    const bool in_time = *cfg.t_min < d.timestamp &&
                         d.timestamp < t.corpus.documents[seed].timestamp;
    double kl = 0.0;
    for (std::size_t k = 0; k < 2; ++k)
      kl += t.topics[i][k] * std::log(t.topics[i][k] / t.topics[seed][k]);
    if (in_time && kl <= cfg.alpha) expected.insert(d.id);
  }
  CHECK(ids(c) == expected);
  CHECK(expected == std::set<std::string>{"s", "d1", "d2", "d3"});

  cfg.t_min.reset();
  auto wider = filter_candidates(t.corpus, t.topics, seeds, cfg);
  CHECK(wider.size() == 5);  // 4 + seed
}

TEST_CASE("filter is monotone in alpha") {
  auto t = ten_docs();
  oracle::Lcg rng(9);
  for (auto& p : t.topics) {
    p[0] = rng.uniform(0.05, 0.95);
    p[1] = 1.0 - p[0];
  }
  const std::vector<std::string> seeds{"s"};
  std::set<std::string> previous;
  for (double alpha : {0.0, 0.01, 0.05, 0.1, 0.3, 1.0, 5.0}) {
    CandidateFilterConfig cfg;
    cfg.alpha = alpha;
    auto now = ids(filter_candidates(t.corpus, t.topics, seeds, cfg));
    CHECK(std::includes(now.begin(), now.end(), previous.begin(), previous.end()));
    previous = now;
  }
}

TEST_CASE("candidates are sorted, scaled, and predate the newest seed") {
  auto p = fixtures::planted(4);
  const auto& c = p.candidates;
  REQUIRE(c.size() == 60);
  CHECK(c.scaled_times.front() == 0.0);
  CHECK(c.scaled_times.back() == doctest::Approx(100.0));
  CHECK(std::is_sorted(c.scaled_times.begin(), c.scaled_times.end()));
  for (std::size_t i = 0; i + 1 < c.size(); ++i)
    CHECK(c.documents[i].timestamp < c.documents.back().timestamp);
}

TEST_CASE("seeds are always kept and errors are reported") {
  auto t = ten_docs();
  const std::vector<std::string> two{"d5", "s"};
  CandidateFilterConfig cfg;
  cfg.alpha = 0.0;
  auto c = filter_candidates(t.corpus, t.topics, two, cfg);
  CHECK(ids(c) == std::set<std::string>{"d5", "s"});

  const std::vector<std::string> unknown{"nope"};
  try {
    filter_candidates(t.corpus, {}, unknown, {});
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("nope") != std::string::npos);
  }
  CHECK_THROWS_AS(filter_candidates(t.corpus, {}, {}, {}), ConfigError);
  CHECK_THROWS_AS(filter_candidates(t.corpus, {}, two, cfg), ConfigError);
  CandidateFilterConfig bad;
  bad.date_max = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.date_max = 100.0;
  bad.alpha = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("normalize_dates examples") {
  const auto d = [](const char* s) { return Date::parse(s); };
  std::vector<Date> two{d("2015-01-01"), d("2015-01-11")};
  CHECK(normalize_dates(two, 100.0) == std::vector<double>{0.0, 100.0});
  std::vector<Date> three{d("2015-01-01"), d("2015-01-06"), d("2015-01-11")};
  auto t = normalize_dates(three, 100.0);
  CHECK(t[1] == doctest::Approx(50.0));
  std::vector<Date> one{d("2015-01-01")};
  CHECK(normalize_dates(one, 100.0) == std::vector<double>{0.0});
}

TEST_CASE("normalization preserves order and ratios of differences") {
  oracle::Lcg rng(21);
  std::vector<Date> dates;
  for (int i = 0; i < 40; ++i)
    dates.push_back(Date::from_day_number(16000 + long(rng.below(500))));
  std::sort(dates.begin(), dates.end());
  auto t = normalize_dates(dates, 37.0);
  const double span = double(dates.back().day_number() - dates.front().day_number());
  for (std::size_t i = 0; i < dates.size(); ++i) {
    const double expected =
        37.0 * double(dates[i].day_number() - dates.front().day_number()) / span;
    CHECK(t[i] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK(std::is_sorted(t.begin(), t.end()));
}
