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

#include "storyline/topic_model.hpp"

#include <cmath>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "storyline/error.hpp"
#include "storyline/random.hpp"

namespace storyline {

LdaResult fit_reference_lda(const Corpus& corpus, const LdaOptions& options) {
  const int K = options.num_topics;
  if (K < 2) throw ConfigError("LDA needs at least 2 topics");
  if (corpus.size() == 0) throw ConfigError("LDA needs a non-empty corpus");
  const std::size_t V = corpus.vocabulary.size();
  if (std::size_t(K) > V) {
    throw ConfigError("LDA topic count " + std::to_string(K) +
                      " exceeds vocabulary size " + std::to_string(V));
  }

  LdaResult result;
  result.alpha_prior = 50.0 / K;
  result.beta_prior = 0.01;
  const double alpha = result.alpha_prior;
  const double beta = result.beta_prior;

  // Token streams: word index per occurrence.
  const std::size_t D = corpus.size();
  std::vector<std::vector<std::uint32_t>> words(D);
  for (std::size_t d = 0; d < D; ++d) {
    for (const auto& e : corpus.documents[d].entities) {
      const auto idx = corpus.vocabulary.find(e.name)->index;
      for (int c = 0; c < e.count; ++c) words[d].push_back(idx);
    }
  }

  Rng rng(options.rng_seed);
  std::vector<std::vector<int>> z(D);
  std::vector<int> n_dk(D * K, 0), n_kw(std::size_t(K) * V, 0), n_k(K, 0);
  for (std::size_t d = 0; d < D; ++d) {
    z[d].resize(words[d].size());
    for (std::size_t i = 0; i < words[d].size(); ++i) {
      const int k = int(rng.below(K));
      z[d][i] = k;
      ++n_dk[d * K + k];
      ++n_kw[std::size_t(k) * V + words[d][i]];
      ++n_k[k];
    }
  }

  std::vector<double> p(K);
  const double v_beta = double(V) * beta;
  for (int it = 0; it < options.iterations; ++it) {
    for (std::size_t d = 0; d < D; ++d) {
      for (std::size_t i = 0; i < words[d].size(); ++i) {
        const auto w = words[d][i];
        int k = z[d][i];
        --n_dk[d * K + k];
        --n_kw[std::size_t(k) * V + w];
        --n_k[k];
        double total = 0.0;
        for (int t = 0; t < K; ++t) {
          total += (n_dk[d * K + t] + alpha) *
                   (n_kw[std::size_t(t) * V + w] + beta) / (n_k[t] + v_beta);
          p[t] = total;
        }
        const double u = rng.uniform() * total;
        k = 0;
        while (k < K - 1 && p[k] <= u) ++k;
        z[d][i] = k;
        ++n_dk[d * K + k];
        ++n_kw[std::size_t(k) * V + w];
        ++n_k[k];
      }
    }
  }

  result.distributions.resize(D);
  for (std::size_t d = 0; d < D; ++d) {
    auto& theta = result.distributions[d];
    theta.assign(K, 1.0 / K);
    if (words[d].empty()) {
      result.warnings.push_back("document '" + corpus.documents[d].id +
                                "' has no entities; uniform topics assigned");
      continue;
    }
    const double denom = double(words[d].size()) + K * alpha;
    for (int t = 0; t < K; ++t) theta[t] = (n_dk[d * K + t] + alpha) / denom;
  }
  return result;
}

double kl_divergence(const TopicDistribution& p, const TopicDistribution& q) {
  if (p.size() != q.size()) {
    throw Error("KL divergence dimension mismatch: " +
                std::to_string(p.size()) + " vs " + std::to_string(q.size()));
  }
  static constexpr double kFloor = 1e-10;
  auto floored = [](const TopicDistribution& v) {
    std::vector<double> out(v.size());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out[i] = std::max(v[i], kFloor);
      s += out[i];
    }
    for (double& x : out) x /= s;
    return out;
  };
  const auto pf = floored(p);
  const auto qf = floored(q);
  double kl = 0.0;
  for (std::size_t i = 0; i < pf.size(); ++i) {
    kl += pf[i] * std::log(pf[i] / qf[i]);
  }
  return std::max(kl, 0.0);
}

void validate_topic_distribution(const TopicDistribution& p) {
  if (p.empty()) throw Error("empty topic distribution");
  double s = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw Error("topic distribution has a negative or non-finite entry");
    }
    s += x;
  }
  if (std::abs(s - 1.0) > 1e-6) {
    throw Error("topic distribution sums to " + std::to_string(s) +
                ", expected 1");
  }
}

std::unordered_map<std::string, TopicDistribution> read_topics_sidecar(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open topics file " + path.string());
  std::unordered_map<std::string, TopicDistribution> out;
  std::string line;
  std::size_t line_no = 0;
  std::size_t k = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
      TopicDistribution t = rec.at("topics").get<TopicDistribution>();
      validate_topic_distribution(t);
      if (k == 0) k = t.size();
      if (t.size() != k) throw Error("inconsistent topic count");
      out[rec.at("id").get<std::string>()] = std::move(t);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

void write_topics_sidecar(const std::filesystem::path& path,
                          const std::vector<std::string>& ids,
                          const std::vector<TopicDistribution>& topics) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    out << nlohmann::json{{"id", ids[i]}, {"topics", topics[i]}}.dump()
        << '\n';
  }
}

std::vector<TopicDistribution> embedded_topics(const Corpus& corpus) {
  std::vector<TopicDistribution> out;
  for (const auto& doc : corpus.documents) {
    if (doc.topics.empty()) return {};
    out.push_back(doc.topics);
  }
  for (const auto& t : out) {
    validate_topic_distribution(t);
    if (t.size() != out.front().size()) {
      throw Error("embedded topic distributions differ in length");
    }
  }
  return out;
}

}  // namespace storyline
