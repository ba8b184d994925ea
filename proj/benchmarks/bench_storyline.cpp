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

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "storyline/candidates.hpp"
#include "storyline/corpus.hpp"
#include "storyline/objective.hpp"
#include "storyline/optimizer.hpp"
#include "storyline/synthetic.hpp"

namespace {

using namespace storyline;

SparseVector random_vector(std::mt19937_64& rng, std::size_t dim, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SparseVector::Entry> e;
  for (std::size_t i = 0; i < dim; ++i)
    if (u(rng) < density) e.push_back({EntityIndex(i), u(rng)});
  return SparseVector(std::move(e));
}

CandidateSet planted(std::size_t docs_per_cluster) {
  SyntheticSpec spec;
  spec.docs_per_cluster = docs_per_cluster;
  auto syn = generate_synthetic_corpus(spec);
  Corpus corpus = build_corpus(syn.documents);
  const std::vector<std::string> seeds{syn.seed_id};
  return filter_candidates(corpus, {}, seeds, {});
}

Solution midpoint_solution(std::size_t n) {
  Solution s{{33.0, 66.0}, std::vector<double>(n, 0.5)};
  return s;
}

void BM_Soergel(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_vector(rng, std::size_t(state.range(0)), 0.2);
  const auto b = random_vector(rng, std::size_t(state.range(0)), 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(soergel(a, b));
}
BENCHMARK(BM_Soergel)->Arg(64)->Arg(1024)->Arg(16384);

void BM_PairwiseGeometry(benchmark::State& state) {
  const auto c = planted(std::size_t(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(PairwiseGeometry(c));
  state.SetComplexityN(state.range(0) * 3);
}
BENCHMARK(BM_PairwiseGeometry)->RangeMultiplier(2)->Range(20, 160)->Complexity();

void BM_EvaluateF5(benchmark::State& state) {
  const auto c = planted(std::size_t(state.range(0)));
  const PairwiseGeometry g(c);
  const SegmentationConfig seg;
  const auto s = midpoint_solution(c.size());
  for (auto _ : state)
    benchmark::DoNotOptimize(evaluate_objective(ObjectiveVariant::kF5, g, seg, s));
  state.SetComplexityN(state.range(0) * 3);
}
BENCHMARK(BM_EvaluateF5)->RangeMultiplier(2)->Range(20, 160)->Complexity();

void BM_GradientF5(benchmark::State& state) {
  const auto c = planted(std::size_t(state.range(0)));
  const PairwiseGeometry g(c);
  const SegmentationConfig seg;
  const std::size_t n = c.size();
  auto f = [&](std::span<const double> x) {
    Solution s{{x[0], x[1]}, std::vector<double>(x.begin() + 2, x.end())};
    return evaluate_objective(ObjectiveVariant::kF5, g, seg, s);
  };
  std::vector<double> x(n + 2, 0.5), lo(n + 2, 0.0), hi(n + 2, 1.0);
  x[0] = 33.0;
  x[1] = 66.0;
  hi[0] = hi[1] = 100.0;
  const Box box{lo, hi};
  for (auto _ : state)
    benchmark::DoNotOptimize(central_difference_gradient(f, x, box, 1e-4));
}
BENCHMARK(BM_GradientF5)->Arg(20)->Arg(40);

void BM_FitStory(benchmark::State& state) {
  const auto c = planted(20);
  const SegmentationConfig seg;
  OptimizerConfig opt;
  opt.restarts = int(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_story(c, seg, opt));
}
BENCHMARK(BM_FitStory)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
