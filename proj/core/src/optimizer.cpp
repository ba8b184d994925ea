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

#include "storyline/optimizer.hpp"

#include <algorithm>
#include <cmath>

#include "storyline/error.hpp"
#include "storyline/random.hpp"

namespace storyline {

Solution initialize_solution(std::size_t num_candidates,
                             const SegmentationConfig& config,
                             std::uint64_t rng_seed, int restart) {
  const std::size_t k = config.interior_points();
  const double segments = double(config.num_segments);
  Solution s;
  s.interior_turning_points.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    s.interior_turning_points[i] = config.date_max * double(i + 1) / segments;
  }
  if (restart == 0) {
    s.weights.assign(num_candidates, 0.5);
    return s;
  }
  Rng rng = Rng::derive(rng_seed, std::uint64_t(restart));
  const double amplitude = config.date_max / (4.0 * segments);
  for (double& p : s.interior_turning_points) {
    p = std::clamp(p + rng.uniform(-amplitude, amplitude), 0.0,
                   config.date_max);
  }
  s.weights.resize(num_candidates);
  for (double& w : s.weights) w = rng.uniform(0.25, 0.75);
  return s;
}

StoryResult fit_story(const CandidateSet& candidates,
                      const SegmentationConfig& segmentation,
                      const OptimizerConfig& optimizer,
                      ObjectiveVariant variant) {
  segmentation.validate();
  optimizer.validate();
  if (candidates.size() == 0) throw Error("candidate set is empty");

  const PairwiseGeometry geometry(candidates);
  const std::size_t k = segmentation.interior_points();
  const std::size_t n = candidates.size();
  const bool with_weights = variant == ObjectiveVariant::kF5;
  const std::size_t dims = k + (with_weights ? n : 0);

  Box box;
  box.lower.assign(dims, 0.0);
  box.upper.assign(dims, 1.0);
  for (std::size_t i = 0; i < k; ++i) box.upper[i] = segmentation.date_max;

  auto unpack = [&](std::span<const double> x) {
    Solution s;
    s.interior_turning_points.assign(x.begin(), x.begin() + k);
    if (with_weights) {
      s.weights.assign(x.begin() + k, x.end());
    } else {
      s.weights.assign(n, 1.0);
    }
    return s;
  };
  const ObjectiveFunction objective = [&](std::span<const double> x) {
    return evaluate_objective(variant, geometry, segmentation, unpack(x));
  };

  StoryResult result;
  bool have_best = false;
  for (int r = 0; r < optimizer.restarts; ++r) {
    const Solution init =
        initialize_solution(n, segmentation, optimizer.rng_seed, r);
    std::vector<double> x0 = init.interior_turning_points;
    if (with_weights) {
      x0.insert(x0.end(), init.weights.begin(), init.weights.end());
    }
    const auto run = minimize(objective, box, std::move(x0), optimizer);
    RestartOutcome outcome;
    outcome.iterations = run.iterations;
    outcome.status = run.status;
    outcome.aborted = run.status == MinimizeStatus::kNonFinite;
    outcome.solution = unpack(run.x);
    std::sort(outcome.solution.interior_turning_points.begin(),
              outcome.solution.interior_turning_points.end());
    outcome.value = run.value;
    if (!outcome.aborted && (!have_best || outcome.value < result.objective_value)) {
      have_best = true;
      result.best_restart = std::size_t(r);
      result.objective_value = outcome.value;
      result.best_solution = outcome.solution;
    }
    result.restarts.push_back(std::move(outcome));
  }
  if (!have_best) {
    throw Error("every restart produced a non-finite objective");
  }
  return result;
}

Story extract_story(const Solution& solution, const CandidateSet& candidates,
                    const SegmentationConfig& segmentation, std::size_t top_k) {
  if (top_k < 1) throw ConfigError("top_k must be >= 1");
  if (solution.weights.size() != candidates.size()) {
    throw Error("solution weights do not match the candidate set");
  }
  Story story;
  story.turning_points = solution.interior_turning_points;
  std::sort(story.turning_points.begin(), story.turning_points.end());
  const auto bounds =
      segment_bounds(story.turning_points, segmentation.date_max);
  for (const auto& b : bounds) story.segments.push_back({b, {}});

  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const auto probs = membership_probabilities(
        candidates.scaled_times[i], bounds, segmentation.gamma_variance);
    std::size_t best = 0;
    for (std::size_t s = 1; s < bounds.size(); ++s) {
      if (probs.probabilities[s] > probs.probabilities[best]) best = s;
    }
    story.segments[best].docs.push_back({candidates.documents[i].doc_id, i,
                                         solution.weights[i],
                                         probs.probabilities[best]});
  }
  for (auto& seg : story.segments) {
    std::stable_sort(seg.docs.begin(), seg.docs.end(),
                     [](const RankedDocument& a, const RankedDocument& b) {
                       return a.weight * a.membership >
                              b.weight * b.membership;
                     });
    if (seg.docs.size() > top_k) seg.docs.resize(top_k);
  }
  for (auto idx : candidates.seed_indices) {
    story.seed_ids.push_back(candidates.documents[idx].doc_id);
  }
  return story;
}

}  // namespace storyline
