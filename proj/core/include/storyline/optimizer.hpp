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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "storyline/candidates.hpp"
#include "storyline/objective.hpp"

namespace storyline {

struct OptimizerConfig {
  int max_iterations = 200;
  double gradient_step = 1e-4;          // central-difference h
  double convergence_tolerance = 1e-6;  // on the projected-gradient inf-norm
  // Stop once (f_prev - f) <= tol * max(|f_prev|, |f|, 1); 0 disables.
  double relative_reduction_tolerance = 0.0;
  int restarts = 1;
  std::uint64_t rng_seed = 0;
  int memory_pairs = 10;
  int max_line_search_steps = 40;

  void validate() const;
};

// Per-coordinate box [lower_i, upper_i].
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t size() const noexcept { return lower.size(); }
  void project(std::span<double> x) const;
};

using ObjectiveFunction = std::function<double(std::span<const double>)>;
using GradientFunction =
    std::function<void(std::span<const double>, std::span<double>)>;

// Central differences with step h; probes are clamped to the box, so a
// coordinate on a bound falls back to a one-sided quotient.
std::vector<double> central_difference_gradient(const ObjectiveFunction& f,
                                                std::span<const double> x,
                                                const Box& box, double h);

// Infinity norm of the projected gradient P(x - g) - x.
double projected_gradient_norm(std::span<const double> x,
                               std::span<const double> g, const Box& box);

enum class MinimizeStatus {
  kConverged,         // projected gradient below tolerance
  kMaxIterations,
  kSmallReduction,    // relative_reduction_tolerance triggered
  kLineSearchFailed,  // no acceptable step even from steepest descent
  kNonFinite,         // objective returned NaN or infinity
};

std::string_view to_string(MinimizeStatus status);

struct MinimizeResult {
  std::vector<double> x;
  double value = 0.0;
  int iterations = 0;
  int evaluations = 0;
  double projected_gradient_norm = 0.0;
  MinimizeStatus status = MinimizeStatus::kMaxIterations;
};

// Limited-memory BFGS with bound constraints: generalized Cauchy point,
// subspace minimization over the free variables, and a projected
// backtracking line search. Uses `gradient` when given, otherwise central
// differences. The returned point is box-feasible and never worse than
// the projected initial point.
MinimizeResult minimize(const ObjectiveFunction& objective, const Box& box,
                        std::vector<double> init, const OptimizerConfig& config,
                        const GradientFunction& gradient = nullptr);

// --- Story fitting -------------------------------------------------------------

// Restart 0: equally spaced interior points, weights 0.5. Later restarts
// jitter the spacing by up to date_max / (4 |S|) and draw weights from
// [0.25, 0.75], from a stream derived from (rng_seed, restart).
Solution initialize_solution(std::size_t num_candidates,
                             const SegmentationConfig& config,
                             std::uint64_t rng_seed, int restart);

struct RestartOutcome {
  Solution solution;
  double value = 0.0;
  int iterations = 0;
  MinimizeStatus status = MinimizeStatus::kMaxIterations;
  bool aborted = false;
};

struct StoryResult {
  Solution best_solution;
  double objective_value = 0.0;
  std::size_t best_restart = 0;
  std::vector<RestartOutcome> restarts;  // ordered by restart index
};

// Runs `restarts` independent minimizations of `variant` (F5 by default).
// For F1-F4 only the turning points are free and weights are reported as 1.
StoryResult fit_story(const CandidateSet& candidates,
                      const SegmentationConfig& segmentation,
                      const OptimizerConfig& optimizer,
                      ObjectiveVariant variant = ObjectiveVariant::kF5);

struct RankedDocument {
  std::string doc_id;
  std::size_t candidate_index = 0;
  double weight = 0.0;
  double membership = 0.0;  // membership probability for this segment
};

struct StorySegment {
  SegmentBounds bounds;
  std::vector<RankedDocument> docs;
};

struct Story {
  std::vector<double> turning_points;  // sorted interior points
  std::vector<StorySegment> segments;
  std::vector<std::string> seed_ids;
};

// Each candidate goes to its most probable segment; within a segment,
// documents are ranked by weight * membership (ties by date order) and cut
// to top_k.
Story extract_story(const Solution& solution, const CandidateSet& candidates,
                    const SegmentationConfig& segmentation, std::size_t top_k);

inline Story extract_story(const StoryResult& result,
                           const CandidateSet& candidates,
                           const SegmentationConfig& segmentation,
                           std::size_t top_k) {
  return extract_story(result.best_solution, candidates, segmentation, top_k);
}

}  // namespace storyline
