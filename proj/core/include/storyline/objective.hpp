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
#include <span>
#include <string_view>
#include <vector>

#include "storyline/candidates.hpp"
#include "storyline/sparse_vector.hpp"

namespace storyline {

struct SegmentationConfig {
  int num_segments = 3;          // |S|; the story has |S| - 1 interior points
  double gamma_variance = 12.0;  // variance of the membership tails
  double overlap_sigma = 5.0;    // width of the turning-point overlap kernel
  double date_max = 100.0;

  void validate() const;
  std::size_t interior_points() const {
    return num_segments > 1 ? std::size_t(num_segments - 1) : 0;
  }
};

// Decision variables: interior turning points in [0, date_max] and one
// relevance weight in [0, 1] per candidate.
struct Solution {
  std::vector<double> interior_turning_points;
  std::vector<double> weights;

  friend bool operator==(const Solution&, const Solution&) = default;
};

struct SegmentBounds {
  double lower = 0.0;
  double upper = 0.0;

  friend bool operator==(const SegmentBounds&, const SegmentBounds&) = default;
};

// Segments [0, p1], [p1, p2], ..., [pk, date_max] from the sorted interior
// points. The outer turning points are fixed.
std::vector<SegmentBounds> segment_bounds(std::span<const double> interior,
                                          double date_max);

// --- Pairwise primitives -------------------------------------------------

// sum |a_e - b_e| / sum max(a_e, b_e); 0 when both vectors are empty.
double soergel(const SparseVector& a, const SparseVector& b);

inline double date_delta(double t_i, double t_j) {
  return t_i > t_j ? t_i - t_j : t_j - t_i;
}

// --- Membership ----------------------------------------------------------

// Flat at 1/sqrt(2 pi var) inside (lower, upper), Gaussian tails centered on
// the bounds outside.
double gamma_membership(double t, SegmentBounds bounds, double gamma_variance);

// gamma_membership rescaled so the plateau is exactly 1. Used for the soft
// pair weights and the uniformity penalty.
double scaled_membership(double t, SegmentBounds bounds,
                         double gamma_variance);

struct MembershipProbabilities {
  std::vector<double> probabilities;
  bool underflow = false;  // every score was 0; a uniform vector was returned
};

MembershipProbabilities membership_probabilities(
    double t, std::span<const SegmentBounds> segments, double gamma_variance);

// Segment index with the largest membership for each time; ties go to the
// earlier segment.
std::vector<std::size_t> hard_assignment(
    std::span<const double> times, std::span<const SegmentBounds> segments,
    double gamma_variance);

// --- Precomputed pairwise geometry ---------------------------------------

// Dense n x n tables of Soergel distance, soergel * date gap, and
// exp(-soergel) over a fixed candidate list.
class PairwiseGeometry {
 public:
  PairwiseGeometry(std::span<const SparseVector> docs,
                   std::vector<double> times, double date_max);
  explicit PairwiseGeometry(const CandidateSet& candidates);

  std::size_t size() const noexcept { return times_.size(); }
  double date_max() const noexcept { return date_max_; }
  std::span<const double> times() const noexcept { return times_; }

  double distance(std::size_t i, std::size_t j) const {
    return distance_[i * n_ + j];
  }
  double incoherence_kernel(std::size_t i, std::size_t j) const {
    return incoherence_[i * n_ + j];
  }
  double similarity_kernel(std::size_t i, std::size_t j) const {
    return similarity_[i * n_ + j];
  }
  const double* incoherence_row(std::size_t i) const {
    return incoherence_.data() + i * n_;
  }
  const double* similarity_row(std::size_t i) const {
    return similarity_.data() + i * n_;
  }

 private:
  std::size_t n_ = 0;
  double date_max_ = 0.0;
  std::vector<double> times_;
  std::vector<double> distance_;
  std::vector<double> incoherence_;
  std::vector<double> similarity_;
};

// --- Discrete (hard-assignment) terms --------------------------------------

// Mean pairwise Soergel distance over the (n^2 - n) / 2 unordered pairs.
// Zero for fewer than two documents.
double incoherence_v1(std::span<const SparseVector> docs);
// Mean over unordered pairs of soergel * date gap.
double incoherence_v2(std::span<const SparseVector> docs,
                      std::span<const double> times);
// Mean Soergel distance over segment x others; 0 if either side is empty.
double unconnectedness(std::span<const SparseVector> segment,
                       std::span<const SparseVector> others);
// Mean exp(-soergel) over segment x others; 0 if either side is empty.
double similarity_v1(std::span<const SparseVector> segment,
                     std::span<const SparseVector> others);

// Same terms over index subsets of a precomputed geometry.
double incoherence_v1(const PairwiseGeometry& g,
                      std::span<const std::size_t> members);
double incoherence_v2(const PairwiseGeometry& g,
                      std::span<const std::size_t> members);
double unconnectedness(const PairwiseGeometry& g,
                       std::span<const std::size_t> members,
                       std::span<const std::size_t> others);
double similarity_v1(const PairwiseGeometry& g,
                     std::span<const std::size_t> members,
                     std::span<const std::size_t> others);

// --- Soft (membership-weighted) terms --------------------------------------

struct SoftTerm {
  double value = 0.0;
  // The weighted pair mass fell below 1e-12; value is reported as 0.
  bool degenerate = false;
};

inline constexpr double kDegenerateMass = 1e-12;

// Weighted soft mean of soergel * date gap with pair weight
// w_i w_j m_i m_j (m = scaled membership), self-pairs excluded. Empty
// `weights` means all ones.
SoftTerm incoherence_soft(const PairwiseGeometry& g, SegmentBounds bounds,
                          std::span<const double> weights,
                          double gamma_variance);

// Weighted soft mean of exp(-soergel) with pair weight
// w_i w_j m_i (1 - m_j), self-pairs excluded.
SoftTerm similarity_soft(const PairwiseGeometry& g, SegmentBounds bounds,
                         std::span<const double> weights,
                         double gamma_variance);

// 1 + sum over interior pairs of exp(-(p_m - p_n)^2 / (2 sigma^2)).
double overlap_penalty(std::span<const double> interior, double overlap_sigma);

// 1 + sum over segments of 1 - (||v||_2 sqrt(n) - 1) / (sqrt(n) - 1) where
// v is w * m_s normalized to unit sum over all n candidates. A segment with
// no positive mass contributes 1.
double uniformity_penalty(std::span<const double> times,
                          std::span<const double> weights,
                          std::span<const SegmentBounds> segments,
                          double gamma_variance);

// --- Objective variants ------------------------------------------------------

enum class ObjectiveVariant { kF1, kF2, kF3, kF4, kF5 };

std::string_view to_string(ObjectiveVariant v);
ObjectiveVariant parse_objective_variant(std::string_view name);

struct SegmentTerms {
  SegmentBounds bounds;
  // incoherence_v1 (F1), incoherence_v2 (F2, F3) or soft incoherence (F4, F5)
  double incoherence = 0.0;
  // unconnectedness (F2), similarity_v1 (F3) or soft similarity (F4, F5);
  // unused for F1.
  double cross_term = 0.0;
  bool degenerate = false;
  // This segment's summand.
  double contribution = 0.0;
};

struct ObjectiveTerms {
  ObjectiveVariant variant = ObjectiveVariant::kF5;
  std::vector<SegmentTerms> segments;
  double segment_sum = 0.0;
  double overlap = 1.0;     // F4, F5
  double uniformity = 1.0;  // F5
  double value = 0.0;
};

// Every factor of the chosen variant. F1-F3 use hard assignment, F4 uses
// unit weights, F5 uses solution.weights. A degenerate soft segment
// contributes date_max, the supremum of incoherence * similarity.
ObjectiveTerms objective_terms(ObjectiveVariant variant,
                               const PairwiseGeometry& geometry,
                               const SegmentationConfig& config,
                               const Solution& solution);

double evaluate_objective(ObjectiveVariant variant,
                          const PairwiseGeometry& geometry,
                          const SegmentationConfig& config,
                          const Solution& solution);

double evaluate_objective(ObjectiveVariant variant,
                          const CandidateSet& candidates,
                          const SegmentationConfig& config,
                          const Solution& solution);

}  // namespace storyline
