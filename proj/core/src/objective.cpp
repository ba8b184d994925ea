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

#include "storyline/objective.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "storyline/error.hpp"

namespace storyline {

void SegmentationConfig::validate() const {
  if (num_segments < 1) throw ConfigError("num_segments must be >= 1");
  if (!(gamma_variance > 0.0)) throw ConfigError("gamma_variance must be > 0");
  if (!(overlap_sigma > 0.0)) throw ConfigError("overlap_sigma must be > 0");
  if (!(date_max > 0.0)) throw ConfigError("date_max must be > 0");
}

std::vector<SegmentBounds> segment_bounds(std::span<const double> interior,
                                          double date_max) {
  std::vector<double> points(interior.begin(), interior.end());
  std::sort(points.begin(), points.end());
  std::vector<SegmentBounds> out;
  out.reserve(points.size() + 1);
  double lower = 0.0;
  for (double p : points) {
    out.push_back({lower, p});
    lower = p;
  }
  out.push_back({lower, date_max});
  return out;
}

double soergel(const SparseVector& a, const SparseVector& b) {
  const auto& ea = a.entries();
  const auto& eb = b.entries();
  double num = 0.0, den = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ea.size() || j < eb.size()) {
    if (j == eb.size() || (i < ea.size() && ea[i].first < eb[j].first)) {
      num += ea[i].second;
      den += ea[i].second;
      ++i;
    } else if (i == ea.size() || eb[j].first < ea[i].first) {
      num += eb[j].second;
      den += eb[j].second;
      ++j;
    } else {
      num += std::abs(ea[i].second - eb[j].second);
      den += std::max(ea[i].second, eb[j].second);
      ++i;
      ++j;
    }
  }
  return den > 0.0 ? num / den : 0.0;
}

double scaled_membership(double t, SegmentBounds bounds,
                         double gamma_variance) {
  if (t < bounds.lower) {
    const double d = t - bounds.lower;
    return std::exp(-d * d / (2.0 * gamma_variance));
  }
  if (t > bounds.upper) {
    const double d = t - bounds.upper;
    return std::exp(-d * d / (2.0 * gamma_variance));
  }
  return 1.0;
}

double gamma_membership(double t, SegmentBounds bounds,
                        double gamma_variance) {
  const double peak =
      1.0 / std::sqrt(2.0 * std::numbers::pi * gamma_variance);
  return peak * scaled_membership(t, bounds, gamma_variance);
}

MembershipProbabilities membership_probabilities(
    double t, std::span<const SegmentBounds> segments, double gamma_variance) {
  if (segments.empty()) throw Error("membership needs at least one segment");
  MembershipProbabilities out;
  out.probabilities.resize(segments.size());
  double total = 0.0;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    out.probabilities[s] = gamma_membership(t, segments[s], gamma_variance);
    total += out.probabilities[s];
  }
  if (!(total > 0.0)) {
    out.underflow = true;
    std::fill(out.probabilities.begin(), out.probabilities.end(),
              1.0 / double(segments.size()));
    return out;
  }
  for (double& p : out.probabilities) p /= total;
  return out;
}

std::vector<std::size_t> hard_assignment(
    std::span<const double> times, std::span<const SegmentBounds> segments,
    double gamma_variance) {
  std::vector<std::size_t> out(times.size(), 0);
  for (std::size_t i = 0; i < times.size(); ++i) {
    double best = -1.0;
    for (std::size_t s = 0; s < segments.size(); ++s) {
      const double m = gamma_membership(times[i], segments[s], gamma_variance);
      if (m > best) {
        best = m;
        out[i] = s;
      }
    }
  }
  return out;
}

PairwiseGeometry::PairwiseGeometry(std::span<const SparseVector> docs,
                                   std::vector<double> times, double date_max)
    : n_(docs.size()), date_max_(date_max), times_(std::move(times)) {
  if (times_.size() != n_) throw Error("documents and times differ in length");
  distance_.assign(n_ * n_, 0.0);
  incoherence_.assign(n_ * n_, 0.0);
  similarity_.assign(n_ * n_, 1.0);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double d = soergel(docs[i], docs[j]);
      const double inc = d * date_delta(times_[i], times_[j]);
      const double sim = std::exp(-d);
      distance_[i * n_ + j] = distance_[j * n_ + i] = d;
      incoherence_[i * n_ + j] = incoherence_[j * n_ + i] = inc;
      similarity_[i * n_ + j] = similarity_[j * n_ + i] = sim;
    }
  }
}

namespace {

std::vector<SparseVector> weight_vectors(const CandidateSet& c) {
  std::vector<SparseVector> out;
  out.reserve(c.size());
  for (const auto& d : c.documents) out.push_back(d.weights);
  return out;
}

}  // namespace

PairwiseGeometry::PairwiseGeometry(const CandidateSet& candidates)
    : PairwiseGeometry(weight_vectors(candidates), candidates.scaled_times,
                       candidates.date_max) {}

// --- Discrete terms ----------------------------------------------------------

double incoherence_v1(const PairwiseGeometry& g,
                      std::span<const std::size_t> members) {
  const std::size_t n = members.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      sum += g.distance(members[a], members[b]);
    }
  }
  return sum / (double(n * n - n) / 2.0);
}

double incoherence_v2(const PairwiseGeometry& g,
                      std::span<const std::size_t> members) {
  const std::size_t n = members.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      sum += g.incoherence_kernel(members[a], members[b]);
    }
  }
  return sum / (double(n * n - n) / 2.0);
}

double unconnectedness(const PairwiseGeometry& g,
                       std::span<const std::size_t> members,
                       std::span<const std::size_t> others) {
  if (members.empty() || others.empty()) return 0.0;
  double sum = 0.0;
  for (auto i : members) {
    for (auto j : others) sum += g.distance(i, j);
  }
  return sum / double(members.size() * others.size());
}

double similarity_v1(const PairwiseGeometry& g,
                     std::span<const std::size_t> members,
                     std::span<const std::size_t> others) {
  if (members.empty() || others.empty()) return 0.0;
  double sum = 0.0;
  for (auto i : members) {
    for (auto j : others) sum += g.similarity_kernel(i, j);
  }
  return sum / double(members.size() * others.size());
}

namespace {

std::vector<std::size_t> iota_indices(std::size_t n, std::size_t start = 0) {
  std::vector<std::size_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = start + i;
  return out;
}

PairwiseGeometry joint_geometry(std::span<const SparseVector> a,
                                std::span<const SparseVector> b) {
  std::vector<SparseVector> docs(a.begin(), a.end());
  docs.insert(docs.end(), b.begin(), b.end());
  return PairwiseGeometry(docs, std::vector<double>(docs.size(), 0.0), 1.0);
}

}  // namespace

double incoherence_v1(std::span<const SparseVector> docs) {
  PairwiseGeometry g(docs, std::vector<double>(docs.size(), 0.0), 1.0);
  return incoherence_v1(g, iota_indices(docs.size()));
}

double incoherence_v2(std::span<const SparseVector> docs,
                      std::span<const double> times) {
  PairwiseGeometry g(docs, std::vector<double>(times.begin(), times.end()),
                     1.0);
  return incoherence_v2(g, iota_indices(docs.size()));
}

double unconnectedness(std::span<const SparseVector> segment,
                       std::span<const SparseVector> others) {
  auto g = joint_geometry(segment, others);
  return unconnectedness(g, iota_indices(segment.size()),
                         iota_indices(others.size(), segment.size()));
}

double similarity_v1(std::span<const SparseVector> segment,
                     std::span<const SparseVector> others) {
  auto g = joint_geometry(segment, others);
  return similarity_v1(g, iota_indices(segment.size()),
                       iota_indices(others.size(), segment.size()));
}

// --- Soft terms ----------------------------------------------------------------

namespace {

std::vector<double> memberships(std::span<const double> times,
                                SegmentBounds bounds, double var) {
  std::vector<double> m(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    m[i] = scaled_membership(times[i], bounds, var);
  }
  return m;
}

double weight_at(std::span<const double> weights, std::size_t i) {
  return weights.empty() ? 1.0 : weights[i];
}

void check_weights(const PairwiseGeometry& g, std::span<const double> w) {
  if (!w.empty() && w.size() != g.size()) {
    throw Error("weight vector length " + std::to_string(w.size()) +
                " does not match " + std::to_string(g.size()) +
                " candidates");
  }
}

SoftTerm soft_incoherence_from(const PairwiseGeometry& g,
                               std::span<const double> m,
                               std::span<const double> weights) {
  const std::size_t n = g.size();
  std::vector<double> a(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = weight_at(weights, i) * m[i];
    total += a[i];
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    const double* row = g.incoherence_row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += a[j] * row[j];
    num += a[i] * acc;  // row[i] == 0, so the self-pair adds nothing
    den += a[i] * (total - a[i]);
  }
  if (!(den >= kDegenerateMass)) return {0.0, true};
  return {num / den, false};
}

SoftTerm soft_similarity_from(const PairwiseGeometry& g,
                              std::span<const double> m,
                              std::span<const double> weights) {
  const std::size_t n = g.size();
  std::vector<double> a(n), c(n);
  double total_c = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weight_at(weights, i);
    a[i] = w * m[i];
    c[i] = w * (1.0 - m[i]);
    total_c += c[i];
  }
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    const double* row = g.similarity_row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += c[j] * row[j];
    acc -= c[i] * row[i];
    num += a[i] * acc;
    den += a[i] * (total_c - c[i]);
  }
  if (!(den >= kDegenerateMass)) return {0.0, true};
  return {num / den, false};
}

}  // namespace

SoftTerm incoherence_soft(const PairwiseGeometry& g, SegmentBounds bounds,
                          std::span<const double> weights,
                          double gamma_variance) {
  check_weights(g, weights);
  const auto m = memberships(g.times(), bounds, gamma_variance);
  return soft_incoherence_from(g, m, weights);
}

SoftTerm similarity_soft(const PairwiseGeometry& g, SegmentBounds bounds,
                         std::span<const double> weights,
                         double gamma_variance) {
  check_weights(g, weights);
  const auto m = memberships(g.times(), bounds, gamma_variance);
  return soft_similarity_from(g, m, weights);
}

double overlap_penalty(std::span<const double> interior,
                       double overlap_sigma) {
  double sum = 0.0;
  const double two_var = 2.0 * overlap_sigma * overlap_sigma;
  for (std::size_t m = 0; m < interior.size(); ++m) {
    for (std::size_t n = m + 1; n < interior.size(); ++n) {
      const double d = interior[m] - interior[n];
      sum += std::exp(-d * d / two_var);
    }
  }
  return 1.0 + sum;
}

double uniformity_penalty(std::span<const double> times,
                          std::span<const double> weights,
                          std::span<const SegmentBounds> segments,
                          double gamma_variance) {
  if (!weights.empty() && weights.size() != times.size()) {
    throw Error("weights and times differ in length");
  }
  const std::size_t n = times.size();
  const double root_n = std::sqrt(double(n));
  double penalty = 1.0;
  std::vector<double> v(n);
  for (const auto& seg : segments) {
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = weight_at(weights, i) *
             scaled_membership(times[i], seg, gamma_variance);
      mass += v[i];
    }
    if (!(mass > 0.0)) {
      penalty += 1.0;
      continue;
    }
    if (n < 2) continue;  // a single candidate is trivially concentrated
    double sq = 0.0;
    for (double x : v) sq += (x / mass) * (x / mass);
    const double term = 1.0 - (std::sqrt(sq) * root_n - 1.0) / (root_n - 1.0);
    penalty += std::clamp(term, 0.0, 1.0);
  }
  return penalty;
}

// --- Variants -------------------------------------------------------------------

std::string_view to_string(ObjectiveVariant v) {
  switch (v) {
    case ObjectiveVariant::kF1: return "F1";
    case ObjectiveVariant::kF2: return "F2";
    case ObjectiveVariant::kF3: return "F3";
    case ObjectiveVariant::kF4: return "F4";
    case ObjectiveVariant::kF5: return "F5";
  }
  return "F5";
}

ObjectiveVariant parse_objective_variant(std::string_view name) {
  if (name == "F1" || name == "f1") return ObjectiveVariant::kF1;
  if (name == "F2" || name == "f2") return ObjectiveVariant::kF2;
  if (name == "F3" || name == "f3") return ObjectiveVariant::kF3;
  if (name == "F4" || name == "f4") return ObjectiveVariant::kF4;
  if (name == "F5" || name == "f5") return ObjectiveVariant::kF5;
  throw ConfigError("unknown objective variant '" + std::string(name) + "'");
}

ObjectiveTerms objective_terms(ObjectiveVariant variant,
                               const PairwiseGeometry& geometry,
                               const SegmentationConfig& config,
                               const Solution& solution) {
  if (solution.interior_turning_points.size() != config.interior_points()) {
    throw Error("expected " + std::to_string(config.interior_points()) +
                " interior turning points, got " +
                std::to_string(solution.interior_turning_points.size()));
  }
  const bool uses_weights = variant == ObjectiveVariant::kF5;
  if (uses_weights && solution.weights.size() != geometry.size()) {
    throw Error("expected " + std::to_string(geometry.size()) +
                " weights, got " + std::to_string(solution.weights.size()));
  }

  ObjectiveTerms terms;
  terms.variant = variant;
  const auto segments =
      segment_bounds(solution.interior_turning_points, config.date_max);
  const double var = config.gamma_variance;

  if (variant == ObjectiveVariant::kF1 || variant == ObjectiveVariant::kF2 ||
      variant == ObjectiveVariant::kF3) {
    const auto assign = hard_assignment(geometry.times(), segments, var);
    std::vector<std::vector<std::size_t>> members(segments.size());
    for (std::size_t i = 0; i < assign.size(); ++i) {
      members[assign[i]].push_back(i);
    }
    for (std::size_t s = 0; s < segments.size(); ++s) {
      std::vector<std::size_t> others;
      for (std::size_t i = 0; i < assign.size(); ++i) {
        if (assign[i] != s) others.push_back(i);
      }
      SegmentTerms st;
      st.bounds = segments[s];
      switch (variant) {
        case ObjectiveVariant::kF1:
          st.incoherence = incoherence_v1(geometry, members[s]);
          st.contribution = st.incoherence;
          break;
        case ObjectiveVariant::kF2:
          st.incoherence = incoherence_v2(geometry, members[s]);
          st.cross_term = unconnectedness(geometry, members[s], others);
          st.contribution = st.incoherence - st.cross_term;
          break;
        default:
          st.incoherence = incoherence_v2(geometry, members[s]);
          st.cross_term = similarity_v1(geometry, members[s], others);
          st.contribution = st.incoherence * st.cross_term;
          break;
      }
      terms.segment_sum += st.contribution;
      terms.segments.push_back(st);
    }
    terms.value = terms.segment_sum;
    return terms;
  }

  const std::span<const double> weights =
      uses_weights ? std::span<const double>(solution.weights)
                   : std::span<const double>();
  for (const auto& seg : segments) {
    const auto m = memberships(geometry.times(), seg, var);
    const auto inc = soft_incoherence_from(geometry, m, weights);
    const auto sim = soft_similarity_from(geometry, m, weights);
    SegmentTerms st;
    st.bounds = seg;
    st.incoherence = inc.value;
    st.cross_term = sim.value;
    st.degenerate = inc.degenerate || sim.degenerate;
    st.contribution =
        st.degenerate ? geometry.date_max() : inc.value * sim.value;
    terms.segment_sum += st.contribution;
    terms.segments.push_back(st);
  }
  terms.overlap =
      overlap_penalty(solution.interior_turning_points, config.overlap_sigma);
  if (uses_weights) {
    terms.uniformity =
        uniformity_penalty(geometry.times(), solution.weights, segments, var);
  }
  terms.value = terms.segment_sum * terms.overlap * terms.uniformity;
  return terms;
}

double evaluate_objective(ObjectiveVariant variant,
                          const PairwiseGeometry& geometry,
                          const SegmentationConfig& config,
                          const Solution& solution) {
  return objective_terms(variant, geometry, config, solution).value;
}

double evaluate_objective(ObjectiveVariant variant,
                          const CandidateSet& candidates,
                          const SegmentationConfig& config,
                          const Solution& solution) {
  return evaluate_objective(variant, PairwiseGeometry(candidates), config,
                            solution);
}

}  // namespace storyline
