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

#include "storyline/sparse_vector.hpp"

#include <algorithm>
#include <cmath>

namespace storyline {

SparseVector::SparseVector(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (const auto& e : entries) {
    if (!entries_.empty() && entries_.back().first == e.first) {
      entries_.back().second += e.second;
    } else {
      entries_.push_back(e);
    }
  }
}

double SparseVector::at(EntityIndex index) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const Entry& e, EntityIndex i) { return e.first < i; });
  return it != entries_.end() && it->first == index ? it->second : 0.0;
}

bool SparseVector::contains(EntityIndex index) const {
  auto it = std::lower_bound(
      entries_.begin(), entries_.end(), index,
      [](const Entry& e, EntityIndex i) { return e.first < i; });
  return it != entries_.end() && it->first == index;
}

double SparseVector::l2_norm() const {
  double s = 0.0;
  for (const auto& [_, v] : entries_) s += v * v;
  return std::sqrt(s);
}

double SparseVector::sum() const {
  double s = 0.0;
  for (const auto& [_, v] : entries_) s += v;
  return s;
}

}  // namespace storyline
