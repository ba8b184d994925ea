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
#include <utility>
#include <vector>

namespace storyline {

using EntityIndex = std::uint32_t;

// Sparse non-negative vector over the entity vocabulary. Entries are kept
// sorted by index with no duplicates.
class SparseVector {
 public:
  using Entry = std::pair<EntityIndex, double>;

  SparseVector() = default;
  // Sorts and merges duplicate indices by summation.
  explicit SparseVector(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  // Zero when the index is absent.
  double at(EntityIndex index) const;
  bool contains(EntityIndex index) const;

  double l2_norm() const;
  double sum() const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace storyline
