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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "storyline/date.hpp"
#include "storyline/sparse_vector.hpp"

namespace storyline {

enum class EntityType { kPerson, kOrganization, kLocation, kOther };

std::string_view to_string(EntityType type);
// Throws ParseError for names other than person|organization|location|other.
EntityType parse_entity_type(std::string_view name);

struct EntityMention {
  std::string name;
  EntityType type = EntityType::kOther;
  int count = 1;

  friend bool operator==(const EntityMention&, const EntityMention&) = default;
};

// A dated, entity-annotated news article as ingested.
struct Document {
  std::string id;
  Date timestamp;
  std::string title;
  std::optional<std::string> raw_text;
  std::vector<EntityMention> entities;
  // Optional precomputed topic distribution; empty when absent.
  std::vector<double> topics;

  friend bool operator==(const Document&, const Document&) = default;
};

// Entity name -> dense index and document frequency. Indices follow the
// lexicographic order of names.
class EntityVocabulary {
 public:
  struct Entry {
    EntityIndex index;
    std::size_t document_frequency;
  };

  EntityVocabulary() = default;
  static EntityVocabulary build(const std::vector<Document>& documents);

  std::size_t size() const noexcept { return names_.size(); }
  const std::map<std::string, Entry, std::less<>>& entries() const noexcept {
    return entries_;
  }
  std::optional<Entry> find(std::string_view name) const;
  const std::string& name(EntityIndex index) const { return names_.at(index); }
  std::size_t corpus_size() const noexcept { return corpus_size_; }

 private:
  std::map<std::string, Entry, std::less<>> entries_;
  std::vector<std::string> names_;
  std::size_t corpus_size_ = 0;
};

struct WeightedDocument {
  std::string doc_id;
  Date timestamp;
  // Unit L2 norm unless the document has no weighted entities.
  SparseVector weights;
};

struct Corpus {
  // Both sorted by (timestamp, id); weighted[i] belongs to documents[i].
  std::vector<Document> documents;
  std::vector<WeightedDocument> weighted;
  EntityVocabulary vocabulary;
  std::vector<std::string> warnings;

  std::size_t size() const noexcept { return documents.size(); }
  // Position of a document id, or nullopt.
  std::optional<std::size_t> find(std::string_view id) const;
};

// Per-document entity counts keyed by name.
using RawCounts = std::vector<std::vector<EntityMention>>;

struct TfIdfResult {
  std::vector<SparseVector> vectors;
  std::vector<std::string> warnings;
};

// tf = raw count, idf = ln(|D| / df), then L2 normalization. Entities with
// df == |D| get weight zero and are dropped. Throws Error when an entity is
// missing from the vocabulary.
TfIdfResult compute_tf_idf(const RawCounts& raw_counts,
                           const EntityVocabulary& vocabulary);

// Capitalized-run entity extractor used when a record carries text only.
std::vector<EntityMention> fallback_extract_entities(std::string_view text);

// Validates ids, sorts, builds the vocabulary, and computes tf-idf weights.
Corpus build_corpus(std::vector<Document> documents);

// One JSON record per line. Errors carry 1-based line numbers.
Corpus parse_corpus(const std::filesystem::path& path);
Corpus parse_corpus_jsonl(std::string_view contents);

std::string serialize_corpus_jsonl(const Corpus& corpus);
void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace storyline
