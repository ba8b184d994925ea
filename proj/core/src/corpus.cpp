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

#include "storyline/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "storyline/error.hpp"

namespace storyline {

using json = nlohmann::json;

std::string_view to_string(EntityType type) {
  switch (type) {
    case EntityType::kPerson: return "person";
    case EntityType::kOrganization: return "organization";
    case EntityType::kLocation: return "location";
    case EntityType::kOther: return "other";
  }
  return "other";
}

EntityType parse_entity_type(std::string_view name) {
  if (name == "person") return EntityType::kPerson;
  if (name == "organization") return EntityType::kOrganization;
  if (name == "location") return EntityType::kLocation;
  if (name == "other") return EntityType::kOther;
  throw ParseError(0, "unknown entity type '" + std::string(name) + "'");
}

EntityVocabulary EntityVocabulary::build(
    const std::vector<Document>& documents) {
  EntityVocabulary vocab;
  vocab.corpus_size_ = documents.size();
  std::map<std::string, std::size_t, std::less<>> df;
  for (const auto& doc : documents) {
    std::set<std::string_view> seen;
    for (const auto& e : doc.entities) {
      if (seen.insert(e.name).second) ++df[e.name];
    }
  }
  EntityIndex next = 0;
  for (const auto& [name, count] : df) {
    vocab.entries_.emplace(name, Entry{next++, count});
    vocab.names_.push_back(name);
  }
  return vocab;
}

std::optional<EntityVocabulary::Entry> EntityVocabulary::find(
    std::string_view name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Corpus::find(std::string_view id) const {
  for (std::size_t i = 0; i < documents.size(); ++i) {
    if (documents[i].id == id) return i;
  }
  return std::nullopt;
}

TfIdfResult compute_tf_idf(const RawCounts& raw_counts,
                           const EntityVocabulary& vocabulary) {
  TfIdfResult result;
  result.vectors.reserve(raw_counts.size());
  const double n_docs = double(vocabulary.corpus_size());
  for (std::size_t d = 0; d < raw_counts.size(); ++d) {
    std::vector<SparseVector::Entry> entries;
    for (const auto& mention : raw_counts[d]) {
      auto entry = vocabulary.find(mention.name);
      if (!entry) {
        throw Error("entity '" + mention.name + "' is not in the vocabulary");
      }
      const double idf =
          std::log(n_docs / double(entry->document_frequency));
      entries.emplace_back(entry->index, double(mention.count) * idf);
    }
    SparseVector merged(std::move(entries));
    const double norm = merged.l2_norm();
    std::vector<SparseVector::Entry> kept;
    if (norm > 0.0) {
      for (const auto& [idx, w] : merged.entries()) {
        if (w > 0.0) kept.emplace_back(idx, w / norm);
      }
    }
    if (kept.empty()) {
      result.warnings.push_back("document #" + std::to_string(d) +
                                " has no weighted entities");
    }
    result.vectors.emplace_back(std::move(kept));
  }
  return result;
}

namespace {

struct Token {
  std::string word;
  bool sentence_initial = false;
  bool breaks_after = false;  // trailing punctuation ends a run
  bool capitalized = false;
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::istringstream in{std::string(text)};
  std::string raw;
  bool at_sentence_start = true;
  while (in >> raw) {
    std::size_t b = 0, e = raw.size();
    while (b < e && !std::isalnum(static_cast<unsigned char>(raw[b]))) ++b;
    while (e > b && !std::isalnum(static_cast<unsigned char>(raw[e - 1]))) --e;
    Token tok;
    tok.word = raw.substr(b, e - b);
    tok.sentence_initial = at_sentence_start;
    tok.breaks_after = e < raw.size() || tok.word.empty();
    const char last = raw.back();
    at_sentence_start = last == '.' || last == '!' || last == '?';
    tok.capitalized = !tok.word.empty() &&
                      std::isupper(static_cast<unsigned char>(tok.word[0]));
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

}  // namespace

std::vector<EntityMention> fallback_extract_entities(std::string_view text) {
  const auto tokens = tokenize(text);

  // Words seen capitalized away from a sentence start are trusted even when
  // they also open a sentence.
  std::unordered_set<std::string> mid_sentence_caps;
  for (const auto& t : tokens) {
    if (t.capitalized && !t.sentence_initial) mid_sentence_caps.insert(t.word);
  }

  std::vector<EntityMention> out;
  std::unordered_map<std::string, std::size_t> position;
  auto emit = [&](std::vector<std::string>& run) {
    if (run.empty()) return;
    std::string name = run.front();
    for (std::size_t k = 1; k < run.size(); ++k) name += " " + run[k];
    run.clear();
    auto [it, inserted] = position.emplace(name, out.size());
    if (inserted) {
      out.push_back({name, EntityType::kOther, 1});
    } else {
      ++out[it->second].count;
    }
  };

  std::vector<std::string> run;
  for (const auto& t : tokens) {
    if (t.sentence_initial) emit(run);
    if (t.capitalized) {
      const bool drop = t.sentence_initial && !mid_sentence_caps.count(t.word);
      if (!drop) run.push_back(t.word);
    } else {
      emit(run);
    }
    if (t.breaks_after) emit(run);
  }
  emit(run);
  return out;
}

Corpus build_corpus(std::vector<Document> documents) {
  if (documents.empty()) throw Error("corpus is empty");

  std::unordered_set<std::string> ids;
  for (auto& doc : documents) {
    if (!ids.insert(doc.id).second) {
      throw Error("duplicate document id '" + doc.id + "'");
    }
    // Merge repeated names inside a record.
    std::vector<EntityMention> merged;
    std::unordered_map<std::string, std::size_t> at;
    for (auto& e : doc.entities) {
      if (e.count < 1) {
        throw Error("document '" + doc.id + "': entity '" + e.name +
                    "' has count < 1");
      }
      auto [it, inserted] = at.emplace(e.name, merged.size());
      if (inserted) {
        merged.push_back(std::move(e));
      } else {
        merged[it->second].count += e.count;
      }
    }
    doc.entities = std::move(merged);
  }

  std::stable_sort(documents.begin(), documents.end(),
                   [](const Document& a, const Document& b) {
                     if (a.timestamp != b.timestamp) {
                       return a.timestamp < b.timestamp;
                     }
                     return a.id < b.id;
                   });

  Corpus corpus;
  corpus.vocabulary = EntityVocabulary::build(documents);
  RawCounts counts;
  counts.reserve(documents.size());
  for (const auto& doc : documents) counts.push_back(doc.entities);
  auto tfidf = compute_tf_idf(counts, corpus.vocabulary);
  for (std::size_t i = 0; i < documents.size(); ++i) {
    corpus.weighted.push_back({documents[i].id, documents[i].timestamp,
                               std::move(tfidf.vectors[i])});
    if (corpus.weighted.back().weights.empty()) {
      corpus.warnings.push_back("document '" + documents[i].id +
                                "' has no weighted entities");
    }
  }
  corpus.documents = std::move(documents);
  return corpus;
}

namespace {

Document parse_record(const json& rec, std::size_t line) {
  auto fail = [line](const std::string& msg) -> ParseError {
    return ParseError(line, msg);
  };
  if (!rec.is_object()) throw fail("record is not a JSON object");
  Document doc;
  if (!rec.contains("id") || !rec["id"].is_string()) {
    throw fail("missing or non-string \"id\"");
  }
  doc.id = rec["id"].get<std::string>();
  if (!rec.contains("date") || !rec["date"].is_string()) {
    throw fail("document '" + doc.id + "' is missing \"date\"");
  }
  try {
    doc.timestamp = Date::parse(rec["date"].get<std::string>());
  } catch (const ParseError& e) {
    throw fail(e.what());
  }
  if (rec.contains("title")) {
    if (!rec["title"].is_string()) throw fail("\"title\" must be a string");
    doc.title = rec["title"].get<std::string>();
  }
  if (rec.contains("text") && !rec["text"].is_null()) {
    if (!rec["text"].is_string()) throw fail("\"text\" must be a string");
    doc.raw_text = rec["text"].get<std::string>();
  }
  if (rec.contains("entities") && !rec["entities"].is_null()) {
    if (!rec["entities"].is_array()) throw fail("\"entities\" must be a list");
    for (const auto& e : rec["entities"]) {
      if (!e.is_object() || !e.contains("name") || !e["name"].is_string()) {
        throw fail("entity without a string \"name\"");
      }
      EntityMention m;
      m.name = e["name"].get<std::string>();
      if (e.contains("type")) {
        if (!e["type"].is_string()) throw fail("entity type must be a string");
        try {
          m.type = parse_entity_type(e["type"].get<std::string>());
        } catch (const ParseError& err) {
          throw fail(err.what());
        }
      }
      if (e.contains("count")) {
        if (!e["count"].is_number_integer()) {
          throw fail("entity count must be an integer");
        }
        m.count = e["count"].get<int>();
      }
      if (m.count < 1) throw fail("entity '" + m.name + "' has count < 1");
      doc.entities.push_back(std::move(m));
    }
  } else if (doc.raw_text) {
    doc.entities = fallback_extract_entities(*doc.raw_text);
  }
  if (rec.contains("topics") && !rec["topics"].is_null()) {
    if (!rec["topics"].is_array()) throw fail("\"topics\" must be a list");
    for (const auto& p : rec["topics"]) {
      if (!p.is_number()) throw fail("\"topics\" entries must be numbers");
      doc.topics.push_back(p.get<double>());
    }
  }
  return doc;
}

}  // namespace

Corpus parse_corpus_jsonl(std::string_view contents) {
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> seen;
  std::istringstream in{std::string(contents)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed JSON: ") + e.what());
    }
    Document doc = parse_record(rec, line_no);
    auto [it, inserted] = seen.emplace(doc.id, line_no);
    if (!inserted) {
      throw ParseError(line_no, "duplicate document id '" + doc.id +
                                    "' (first seen on line " +
                                    std::to_string(it->second) + ")");
    }
    docs.push_back(std::move(doc));
  }
  if (docs.empty()) throw Error("corpus is empty");
  return build_corpus(std::move(docs));
}

Corpus parse_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open corpus file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_jsonl(buf.str());
}

std::string serialize_corpus_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus.documents) {
    json rec = json::object();
    rec["id"] = doc.id;
    rec["date"] = doc.timestamp.to_string();
    rec["title"] = doc.title;
    if (doc.raw_text) rec["text"] = *doc.raw_text;
    json ents = json::array();
    for (const auto& e : doc.entities) {
      ents.push_back(
          {{"name", e.name}, {"type", to_string(e.type)}, {"count", e.count}});
    }
    rec["entities"] = std::move(ents);
    if (!doc.topics.empty()) rec["topics"] = doc.topics;
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void write_corpus_jsonl(const Corpus& corpus,
                        const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << serialize_corpus_jsonl(corpus);
}

}  // namespace storyline
