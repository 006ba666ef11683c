// Copyright 2026 The chronolex Authors.
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

#ifndef CHRONOLEX_CORPUS_HPP_
#define CHRONOLEX_CORPUS_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace chronolex {

class MappingTable;
class SegDictionary;
struct SegmentOptions;

struct Document {
  std::string id;
  int year = 0;
  std::optional<std::string> title;
  std::string text;
  // Set by normalize_corpus.
  std::optional<std::string> normalized;
  // Lexical-item tokens, set by segment_corpus.
  std::optional<std::vector<std::string>> tokens;
};

struct TimeSlice {
  std::string label;
  int start_year = 0;  // inclusive
  int end_year = 0;    // inclusive

  bool contains(int year) const { return start_year <= year && year <= end_year; }
};

// 1904-1909, 1910-1919, 1920-1929, 1930-1939, 1940-1949.
std::vector<TimeSlice> default_decades();

// Throws ValidationError unless every slice has start <= end and the slices
// are sorted ascending and pairwise disjoint.
void validate_scheme(std::span<const TimeSlice> scheme);

inline constexpr std::string_view kUnassigned = "unassigned";

// Total lexical items per year. Years without documents are absent.
using YearTotals = std::map<int, std::uint64_t>;

// An append-only document store with a year index. Documents are kept in
// insertion order; the year index lists document positions per year.
class Corpus {
 public:
  Corpus(int year_min, int year_max);

  // Throws ValidationError on a duplicate id, a year outside the declared
  // range, or text that is blank after trimming.
  void add(Document doc);

  int year_min() const { return year_min_; }
  int year_max() const { return year_max_; }
  std::size_t size() const { return docs_.size(); }
  bool empty() const { return docs_.empty(); }

  std::span<const Document> documents() const { return docs_; }
  const Document& at(std::size_t i) const { return docs_.at(i); }
  const Document* find(std::string_view id) const;
  const std::map<int, std::vector<std::size_t>>& year_index() const { return by_year_; }

  bool normalized() const;
  bool segmented() const;

  // Used by the normalize and segment stages.
  void set_normalized(std::size_t i, std::string text) { docs_.at(i).normalized = std::move(text); }
  void set_tokens(std::size_t i, std::vector<std::string> tokens) {
    docs_.at(i).tokens = std::move(tokens);
  }

 private:
  int year_min_;
  int year_max_;
  std::vector<Document> docs_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::map<int, std::vector<std::size_t>> by_year_;
};

struct RejectedLine {
  std::size_t line = 0;  // 1-based
  std::string reason;
};

struct IngestReport {
  std::size_t accepted = 0;
  std::vector<RejectedLine> rejected;
  std::map<int, std::size_t> per_year;

  nlohmann::json to_json() const;
};

struct IngestOptions {
  // Ingest fails when more than this fraction of non-blank lines is
  // malformed.
  double max_reject_fraction = 0.10;
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

// Reads a manifest {"documents": path, "year_min": int, "year_max": int}.
// A relative documents path resolves against the manifest's directory.
IngestResult ingest(const std::filesystem::path& manifest, const IngestOptions& options = {});

// Parses JSON-lines documents. Lines with bad JSON, missing or mistyped
// keys, blank text, out-of-range years or duplicate ids are rejected and
// reported. Optional `normalized` and `tokens` keys (written by later
// stages) are restored. Throws ValidationError("empty corpus") when nothing
// is accepted and when the reject fraction exceeds the threshold.
IngestResult ingest_jsonl(std::string_view content, int year_min, int year_max,
                          const IngestOptions& options = {});

// Canonical JSON-lines serialization, in corpus order. Includes
// `normalized` and `tokens` when present.
std::string to_jsonl(const Corpus& corpus);

// Assigns every document to the slice containing its year, or to
// kUnassigned. Every slice label is present in the result, possibly empty;
// kUnassigned is present only when non-empty.
std::map<std::string, std::vector<std::string>> slice(const Corpus& corpus,
                                                      std::span<const TimeSlice> scheme);

// Throws ValidationError if the corpus is not segmented.
YearTotals year_totals(const Corpus& corpus, std::size_t workers = 1);

// Applies the table to every document's text.
void normalize_corpus(Corpus& corpus, const MappingTable& table, std::size_t workers = 1);

// Segments every document's normalized text and stores its lexical tokens.
// Throws ValidationError if the corpus is not normalized.
void segment_corpus(Corpus& corpus, const SegDictionary& dict, const SegmentOptions& options);

}  // namespace chronolex

#endif  // CHRONOLEX_CORPUS_HPP_
