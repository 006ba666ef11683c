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

#ifndef CHRONOLEX_LEXICON_HPP_
#define CHRONOLEX_LEXICON_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "chronolex/corpus.hpp"
#include "chronolex/segmenter.hpp"

namespace chronolex {

class MappingTable;

// Loanword categories. E is unused by the source lists and kept out.
enum class Category : char { A = 'A', B = 'B', C = 'C', D = 'D', F = 'F', G = 'G' };

inline constexpr std::array<Category, 6> kCategories = {Category::A, Category::B, Category::C,
                                                        Category::D, Category::F, Category::G};

std::optional<Category> parse_category(std::string_view label);
inline char label(Category c) { return static_cast<char>(c); }

struct LexiconEntry {
  std::string word;  // normalized form
  Category category;
  // The token sequence the entry occupies in a segmented corpus. A single
  // element unless the segmenter splits the word.
  std::vector<std::string> gram;
};

struct DuplicateEntry {
  std::string word;
  Category kept;
  Category dropped;
};

struct LexiconSource {
  std::filesystem::path path;
  Category category;
};

// How lexicon words are brought into corpus form: the mapping table applied
// to the corpus and, when given, the segmenter used on it.
struct LexiconForm {
  const MappingTable* table = nullptr;
  const SegDictionary* dict = nullptr;
  SegmentOptions segment;
};

class Lexicon {
 public:
  // Words are normalized and pre-segmented per `form`. A word listed under
  // two categories (after normalization) stays in the first and is reported
  // as a duplicate; repeats within one category are dropped silently.
  // Throws ValidationError if no words remain.
  static Lexicon build(std::span<const std::pair<std::string, Category>> words,
                       const LexiconForm& form);

  std::span<const LexiconEntry> entries() const { return entries_; }
  std::span<const DuplicateEntry> duplicates() const { return duplicates_; }
  std::size_t size() const { return entries_.size(); }
  std::size_t category_size(Category c) const;

 private:
  std::vector<LexiconEntry> entries_;
  std::vector<DuplicateEntry> duplicates_;
};

// One word per line, UTF-8; blank lines and '#' comments skipped. Sources
// are read in the given order, which decides duplicate ownership.
Lexicon load_lexicon(std::span<const LexiconSource> sources, const LexiconForm& form);

// A subject counted as a contiguous token sequence.
struct TermQuery {
  std::string subject;
  std::vector<std::string> gram;
};

TermQuery make_query(std::string_view word, const LexiconForm& form);

struct FrequencySeries {
  std::string subject;
  // Every year in the corpus year totals.
  std::map<int, std::uint64_t> counts;
  // count / total for every year whose total is positive.
  std::map<int, double> frequency;

  std::uint64_t total() const;
  // Occurrences per 1,000 lexical items.
  double per_mille(int year) const { return frequency.at(year) * 1000.0; }
};

// Exact token-sequence occurrence counts per year (overlapping matches all
// count). Requires a segmented corpus.
std::vector<std::map<int, std::uint64_t>> count_grams(const Corpus& corpus,
                                                      std::span<const std::vector<std::string>> grams,
                                                      std::size_t workers = 1);

FrequencySeries make_series(std::string subject, const std::map<int, std::uint64_t>& counts,
                            const YearTotals& totals);

// Keyed by subject. Absent words give all-zero series.
std::map<std::string, FrequencySeries> term_counts(const Corpus& corpus,
                                                   std::span<const TermQuery> queries,
                                                   std::size_t workers = 1);

// Per-category sums of member counts, keyed by category label ("A" ...), plus
// "ALL" for the whole lexicon.
std::map<std::string, FrequencySeries> category_series(const Corpus& corpus, const Lexicon& lexicon,
                                                       std::size_t workers = 1);

// Total corpus occurrences of each lexicon entry, in entry order.
std::vector<std::uint64_t> entry_totals(const Corpus& corpus, const Lexicon& lexicon,
                                        std::size_t workers = 1);

struct CategoryRow {
  Category category;
  std::size_t word_count = 0;
  std::uint64_t total = 0;
  // Most frequent words, descending count, ties by word.
  std::vector<std::pair<std::string, std::uint64_t>> top;
  std::size_t zero_count = 0;
  std::size_t rare_count = 0;

  // total / word_count; 0 for an empty category.
  double average() const;
};

struct AppendixReport {
  std::vector<CategoryRow> rows;
  std::uint64_t rare_threshold = 50;

  const CategoryRow* row(Category c) const;
  // average(a) / average(b); nullopt when either row is missing or b's
  // average is zero.
  std::optional<double> per_word_ratio(Category a, Category b) const;
  // total(a) / total(b), same conventions.
  std::optional<double> total_ratio(Category a, Category b) const;

  nlohmann::json to_json() const;
};

AppendixReport appendix_report(const Corpus& corpus, const Lexicon& lexicon, std::size_t top_n = 8,
                               std::uint64_t rare_threshold = 50, std::size_t workers = 1);

struct ZeroRareReport {
  std::uint64_t threshold = 50;
  std::vector<std::string> zero;  // never occurring, lexicon order
  std::vector<std::string> rare;  // fewer than `threshold` occurrences

  nlohmann::json to_json() const;
};

ZeroRareReport zero_and_rare_report(const Corpus& corpus, const Lexicon& lexicon,
                                    std::uint64_t threshold = 50, std::size_t workers = 1);

// `year,subject,count,frequency,per_mille`, sorted by subject then year. Only
// years with a positive total are written. Frequencies use the shortest
// round-trip decimal form.
std::string series_csv(const std::map<std::string, FrequencySeries>& series);

}  // namespace chronolex

#endif  // CHRONOLEX_LEXICON_HPP_
