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

#ifndef CHRONOLEX_SEGMENTER_HPP_
#define CHRONOLEX_SEGMENTER_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chronolex {

// Word -> raw frequency table driving the maximum-probability segmenter.
// Words are strings of Han characters; frequencies are >= 1.
class SegDictionary {
 public:
  SegDictionary() = default;

  // Throws ValidationError on an empty word, zero frequency, a word with a
  // non-Han character, or a duplicate word.
  static SegDictionary from_entries(std::span<const std::pair<std::string, std::uint64_t>> entries);

  // Inserts or overwrites. Used for user-dictionary merging where later files
  // take precedence.
  void set(const std::string& word, std::uint64_t frequency);

  std::optional<std::uint64_t> frequency(std::string_view word) const;
  std::uint64_t total_frequency() const { return total_; }
  std::size_t size() const { return freq_.size(); }
  // Longest entry, in characters; bounds the lattice fan-out.
  std::size_t max_word_length() const { return max_len_; }

  // log(freq / total) for a dictionary word, log(1 / total) for a single
  // character outside the dictionary. An empty dictionary uses total 1.
  double word_score(std::u32string_view word) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, std::uint64_t, Hash, std::equal_to<>> freq_;
  std::uint64_t total_ = 0;
  std::size_t max_len_ = 1;
};

// `word<TAB>frequency` TSV, '#' comments. Duplicates within one file are
// rejected.
SegDictionary load_dictionary(const std::filesystem::path& path);

SegDictionary parse_dictionary(std::string_view content, std::string_view origin);

// Loads several dictionaries; a word repeated in a later file overrides the
// earlier frequency.
SegDictionary load_dictionaries(std::span<const std::filesystem::path> paths);

enum class TokenKind { kWord, kLatin, kDigit, kPunct, kSpace };

TokenKind token_kind(std::string_view token);

// For each character offset i of a Han run, the exclusive end offsets j such
// that run[i, j) is a dictionary word, plus i + 1. Ascending.
std::vector<std::vector<std::size_t>> build_lattice(const SegDictionary& dict,
                                                    std::u32string_view han_run);

// Segments normalized text. Han runs are decoded over the lattice for the
// maximum total word_score; ties go to fewer tokens, then to the longest
// leftmost token. Latin letter runs, digit runs and whitespace runs are each
// one token; every punctuation mark is its own token. Concatenating the
// result reproduces `text` exactly.
std::vector<std::string> segment(const SegDictionary& dict, std::string_view text);

// Sum of word_score over the Han tokens of a segmentation, accumulated right
// to left (the decoder's order, so scores compare bit-exactly).
double path_score(const SegDictionary& dict, std::span<const std::string> tokens);

struct SegmentOptions {
  // Punctuation marks are emitted by segment() but only kept in document
  // token lists (and so in lexical-item totals) when this is set.
  bool count_punctuation = false;
  std::size_t workers = 1;
};

// True when a token produced by segment() counts as a lexical item.
bool is_lexical(std::string_view token, const SegmentOptions& options);

}  // namespace chronolex

#endif  // CHRONOLEX_SEGMENTER_HPP_
