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

#include "chronolex/segmenter.hpp"

#include <charconv>
#include <cmath>

#include "chronolex/corpus.hpp"
#include "chronolex/error.hpp"
#include "chronolex/io.hpp"
#include "chronolex/parallel.hpp"
#include "chronolex/utf8.hpp"

namespace chronolex {

namespace {

void check_word(const std::string& word, std::uint64_t frequency) {
  if (word.empty()) throw ValidationError("dictionary word is empty");
  if (frequency == 0) throw ValidationError("dictionary word '" + word + "' has frequency 0");
  for (char32_t cp : utf8::decode(word)) {
    if (!utf8::is_han(cp)) {
      throw ValidationError("dictionary word '" + word + "' contains a non-Han character");
    }
  }
}

// A Han run with the byte offset of each character in the source text
// (offsets.size() == run length + 1).
struct HanRun {
  std::string_view bytes;
  std::vector<std::size_t> offsets;

  std::size_t length() const { return offsets.size() - 1; }
  std::string_view piece(std::size_t i, std::size_t j) const {
    return bytes.substr(offsets[i], offsets[j] - offsets[i]);
  }
};

double score_piece(const SegDictionary& dict, std::string_view piece, bool single_char) {
  const double total = static_cast<double>(std::max<std::uint64_t>(dict.total_frequency(), 1));
  if (auto f = dict.frequency(piece)) return std::log(static_cast<double>(*f) / total);
  if (!single_char) {
    throw ValidationError("'" + std::string(piece) + "' is neither a dictionary word nor one character");
  }
  return std::log(1.0 / total);
}

std::vector<std::vector<std::size_t>> lattice_for(const SegDictionary& dict, const HanRun& run) {
  const std::size_t n = run.length();
  std::vector<std::vector<std::size_t>> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    edges[i].push_back(i + 1);
    const std::size_t limit = std::min(n, i + dict.max_word_length());
    for (std::size_t j = i + 2; j <= limit; ++j) {
      if (dict.frequency(run.piece(i, j))) edges[i].push_back(j);
    }
  }
  return edges;
}

// Right-to-left DP over the lattice. score/count/next[i] describe the best
// segmentation of run[i, n).
void decode_run(const SegDictionary& dict, const HanRun& run, std::vector<std::string>& out) {
  const std::size_t n = run.length();
  const auto edges = lattice_for(dict, run);
  std::vector<double> score(n + 1, 0.0);
  std::vector<std::size_t> count(n + 1, 0);
  std::vector<std::size_t> next(n + 1, n);
  for (std::size_t i = n; i-- > 0;) {
    bool have = false;
    for (std::size_t j : edges[i]) {
      const double s = score_piece(dict, run.piece(i, j), j == i + 1) + score[j];
      const std::size_t c = count[j] + 1;
      const bool better = !have || s > score[i] || (s == score[i] && (c < count[i] || (c == count[i] && j > next[i])));
      if (better) {
        score[i] = s;
        count[i] = c;
        next[i] = j;
        have = true;
      }
    }
  }
  for (std::size_t i = 0; i < n; i = next[i]) out.emplace_back(run.piece(i, next[i]));
}

}  // namespace

SegDictionary SegDictionary::from_entries(
    std::span<const std::pair<std::string, std::uint64_t>> entries) {
  SegDictionary dict;
  for (const auto& [word, f] : entries) {
    check_word(word, f);
    if (dict.freq_.contains(word)) throw ValidationError("duplicate dictionary word '" + word + "'");
    dict.set(word, f);
  }
  return dict;
}

void SegDictionary::set(const std::string& word, std::uint64_t frequency) {
  check_word(word, frequency);
  auto [it, inserted] = freq_.try_emplace(word, frequency);
  if (!inserted) {
    total_ -= it->second;
    it->second = frequency;
  }
  total_ += frequency;
  max_len_ = std::max(max_len_, utf8::length(word));
}

std::optional<std::uint64_t> SegDictionary::frequency(std::string_view word) const {
  auto it = freq_.find(word);
  if (it == freq_.end()) return std::nullopt;
  return it->second;
}

double SegDictionary::word_score(std::u32string_view word) const {
  return score_piece(*this, utf8::encode(word), word.size() == 1);
}

namespace {

std::vector<std::pair<std::string, std::uint64_t>> parse_entries(std::string_view content,
                                                                 std::string_view origin) {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  std::size_t line_no = 0;
  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') continue;
    const auto where = [&] { return std::string(origin) + ":" + std::to_string(line_no) + ": "; };
    const std::size_t tab = line.find('\t');
    if (tab == std::string_view::npos) throw ValidationError(where() + "expected word<TAB>frequency");
    const std::string_view freq_text = trim(line.substr(tab + 1));
    long long f = 0;
    auto [ptr, ec] = std::from_chars(freq_text.data(), freq_text.data() + freq_text.size(), f);
    if (ec != std::errc() || ptr != freq_text.data() + freq_text.size()) {
      throw ValidationError(where() + "frequency '" + std::string(freq_text) + "' is not an integer");
    }
    if (f <= 0) throw ValidationError(where() + "frequency must be positive");
    entries.emplace_back(std::string(trim(line.substr(0, tab))), static_cast<std::uint64_t>(f));
  }
  return entries;
}

}  // namespace

SegDictionary parse_dictionary(std::string_view content, std::string_view origin) {
  try {
    return SegDictionary::from_entries(parse_entries(content, origin));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(origin) + ": " + e.what());
  }
}

SegDictionary load_dictionary(const std::filesystem::path& path) {
  return parse_dictionary(read_file(path), path.string());
}

SegDictionary load_dictionaries(std::span<const std::filesystem::path> paths) {
  SegDictionary merged;
  for (const auto& p : paths) {
    const std::string content = read_file(p);
    // Validates the file on its own first (duplicates within a file are
    // errors), then overrides in file order.
    parse_dictionary(content, p.string());
    for (const auto& [word, f] : parse_entries(content, p.string())) merged.set(word, f);
  }
  return merged;
}

TokenKind token_kind(std::string_view token) {
  if (token.empty()) return TokenKind::kPunct;
  switch (utf8::classify(utf8::decode(token).front())) {
    case utf8::CharClass::kHan: return TokenKind::kWord;
    case utf8::CharClass::kLetter: return TokenKind::kLatin;
    case utf8::CharClass::kDigit: return TokenKind::kDigit;
    case utf8::CharClass::kSpace: return TokenKind::kSpace;
    case utf8::CharClass::kPunct: return TokenKind::kPunct;
  }
  return TokenKind::kPunct;
}

std::vector<std::vector<std::size_t>> build_lattice(const SegDictionary& dict,
                                                    std::u32string_view han_run) {
  const std::string bytes = utf8::encode(han_run);
  HanRun run{bytes, {}};
  std::size_t off = 0;
  for (char32_t cp : han_run) {
    run.offsets.push_back(off);
    std::string tmp;
    utf8::append(tmp, cp);
    off += tmp.size();
  }
  run.offsets.push_back(off);
  return lattice_for(dict, run);
}

std::vector<std::string> segment(const SegDictionary& dict, std::string_view text) {
  std::vector<std::string> out;
  const std::u32string cps = utf8::decode(text);
  // Byte offset of each scalar.
  std::vector<std::size_t> offsets;
  offsets.reserve(cps.size() + 1);
  {
    std::size_t off = 0;
    std::string tmp;
    for (char32_t cp : cps) {
      offsets.push_back(off);
      tmp.clear();
      utf8::append(tmp, cp);
      off += tmp.size();
    }
    offsets.push_back(off);
  }

  std::size_t i = 0;
  while (i < cps.size()) {
    const utf8::CharClass cls = utf8::classify(cps[i]);
    if (cls == utf8::CharClass::kPunct) {
      out.emplace_back(text.substr(offsets[i], offsets[i + 1] - offsets[i]));
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < cps.size() && utf8::classify(cps[j]) == cls) ++j;
    if (cls == utf8::CharClass::kHan) {
      HanRun run{text.substr(offsets[i], offsets[j] - offsets[i]), {}};
      run.offsets.reserve(j - i + 1);
      for (std::size_t k = i; k <= j; ++k) run.offsets.push_back(offsets[k] - offsets[i]);
      decode_run(dict, run, out);
    } else {
      out.emplace_back(text.substr(offsets[i], offsets[j] - offsets[i]));
    }
    i = j;
  }
  return out;
}

double path_score(const SegDictionary& dict, std::span<const std::string> tokens) {
  double acc = 0.0;
  for (auto it = tokens.rbegin(); it != tokens.rend(); ++it) {
    if (token_kind(*it) != TokenKind::kWord) continue;
    acc = score_piece(dict, *it, utf8::length(*it) == 1) + acc;
  }
  return acc;
}

bool is_lexical(std::string_view token, const SegmentOptions& options) {
  switch (token_kind(token)) {
    case TokenKind::kSpace: return false;
    case TokenKind::kPunct: return options.count_punctuation;
    default: return true;
  }
}

void segment_corpus(Corpus& corpus, const SegDictionary& dict, const SegmentOptions& options) {
  if (!corpus.normalized()) throw ValidationError("corpus is not normalized");
  std::vector<std::vector<std::string>> out(corpus.size());
  parallel_chunks(corpus.size(), options.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (auto& tok : segment(dict, *corpus.at(i).normalized)) {
        if (is_lexical(tok, options)) out[i].push_back(std::move(tok));
      }
    }
  });
  for (std::size_t i = 0; i < out.size(); ++i) corpus.set_tokens(i, std::move(out[i]));
}

}  // namespace chronolex
