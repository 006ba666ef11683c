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

#include "chronolex/lexicon.hpp"

#include <algorithm>
#include <unordered_map>

#include "chronolex/error.hpp"
#include "chronolex/io.hpp"
#include "chronolex/normalizer.hpp"
#include "chronolex/parallel.hpp"

namespace chronolex {

using nlohmann::json;

std::optional<Category> parse_category(std::string_view label) {
  if (label.size() != 1) return std::nullopt;
  for (Category c : kCategories) {
    if (static_cast<char>(c) == label[0]) return c;
  }
  return std::nullopt;
}

TermQuery make_query(std::string_view word, const LexiconForm& form) {
  TermQuery q;
  q.subject = form.table ? form.table->apply(word) : std::string(word);
  if (form.dict) {
    for (auto& tok : segment(*form.dict, q.subject)) {
      if (is_lexical(tok, form.segment)) q.gram.push_back(std::move(tok));
    }
  } else {
    q.gram.push_back(q.subject);
  }
  return q;
}

Lexicon Lexicon::build(std::span<const std::pair<std::string, Category>> words, const LexiconForm& form) {
  Lexicon lex;
  std::unordered_map<std::string, Category> owner;
  for (const auto& [raw, category] : words) {
    TermQuery q = make_query(trim(raw), form);
    if (q.subject.empty() || q.gram.empty()) continue;
    auto [it, inserted] = owner.try_emplace(q.subject, category);
    if (!inserted) {
      if (it->second != category) lex.duplicates_.push_back({q.subject, it->second, category});
      continue;
    }
    lex.entries_.push_back({std::move(q.subject), category, std::move(q.gram)});
  }
  if (lex.entries_.empty()) throw ValidationError("empty lexicon");
  return lex;
}

std::size_t Lexicon::category_size(Category c) const {
  return static_cast<std::size_t>(
      std::count_if(entries_.begin(), entries_.end(), [c](const LexiconEntry& e) { return e.category == c; }));
}

Lexicon load_lexicon(std::span<const LexiconSource> sources, const LexiconForm& form) {
  std::vector<std::pair<std::string, Category>> words;
  for (const auto& src : sources) {
    const std::string content = read_file(src.path);
    for (std::string_view line : split_lines(content)) {
      const std::string_view w = trim(line);
      if (w.empty() || w.front() == '#') continue;
      words.emplace_back(std::string(w), src.category);
    }
  }
  return Lexicon::build(words, form);
}

std::uint64_t FrequencySeries::total() const {
  std::uint64_t t = 0;
  for (const auto& [year, n] : counts) t += n;
  return t;
}

std::vector<std::map<int, std::uint64_t>> count_grams(const Corpus& corpus,
                                                      std::span<const std::vector<std::string>> grams,
                                                      std::size_t workers) {
  if (!corpus.segmented()) throw ValidationError("corpus is not segmented");
  std::unordered_map<std::string_view, std::vector<std::size_t>> by_first;
  for (std::size_t q = 0; q < grams.size(); ++q) {
    if (!grams[q].empty()) by_first[grams[q].front()].push_back(q);
  }

  const auto docs = corpus.documents();
  workers = std::max<std::size_t>(workers, 1);
  // Per-worker counts[query][year]; merged in worker order.
  std::vector<std::vector<std::map<int, std::uint64_t>>> partial(
      workers, std::vector<std::map<int, std::uint64_t>>(grams.size()));
  parallel_chunks(docs.size(), workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    auto& counts = partial[w];
    for (std::size_t d = begin; d < end; ++d) {
      const auto& tokens = *docs[d].tokens;
      for (std::size_t p = 0; p < tokens.size(); ++p) {
        auto it = by_first.find(tokens[p]);
        if (it == by_first.end()) continue;
        for (std::size_t q : it->second) {
          const auto& g = grams[q];
          if (p + g.size() > tokens.size()) continue;
          if (std::equal(g.begin() + 1, g.end(), tokens.begin() + static_cast<std::ptrdiff_t>(p) + 1)) {
            ++counts[q][docs[d].year];
          }
        }
      }
    }
  });
  std::vector<std::map<int, std::uint64_t>> merged(grams.size());
  for (const auto& part : partial) {
    for (std::size_t q = 0; q < grams.size(); ++q) {
      for (const auto& [year, n] : part[q]) merged[q][year] += n;
    }
  }
  return merged;
}

FrequencySeries make_series(std::string subject, const std::map<int, std::uint64_t>& counts,
                            const YearTotals& totals) {
  FrequencySeries s;
  s.subject = std::move(subject);
  for (const auto& [year, total] : totals) {
    auto it = counts.find(year);
    const std::uint64_t n = it == counts.end() ? 0 : it->second;
    s.counts[year] = n;
    if (total > 0) s.frequency[year] = static_cast<double>(n) / static_cast<double>(total);
  }
  return s;
}

std::map<std::string, FrequencySeries> term_counts(const Corpus& corpus, std::span<const TermQuery> queries,
                                                   std::size_t workers) {
  std::vector<std::vector<std::string>> grams;
  grams.reserve(queries.size());
  for (const auto& q : queries) grams.push_back(q.gram);
  const auto counts = count_grams(corpus, grams, workers);
  const YearTotals totals = year_totals(corpus, workers);
  std::map<std::string, FrequencySeries> out;
  for (std::size_t q = 0; q < queries.size(); ++q) {
    out.emplace(queries[q].subject, make_series(queries[q].subject, counts[q], totals));
  }
  return out;
}

namespace {

std::vector<std::map<int, std::uint64_t>> entry_year_counts(const Corpus& corpus, const Lexicon& lexicon,
                                                            std::size_t workers) {
  std::vector<std::vector<std::string>> grams;
  grams.reserve(lexicon.size());
  for (const auto& e : lexicon.entries()) grams.push_back(e.gram);
  return count_grams(corpus, grams, workers);
}

std::uint64_t sum(const std::map<int, std::uint64_t>& m) {
  std::uint64_t t = 0;
  for (const auto& [year, n] : m) t += n;
  return t;
}

}  // namespace

std::map<std::string, FrequencySeries> category_series(const Corpus& corpus, const Lexicon& lexicon,
                                                       std::size_t workers) {
  const auto counts = entry_year_counts(corpus, lexicon, workers);
  const YearTotals totals = year_totals(corpus, workers);
  std::map<std::string, std::map<int, std::uint64_t>> by_subject;
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    auto& cat = by_subject[std::string(1, label(lexicon.entries()[i].category))];
    auto& all = by_subject["ALL"];
    for (const auto& [year, n] : counts[i]) {
      cat[year] += n;
      all[year] += n;
    }
  }
  for (Category c : kCategories) {
    if (lexicon.category_size(c) > 0) by_subject[std::string(1, label(c))];
  }
  std::map<std::string, FrequencySeries> out;
  for (const auto& [subject, c] : by_subject) out.emplace(subject, make_series(subject, c, totals));
  return out;
}

std::vector<std::uint64_t> entry_totals(const Corpus& corpus, const Lexicon& lexicon, std::size_t workers) {
  const auto counts = entry_year_counts(corpus, lexicon, workers);
  std::vector<std::uint64_t> totals;
  totals.reserve(counts.size());
  for (const auto& c : counts) totals.push_back(sum(c));
  return totals;
}

double CategoryRow::average() const {
  return word_count == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(word_count);
}

const CategoryRow* AppendixReport::row(Category c) const {
  for (const auto& r : rows) {
    if (r.category == c) return &r;
  }
  return nullptr;
}

std::optional<double> AppendixReport::per_word_ratio(Category a, Category b) const {
  const CategoryRow* ra = row(a);
  const CategoryRow* rb = row(b);
  if (!ra || !rb || rb->average() == 0.0) return std::nullopt;
  return ra->average() / rb->average();
}

std::optional<double> AppendixReport::total_ratio(Category a, Category b) const {
  const CategoryRow* ra = row(a);
  const CategoryRow* rb = row(b);
  if (!ra || !rb || rb->total == 0) return std::nullopt;
  return static_cast<double>(ra->total) / static_cast<double>(rb->total);
}

json AppendixReport::to_json() const {
  json categories = json::array();
  for (const auto& r : rows) {
    json top = json::array();
    for (const auto& [w, n] : r.top) top.push_back({{"word", w}, {"count", n}});
    categories.push_back({{"category", std::string(1, label(r.category))},
                          {"words", r.word_count},
                          {"total", r.total},
                          {"average", r.average()},
                          {"top", top},
                          {"zero_occurrence", r.zero_count},
                          {"rare", r.rare_count}});
  }
  // Return graphic loans (D) against every other category, both per word and
  // in total.
  json ratios = json::array();
  for (Category b : kCategories) {
    if (b == Category::D || !row(b) || !row(Category::D)) continue;
    const auto pw = per_word_ratio(Category::D, b);
    const auto tot = total_ratio(Category::D, b);
    ratios.push_back({{"numerator", "D"},
                      {"denominator", std::string(1, label(b))},
                      {"per_word_average", pw ? json(*pw) : json(nullptr)},
                      {"total", tot ? json(*tot) : json(nullptr)}});
  }
  return {{"rare_threshold", rare_threshold}, {"categories", categories}, {"ratios", ratios}};
}

AppendixReport appendix_report(const Corpus& corpus, const Lexicon& lexicon, std::size_t top_n,
                               std::uint64_t rare_threshold, std::size_t workers) {
  const auto totals = corpus.empty() ? std::vector<std::uint64_t>(lexicon.size(), 0)
                                     : entry_totals(corpus, lexicon, workers);
  AppendixReport report;
  report.rare_threshold = rare_threshold;
  for (Category c : kCategories) {
    CategoryRow row;
    row.category = c;
    std::vector<std::pair<std::string, std::uint64_t>> words;
    for (std::size_t i = 0; i < lexicon.size(); ++i) {
      const auto& e = lexicon.entries()[i];
      if (e.category != c) continue;
      ++row.word_count;
      row.total += totals[i];
      if (totals[i] == 0) ++row.zero_count;
      if (totals[i] < rare_threshold) ++row.rare_count;
      if (totals[i] > 0) words.emplace_back(e.word, totals[i]);
    }
    if (row.word_count == 0) continue;
    std::sort(words.begin(), words.end(), [](const auto& x, const auto& y) {
      return x.second != y.second ? x.second > y.second : x.first < y.first;
    });
    if (words.size() > top_n) words.resize(top_n);
    row.top = std::move(words);
    report.rows.push_back(std::move(row));
  }
  return report;
}

json ZeroRareReport::to_json() const {
  return {{"threshold", threshold},
          {"zero_count", zero.size()},
          {"rare_count", rare.size()},
          {"zero", zero},
          {"rare", rare}};
}

ZeroRareReport zero_and_rare_report(const Corpus& corpus, const Lexicon& lexicon, std::uint64_t threshold,
                                    std::size_t workers) {
  const auto totals = corpus.empty() ? std::vector<std::uint64_t>(lexicon.size(), 0)
                                     : entry_totals(corpus, lexicon, workers);
  ZeroRareReport report;
  report.threshold = threshold;
  for (std::size_t i = 0; i < lexicon.size(); ++i) {
    const std::string& w = lexicon.entries()[i].word;
    if (totals[i] == 0) report.zero.push_back(w);
    if (totals[i] < threshold) report.rare.push_back(w);
  }
  return report;
}

std::string series_csv(const std::map<std::string, FrequencySeries>& series) {
  std::string out = "year,subject,count,frequency,per_mille\n";
  for (const auto& [subject, s] : series) {
    for (const auto& [year, f] : s.frequency) {
      out += std::to_string(year) + ',' + csv_field(subject) + ',' + std::to_string(s.counts.at(year)) + ',' +
             format_double(f) + ',' + format_double(s.per_mille(year)) + '\n';
    }
  }
  return out;
}

}  // namespace chronolex
