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

#include "chronolex/corpus.hpp"

#include <algorithm>

#include "chronolex/error.hpp"
#include "chronolex/io.hpp"
#include "chronolex/normalizer.hpp"
#include "chronolex/parallel.hpp"
#include "chronolex/utf8.hpp"

namespace chronolex {

using nlohmann::json;

std::vector<TimeSlice> default_decades() {
  return {
      {"1904-1909", 1904, 1909}, {"1910-1919", 1910, 1919}, {"1920-1929", 1920, 1929},
      {"1930-1939", 1930, 1939}, {"1940-1949", 1940, 1949},
  };
}

void validate_scheme(std::span<const TimeSlice> scheme) {
  for (std::size_t i = 0; i < scheme.size(); ++i) {
    const TimeSlice& s = scheme[i];
    if (s.label.empty()) throw ValidationError("time slice " + std::to_string(i) + " has no label");
    if (s.label == kUnassigned) throw ValidationError("time slice label '" + s.label + "' is reserved");
    if (s.start_year > s.end_year) {
      throw ValidationError("time slice '" + s.label + "' starts after it ends");
    }
    if (i > 0 && scheme[i - 1].end_year >= s.start_year) {
      throw ValidationError("time slices '" + scheme[i - 1].label + "' and '" + s.label +
                            "' overlap or are out of order");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (scheme[j].label == s.label) throw ValidationError("duplicate time slice label '" + s.label + "'");
    }
  }
}

Corpus::Corpus(int year_min, int year_max) : year_min_(year_min), year_max_(year_max) {
  if (year_min > year_max) throw ValidationError("corpus year_min exceeds year_max");
}

void Corpus::add(Document doc) {
  if (doc.id.empty()) throw ValidationError("document id is empty");
  if (by_id_.contains(doc.id)) throw ValidationError("duplicate document id '" + doc.id + "'");
  if (doc.year < year_min_ || doc.year > year_max_) {
    throw ValidationError("document '" + doc.id + "' year " + std::to_string(doc.year) +
                          " outside " + std::to_string(year_min_) + "-" + std::to_string(year_max_));
  }
  if (trim(doc.text).empty()) throw ValidationError("document '" + doc.id + "' has blank text");
  const std::size_t pos = docs_.size();
  by_id_.emplace(doc.id, pos);
  by_year_[doc.year].push_back(pos);
  docs_.push_back(std::move(doc));
}

const Document* Corpus::find(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  return it == by_id_.end() ? nullptr : &docs_[it->second];
}

bool Corpus::normalized() const {
  return std::all_of(docs_.begin(), docs_.end(), [](const Document& d) { return d.normalized.has_value(); });
}

bool Corpus::segmented() const {
  return std::all_of(docs_.begin(), docs_.end(), [](const Document& d) { return d.tokens.has_value(); });
}

json IngestReport::to_json() const {
  json rejected_json = json::array();
  for (const auto& r : rejected) rejected_json.push_back({{"line", r.line}, {"reason", r.reason}});
  json years = json::object();
  for (const auto& [year, n] : per_year) years[std::to_string(year)] = n;
  return {{"accepted", accepted}, {"rejected", rejected.size()}, {"rejected_lines", rejected_json},
          {"per_year", years}};
}

namespace {

Document parse_document(std::string_view line) {
  json obj = json::parse(line);  // throws json::parse_error
  if (!obj.is_object()) throw ValidationError("line is not a JSON object");
  const auto require = [&](const char* key) -> const json& {
    auto it = obj.find(key);
    if (it == obj.end()) throw ValidationError(std::string("missing key '") + key + "'");
    return *it;
  };
  Document doc;
  const json& id = require("id");
  if (!id.is_string()) throw ValidationError("'id' is not a string");
  doc.id = id.get<std::string>();
  const json& year = require("year");
  if (!year.is_number_integer()) throw ValidationError("'year' is not an integer");
  doc.year = year.get<int>();
  const json& text = require("text");
  if (!text.is_string()) throw ValidationError("'text' is not a string");
  doc.text = text.get<std::string>();
  utf8::length(doc.text);  // validates
  if (auto it = obj.find("title"); it != obj.end() && !it->is_null()) {
    if (!it->is_string()) throw ValidationError("'title' is not a string");
    doc.title = it->get<std::string>();
  }
  if (auto it = obj.find("normalized"); it != obj.end()) {
    if (!it->is_string()) throw ValidationError("'normalized' is not a string");
    doc.normalized = it->get<std::string>();
  }
  if (auto it = obj.find("tokens"); it != obj.end()) {
    if (!it->is_array()) throw ValidationError("'tokens' is not an array");
    std::vector<std::string> tokens;
    tokens.reserve(it->size());
    for (const auto& t : *it) {
      if (!t.is_string()) throw ValidationError("'tokens' holds a non-string");
      tokens.push_back(t.get<std::string>());
    }
    doc.tokens = std::move(tokens);
  }
  return doc;
}

}  // namespace

IngestResult ingest_jsonl(std::string_view content, int year_min, int year_max,
                          const IngestOptions& options) {
  IngestResult result{Corpus(year_min, year_max), {}};
  std::size_t line_no = 0;
  std::size_t considered = 0;
  for (std::string_view line : split_lines(content)) {
    ++line_no;
    if (trim(line).empty()) continue;
    ++considered;
    try {
      result.corpus.add(parse_document(line));
    } catch (const json::exception& e) {
      result.report.rejected.push_back({line_no, std::string("bad JSON: ") + e.what()});
    } catch (const ValidationError& e) {
      result.report.rejected.push_back({line_no, e.what()});
    }
  }
  result.report.accepted = result.corpus.size();
  for (const auto& [year, ids] : result.corpus.year_index()) result.report.per_year[year] = ids.size();

  if (result.corpus.empty()) {
    std::string msg = "empty corpus";
    if (!result.report.rejected.empty()) {
      msg += " (" + std::to_string(result.report.rejected.size()) + " rejected lines)";
    }
    throw ValidationError(msg);
  }
  const double fraction = static_cast<double>(result.report.rejected.size()) / static_cast<double>(considered);
  if (fraction > options.max_reject_fraction) {
    const auto& first = result.report.rejected.front();
    throw ValidationError(std::to_string(result.report.rejected.size()) + " of " +
                          std::to_string(considered) + " lines rejected, above the " +
                          format_double(options.max_reject_fraction * 100.0) +
                          "% threshold; first at line " + std::to_string(first.line) + ": " +
                          first.reason);
  }
  return result;
}

IngestResult ingest(const std::filesystem::path& manifest, const IngestOptions& options) {
  json m;
  try {
    m = json::parse(read_file(manifest));
  } catch (const json::exception& e) {
    throw ValidationError(manifest.string() + ": " + e.what());
  }
  if (!m.is_object() || !m.contains("documents") || !m["documents"].is_string() ||
      !m.contains("year_min") || !m["year_min"].is_number_integer() || !m.contains("year_max") ||
      !m["year_max"].is_number_integer()) {
    throw ValidationError(manifest.string() +
                          ": manifest needs string 'documents' and integer 'year_min', 'year_max'");
  }
  std::filesystem::path docs = m["documents"].get<std::string>();
  if (docs.is_relative()) docs = manifest.parent_path() / docs;
  return ingest_jsonl(read_file(docs), m["year_min"].get<int>(), m["year_max"].get<int>(), options);
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const Document& d : corpus.documents()) {
    json obj = {{"id", d.id}, {"year", d.year}, {"text", d.text}};
    if (d.title) obj["title"] = *d.title;
    if (d.normalized) obj["normalized"] = *d.normalized;
    if (d.tokens) obj["tokens"] = *d.tokens;
    out += obj.dump();
    out += '\n';
  }
  return out;
}

std::map<std::string, std::vector<std::string>> slice(const Corpus& corpus,
                                                      std::span<const TimeSlice> scheme) {
  validate_scheme(scheme);
  std::map<std::string, std::vector<std::string>> buckets;
  for (const auto& s : scheme) buckets[s.label];
  for (const Document& d : corpus.documents()) {
    auto it = std::upper_bound(scheme.begin(), scheme.end(), d.year,
                               [](int year, const TimeSlice& s) { return year < s.start_year; });
    if (it != scheme.begin() && std::prev(it)->contains(d.year)) {
      buckets[std::prev(it)->label].push_back(d.id);
    } else {
      buckets[std::string(kUnassigned)].push_back(d.id);
    }
  }
  return buckets;
}

YearTotals year_totals(const Corpus& corpus, std::size_t workers) {
  if (!corpus.segmented()) throw ValidationError("corpus is not segmented");
  const auto docs = corpus.documents();
  std::vector<YearTotals> partial(std::max<std::size_t>(workers, 1));
  parallel_chunks(docs.size(), workers, [&](std::size_t w, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) partial[w][docs[i].year] += docs[i].tokens->size();
  });
  YearTotals totals;
  for (const auto& p : partial) {
    for (const auto& [year, n] : p) totals[year] += n;
  }
  return totals;
}

void normalize_corpus(Corpus& corpus, const MappingTable& table, std::size_t workers) {
  std::vector<std::string> out(corpus.size());
  parallel_chunks(corpus.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = table.apply(corpus.at(i).text);
  });
  for (std::size_t i = 0; i < out.size(); ++i) corpus.set_normalized(i, std::move(out[i]));
}

}  // namespace chronolex
