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


#include "chronolex/config.hpp"

#include <set>

#include "chronolex/error.hpp"
#include "chronolex/io.hpp"
#include "chronolex/lexicon.hpp"

namespace chronolex {

using nlohmann::json;

namespace {

// Rejects keys outside `known`; a typo should not silently fall back to a
// default.
void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> known) {
  if (!j.is_object()) throw ValidationError(std::string(where) + " must be a JSON object");
  const std::set<std::string_view> k(known);
  for (const auto& [key, value] : j.items()) {
    if (!k.contains(key)) throw ValidationError("unknown key '" + key + "' in " + std::string(where));
  }
}

template <typename T>
void read(const json& j, const char* key, T& out, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return;
  try {
    out = it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string(where) + "." + key + " has the wrong type");
  }
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out, std::string_view where) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    out.reset();
    return;
  }
  T v;
  read(j, key, v, where);
  out = std::move(v);
}

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json slices_json(const std::vector<TimeSlice>& slices) {
  json out = json::array();
  for (const auto& s : slices) out.push_back({{"label", s.label}, {"start", s.start_year}, {"end", s.end_year}});
  return out;
}

std::vector<TimeSlice> slices_from(const json& j) {
  if (!j.is_array()) throw ValidationError("slices must be an array");
  std::vector<TimeSlice> out;
  for (const auto& s : j) {
    check_keys(s, "slices[]", {"label", "start", "end"});
    TimeSlice t;
    read(s, "label", t.label, "slices[]");
    read(s, "start", t.start_year, "slices[]");
    read(s, "end", t.end_year, "slices[]");
    out.push_back(std::move(t));
  }
  return out;
}

// Training threads come from the top-level workers setting.
json embedding_json(const SgnsParams& p) {
  json j = p.to_json();
  j.erase("workers");
  return j;
}

}  // namespace

std::filesystem::path PipelineConfig::resolve(const std::string& p) const {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base_dir / path;
}

json PipelineConfig::to_json() const {
  json lex = json::object();
  for (const auto& [cat, files] : lexicon) lex[cat] = files;
  return {
      {"corpus", {{"manifest", manifest}, {"max_reject_fraction", max_reject_fraction}}},
      {"normalize", {{"tables", tables}}},
      {"segment", {{"dictionaries", dictionaries}, {"count_punctuation", count_punctuation}}},
      {"lexicon", lex},
      {"slices", slices_json(slices)},
      {"embedding", embedding_json(embedding)},
      {"align",
       {{"anchor_top_n", opt(align.anchor_top_n)},
        {"frame", align.frame == CommonFrame::kLast ? "last" : "first"}}},
      {"reports",
       {{"drift_from", opt(reports.drift_from)},
        {"drift_to", opt(reports.drift_to)},
        {"drift_filter", opt(reports.drift_filter)},
        {"neighbor_words", reports.neighbor_words},
        {"neighbor_k", reports.neighbor_k},
        {"trajectory_words", reports.trajectory_words},
        {"context_k", reports.context_k},
        {"terms", reports.terms},
        {"top_n", reports.top_n},
        {"rare_threshold", reports.rare_threshold}}},
      {"seed", seed},
      {"workers", workers},
      {"deterministic", deterministic},
      {"output_dir", output_dir},
  };
}

PipelineConfig PipelineConfig::from_json(const json& j, std::filesystem::path base_dir) {
  check_keys(j, "config",
             {"corpus", "normalize", "segment", "lexicon", "slices", "embedding", "align", "reports", "seed", "workers",
              "deterministic", "output_dir"});
  PipelineConfig c;
  c.base_dir = std::move(base_dir);

  if (auto it = j.find("corpus"); it != j.end()) {
    check_keys(*it, "corpus", {"manifest", "max_reject_fraction"});
    read(*it, "manifest", c.manifest, "corpus");
    read(*it, "max_reject_fraction", c.max_reject_fraction, "corpus");
  }
  if (auto it = j.find("normalize"); it != j.end()) {
    check_keys(*it, "normalize", {"tables"});
    read(*it, "tables", c.tables, "normalize");
  }
  if (auto it = j.find("segment"); it != j.end()) {
    check_keys(*it, "segment", {"dictionaries", "count_punctuation"});
    read(*it, "dictionaries", c.dictionaries, "segment");
    read(*it, "count_punctuation", c.count_punctuation, "segment");
  }
  if (auto it = j.find("lexicon"); it != j.end()) {
    if (!it->is_object()) throw ValidationError("lexicon must map category labels to files");
    for (const auto& [cat, files] : it->items()) {
      if (!parse_category(cat)) throw ValidationError("unknown lexicon category '" + cat + "'");
      if (files.is_string()) {
        c.lexicon[cat] = {files.get<std::string>()};
      } else {
        read(*it, cat.c_str(), c.lexicon[cat], "lexicon");
      }
    }
  }
  if (auto it = j.find("slices"); it != j.end()) c.slices = slices_from(*it);
  if (auto it = j.find("embedding"); it != j.end()) {
    check_keys(*it, "embedding",
               {"dim", "window", "negatives", "epochs", "min_count", "subsample", "alpha", "learning_rate"});
    try {
      c.embedding = SgnsParams::from_json(*it);
    } catch (const json::exception&) {
      throw ValidationError("embedding has a field of the wrong type");
    }
  }
  if (auto it = j.find("align"); it != j.end()) {
    check_keys(*it, "align", {"anchor_top_n", "frame"});
    read(*it, "anchor_top_n", c.align.anchor_top_n, "align");
    std::string frame = "last";
    read(*it, "frame", frame, "align");
    if (frame == "last") {
      c.align.frame = CommonFrame::kLast;
    } else if (frame == "first") {
      c.align.frame = CommonFrame::kFirst;
    } else {
      throw ValidationError("align.frame must be 'last' or 'first'");
    }
  }
  if (auto it = j.find("reports"); it != j.end()) {
    check_keys(*it, "reports",
               {"drift_from", "drift_to", "drift_filter", "neighbor_words", "neighbor_k", "trajectory_words",
                "context_k", "terms", "top_n", "rare_threshold"});
    auto& r = c.reports;
    read(*it, "drift_from", r.drift_from, "reports");
    read(*it, "drift_to", r.drift_to, "reports");
    read(*it, "drift_filter", r.drift_filter, "reports");
    read(*it, "neighbor_words", r.neighbor_words, "reports");
    read(*it, "neighbor_k", r.neighbor_k, "reports");
    read(*it, "trajectory_words", r.trajectory_words, "reports");
    read(*it, "context_k", r.context_k, "reports");
    read(*it, "terms", r.terms, "reports");
    read(*it, "top_n", r.top_n, "reports");
    read(*it, "rare_threshold", r.rare_threshold, "reports");
  }
  read(j, "seed", c.seed, "config");
  read(j, "workers", c.workers, "config");
  read(j, "deterministic", c.deterministic, "config");
  read(j, "output_dir", c.output_dir, "config");
  return c;
}

void PipelineConfig::validate() const {
  const auto require = [&](const std::string& p, const std::string& what) {
    if (p.empty()) throw ValidationError(what + " path is not set");
    if (!std::filesystem::exists(resolve(p))) {
      throw ValidationError(what + " '" + resolve(p).string() + "' does not exist");
    }
  };
  require(manifest, "corpus manifest");
  for (const auto& t : tables) require(t, "mapping table");
  for (const auto& d : dictionaries) require(d, "dictionary");
  for (const auto& [cat, files] : lexicon) {
    for (const auto& f : files) require(f, "lexicon file (" + cat + ")");
  }
  if (reports.drift_filter) require(*reports.drift_filter, "drift filter");
  if (slices.size() < 2) throw ValidationError("at least two time slices are needed for alignment");
  validate_scheme(slices);
  if (workers < 1) throw ValidationError("workers must be >= 1");
  if (max_reject_fraction < 0.0 || max_reject_fraction > 1.0) {
    throw ValidationError("corpus.max_reject_fraction must be within [0, 1]");
  }
  if (reports.neighbor_k < 1) throw ValidationError("reports.neighbor_k must be >= 1");
  if (output_dir.empty()) throw ValidationError("output_dir is not set");
  const auto known = [&](const std::optional<std::string>& label, const char* what) {
    if (!label) return;
    for (const auto& s : slices) {
      if (s.label == *label) return;
    }
    throw ValidationError(std::string(what) + " '" + *label + "' is not a configured slice");
  };
  known(reports.drift_from, "reports.drift_from");
  known(reports.drift_to, "reports.drift_to");
}

PipelineConfig load_config(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  try {
    return PipelineConfig::from_json(j, path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string canonical_config(const PipelineConfig& config) { return config.to_json().dump(2) + "\n"; }

}  // namespace chronolex
