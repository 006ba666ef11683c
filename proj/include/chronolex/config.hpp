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


#ifndef CHRONOLEX_CONFIG_HPP_
#define CHRONOLEX_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronolex/align.hpp"
#include "chronolex/corpus.hpp"
#include "chronolex/embedding.hpp"

namespace chronolex {

struct ReportOptions {
  // Defaults: first and last slice.
  std::optional<std::string> drift_from;
  std::optional<std::string> drift_to;
  // Word list restricting the drift ranking.
  std::optional<std::string> drift_filter;
  std::vector<std::string> neighbor_words;
  std::size_t neighbor_k = 10;
  std::vector<std::string> trajectory_words;
  std::size_t context_k = 5;
  // Single-term frequency queries.
  std::vector<std::string> terms;
  std::size_t top_n = 8;
  std::uint64_t rare_threshold = 50;
};

// The whole pipeline in one declarative file. Paths are stored as written
// and resolved against the config file's directory.
struct PipelineConfig {
  std::filesystem::path base_dir;

  std::string manifest;
  double max_reject_fraction = 0.10;
  // Applied in order (composed).
  std::vector<std::string> tables;
  // Later files override earlier frequencies.
  std::vector<std::string> dictionaries;
  bool count_punctuation = false;
  // Category label -> word-list files.
  std::map<std::string, std::vector<std::string>> lexicon;
  std::vector<TimeSlice> slices = default_decades();
  SgnsParams embedding;
  AlignOptions align;
  ReportOptions reports;
  std::uint64_t seed = 42;
  std::size_t workers = 1;
  bool deterministic = true;
  std::string output_dir = "out";

  std::filesystem::path resolve(const std::string& p) const;
  std::filesystem::path output_path() const { return resolve(output_dir); }
  // Determinism forces single-worker training.
  std::size_t training_workers() const { return deterministic ? 1 : workers; }

  // Canonical form: every field present, keys sorted.
  nlohmann::json to_json() const;
  // Throws ValidationError on unknown keys, wrong types and bad values.
  static PipelineConfig from_json(const nlohmann::json& j, std::filesystem::path base_dir);

  // Checks that every referenced input exists and the slices are valid.
  void validate() const;
};

PipelineConfig load_config(const std::filesystem::path& path);
std::string canonical_config(const PipelineConfig& config);

}  // namespace chronolex

#endif  // CHRONOLEX_CONFIG_HPP_
