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


#ifndef CHRONOLEX_SYNTH_HPP_
#define CHRONOLEX_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "chronolex/corpus.hpp"

namespace chronolex {

// A word that moves from one topic to another. Its share of `to_topic`
// usage is 0 before `onset`, then rises linearly to 1 over `ramp` slices:
// share(s) = min(1, (s - onset + 1) / ramp) for s >= onset.
struct PlantedDrift {
  std::size_t from_topic = 0;
  std::size_t to_topic = 1;
  std::size_t onset = 1;
  std::size_t ramp = 1;
};

struct SyntheticSpec {
  std::uint64_t seed = 42;
  std::vector<TimeSlice> slices = default_decades();
  std::size_t docs_per_slice = 200;
  std::size_t sentences_per_doc = 10;
  std::size_t sentence_length = 12;
  std::size_t topics = 4;
  std::size_t words_per_topic = 25;
  std::vector<PlantedDrift> drifts;
  // Probability that a character with a variant form is written in it.
  double variant_rate = 0.2;

  // Throws ValidationError on a contradictory spec: onset past the last
  // slice, a drift between the same or undeclared topics, zero sizes.
  void validate() const;

  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& j);
};

struct SyntheticWords {
  // Standard forms, topic by topic.
  std::vector<std::vector<std::string>> topics;
  // One per PlantedDrift, in order.
  std::vector<std::string> planted;
};

// The word inventory a spec generates. Words are two Han characters from
// consecutive code points starting at U+4E00; no character is shared
// between words, so the bundled dictionary segments them exactly.
SyntheticWords synthetic_words(const SyntheticSpec& spec);

// Fraction of a planted word's uses that fall in its destination topic in
// slice `s`.
double drift_share(const PlantedDrift& drift, std::size_t s);

// Writes into `dir`:
//   documents.jsonl, manifest.json     the corpus
//   variants.tsv                       variant -> standard character table
//   dictionary.tsv                     every generated word
//   lexicon/A.txt, lexicon/D.txt       stable words / planted words
//   planted.json                       the spec and the generated words
//   config.json                        a pipeline config over these files
// Every document draws its sentences from one topic; sentences end in "。".
// Identical specs give byte-identical files.
void write_synthetic(const SyntheticSpec& spec, const std::filesystem::path& dir);

}  // namespace chronolex

#endif  // CHRONOLEX_SYNTH_HPP_
