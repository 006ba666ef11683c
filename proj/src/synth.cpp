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


#include "chronolex/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <initializer_list>
#include <random>
#include <string_view>

#include "chronolex/config.hpp"
#include "chronolex/error.hpp"
#include "chronolex/io.hpp"
#include "chronolex/utf8.hpp"

namespace chronolex {

using nlohmann::json;

namespace {

constexpr char32_t kFirstChar = 0x4E00;
constexpr char32_t kFirstVariant = 0x6000;
// Keeps standard characters below kFirstVariant.
constexpr std::size_t kMaxWords = (kFirstVariant - kFirstChar) / 2;
// Every fourth character has a variant form.
constexpr std::size_t kVariantStride = 4;

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t below(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::size_t word_count(const SyntheticSpec& spec) { return spec.topics * spec.words_per_topic + spec.drifts.size(); }

std::u32string word_chars(std::size_t k) {
  return {static_cast<char32_t>(kFirstChar + 2 * k), static_cast<char32_t>(kFirstChar + 2 * k + 1)};
}

// Offset of a character from kFirstChar.
std::size_t char_index(char32_t c) { return static_cast<std::size_t>(c - kFirstChar); }

bool has_variant(char32_t c) { return char_index(c) % kVariantStride == 0; }

char32_t variant_of(char32_t c) { return kFirstVariant + static_cast<char32_t>(char_index(c)); }

}  // namespace

void SyntheticSpec::validate() const {
  if (slices.size() < 2) throw ValidationError("synthetic spec needs at least two slices");
  validate_scheme(slices);
  if (docs_per_slice == 0 || sentences_per_doc == 0 || sentence_length == 0) {
    throw ValidationError("synthetic spec document sizes must be positive");
  }
  if (topics < 2) throw ValidationError("synthetic spec needs at least two topics");
  if (words_per_topic == 0) throw ValidationError("synthetic spec words_per_topic must be positive");
  if (word_count(*this) > kMaxWords) {
    throw ValidationError("synthetic spec asks for " + std::to_string(word_count(*this)) + " words; at most " +
                          std::to_string(kMaxWords) + " are supported");
  }
  if (variant_rate < 0.0 || variant_rate > 1.0) throw ValidationError("variant_rate must be within [0, 1]");
  for (std::size_t i = 0; i < drifts.size(); ++i) {
    const PlantedDrift& d = drifts[i];
    const std::string which = "planted drift " + std::to_string(i);
    if (d.from_topic >= topics || d.to_topic >= topics) throw ValidationError(which + " names an undeclared topic");
    if (d.from_topic == d.to_topic) throw ValidationError(which + " starts and ends in the same topic");
    if (d.onset == 0 || d.onset >= slices.size()) {
      throw ValidationError(which + " onset " + std::to_string(d.onset) + " must fall within slices 1.." +
                            std::to_string(slices.size() - 1));
    }
    if (d.ramp == 0) throw ValidationError(which + " ramp must be >= 1");
  }
}

json SyntheticSpec::to_json() const {
  json s = json::array();
  for (const auto& t : slices) s.push_back({{"label", t.label}, {"start", t.start_year}, {"end", t.end_year}});
  json d = json::array();
  for (const auto& p : drifts) {
    d.push_back({{"from_topic", p.from_topic}, {"to_topic", p.to_topic}, {"onset", p.onset}, {"ramp", p.ramp}});
  }
  return {{"seed", seed},
          {"slices", s},
          {"docs_per_slice", docs_per_slice},
          {"sentences_per_doc", sentences_per_doc},
          {"sentence_length", sentence_length},
          {"topics", topics},
          {"words_per_topic", words_per_topic},
          {"drifts", d},
          {"variant_rate", variant_rate}};
}

SyntheticSpec SyntheticSpec::from_json(const json& j) {
  SyntheticSpec s;
  const auto only = [](const json& obj, std::initializer_list<std::string_view> keys, const char* where) {
    if (!obj.is_object()) throw ValidationError(std::string("synthetic spec: ") + where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ValidationError(std::string("synthetic spec: unknown key '") + key + "' in " + where);
      }
    }
  };
  only(j, {"seed", "slices", "docs_per_slice", "sentences_per_doc", "sentence_length", "topics", "words_per_topic",
           "drifts", "variant_rate"},
       "spec");
  try {
    s.seed = j.value("seed", s.seed);
    if (j.contains("slices")) {
      s.slices.clear();
      for (const auto& t : j.at("slices")) {
        s.slices.push_back({t.at("label").get<std::string>(), t.at("start").get<int>(), t.at("end").get<int>()});
      }
    }
    s.docs_per_slice = j.value("docs_per_slice", s.docs_per_slice);
    s.sentences_per_doc = j.value("sentences_per_doc", s.sentences_per_doc);
    s.sentence_length = j.value("sentence_length", s.sentence_length);
    s.topics = j.value("topics", s.topics);
    s.words_per_topic = j.value("words_per_topic", s.words_per_topic);
    s.variant_rate = j.value("variant_rate", s.variant_rate);
    if (j.contains("drifts")) {
      for (const auto& p : j.at("drifts")) {
        only(p, {"from_topic", "to_topic", "onset", "ramp"}, "drift");
        PlantedDrift d;
        d.from_topic = p.value("from_topic", d.from_topic);
        d.to_topic = p.value("to_topic", d.to_topic);
        d.onset = p.value("onset", d.onset);
        d.ramp = p.value("ramp", d.ramp);
        s.drifts.push_back(d);
      }
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("synthetic spec: ") + e.what());
  }
  return s;
}

SyntheticWords synthetic_words(const SyntheticSpec& spec) {
  SyntheticWords w;
  std::size_t k = 0;
  w.topics.resize(spec.topics);
  for (auto& topic : w.topics) {
    for (std::size_t i = 0; i < spec.words_per_topic; ++i) topic.push_back(utf8::encode(word_chars(k++)));
  }
  for (std::size_t i = 0; i < spec.drifts.size(); ++i) w.planted.push_back(utf8::encode(word_chars(k++)));
  return w;
}

double drift_share(const PlantedDrift& drift, std::size_t s) {
  if (s < drift.onset) return 0.0;
  return std::min(1.0, static_cast<double>(s - drift.onset + 1) / static_cast<double>(drift.ramp));
}

void write_synthetic(const SyntheticSpec& spec, const std::filesystem::path& dir) {
  spec.validate();
  const SyntheticWords words = synthetic_words(spec);
  std::mt19937_64 rng(spec.seed);

  // A planted word is injected into a sentence of its current topic at the
  // rate a stable word of that topic appears, so frequencies stay comparable.
  const double inject = std::min(1.0, static_cast<double>(spec.sentence_length) /
                                          static_cast<double>(spec.words_per_topic));

  std::string docs;
  std::vector<std::string> sentence;
  for (std::size_t s = 0; s < spec.slices.size(); ++s) {
    const TimeSlice& slice = spec.slices[s];
    for (std::size_t d = 0; d < spec.docs_per_slice; ++d) {
      const std::size_t topic = d % spec.topics;
      const int span = slice.end_year - slice.start_year + 1;
      const int year = slice.start_year + static_cast<int>(below(rng, static_cast<std::size_t>(span)));
      std::u32string text;
      for (std::size_t n = 0; n < spec.sentences_per_doc; ++n) {
        sentence.clear();
        for (std::size_t i = 0; i < spec.sentence_length; ++i) {
          sentence.push_back(words.topics[topic][below(rng, spec.words_per_topic)]);
        }
        for (std::size_t p = 0; p < spec.drifts.size(); ++p) {
          const PlantedDrift& drift = spec.drifts[p];
          const std::size_t home = uniform01(rng) < drift_share(drift, s) ? drift.to_topic : drift.from_topic;
          const bool use = uniform01(rng) < inject;
          const std::size_t pos = below(rng, spec.sentence_length);
          if (home == topic && use) sentence[pos] = words.planted[p];
        }
        for (const auto& w : sentence) {
          for (char32_t c : utf8::decode(w)) {
            text.push_back(has_variant(c) && uniform01(rng) < spec.variant_rate ? variant_of(c) : c);
          }
        }
        text.push_back(U'。');
      }
      char id[64];
      std::snprintf(id, sizeof id, "%s-%04zu", slice.label.c_str(), d);
      docs += json{{"id", id}, {"year", year}, {"text", utf8::encode(text)}}.dump() + "\n";
    }
  }

  write_file(dir / "documents.jsonl", docs);
  write_file(dir / "manifest.json", json{{"documents", "documents.jsonl"},
                                         {"year_min", spec.slices.front().start_year},
                                         {"year_max", spec.slices.back().end_year}}
                                            .dump(2) +
                                        "\n");

  std::string variants = "# variant\tstandard\n";
  std::string dictionary;
  const auto add_word = [&](const std::string& w) {
    dictionary += w + "\t100\n";
    for (char32_t c : utf8::decode(w)) {
      if (has_variant(c)) variants += utf8::encode(std::u32string{variant_of(c)}) + "\t" + utf8::encode(std::u32string{c}) + "\n";
    }
  };
  for (const auto& topic : words.topics) {
    for (const auto& w : topic) add_word(w);
  }
  for (const auto& w : words.planted) add_word(w);
  write_file(dir / "variants.tsv", variants);
  write_file(dir / "dictionary.tsv", dictionary);

  std::string stable;
  for (const auto& topic : words.topics) {
    for (const auto& w : topic) stable += w + "\n";
  }
  write_file(dir / "lexicon" / "A.txt", stable);
  std::string planted_list;
  for (const auto& w : words.planted) planted_list += w + "\n";
  if (!words.planted.empty()) write_file(dir / "lexicon" / "D.txt", planted_list);

  json planted = json::array();
  for (std::size_t p = 0; p < spec.drifts.size(); ++p) {
    planted.push_back({{"word", words.planted[p]},
                       {"from_topic", spec.drifts[p].from_topic},
                       {"to_topic", spec.drifts[p].to_topic},
                       {"onset", spec.drifts[p].onset},
                       {"ramp", spec.drifts[p].ramp}});
  }
  write_file(dir / "planted.json",
             json{{"spec", spec.to_json()}, {"topics", words.topics}, {"planted", planted}}.dump(2) + "\n");

  PipelineConfig config;
  config.manifest = "manifest.json";
  config.tables = {"variants.tsv"};
  config.dictionaries = {"dictionary.tsv"};
  config.lexicon["A"] = {"lexicon/A.txt"};
  if (!words.planted.empty()) config.lexicon["D"] = {"lexicon/D.txt"};
  config.slices = spec.slices;
  // Tiny vocabularies make every word "frequent"; the default subsampling
  // threshold would discard most tokens.
  config.embedding.dim = 50;
  config.embedding.min_count = 5;
  config.embedding.subsample = 0.0;
  config.reports.neighbor_words = words.planted;
  config.reports.neighbor_k = 7;
  config.reports.trajectory_words = words.planted;
  config.reports.terms = {words.topics[0][0], words.topics[1][0]};
  config.reports.terms.insert(config.reports.terms.end(), words.planted.begin(), words.planted.end());
  config.seed = spec.seed;
  config.output_dir = "out";
  write_file(dir / "config.json", canonical_config(config));
}

}  // namespace chronolex
