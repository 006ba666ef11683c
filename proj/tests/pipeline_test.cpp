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


#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "chronolex/config.hpp"
#include "chronolex/error.hpp"
#include "chronolex/hashing.hpp"
#include "chronolex/io.hpp"
#include "chronolex/pipeline.hpp"
#include "chronolex/synth.hpp"
#include "oracles.hpp"

using namespace chronolex;

namespace {

// A small corpus and a config that trains quickly.
PipelineConfig small_setup(const oracle::TempDir& dir) {
  SyntheticSpec spec;
  spec.docs_per_slice = 40;
  spec.topics = 3;
  spec.words_per_topic = 10;
  spec.drifts = {{0, 1, 1, 2}};
  write_synthetic(spec, dir.path());
  auto config = load_config(dir / "config.json");
  config.embedding.dim = 10;
  config.embedding.epochs = 2;
  return config;
}

std::map<std::string, std::string> tree_hashes(const std::filesystem::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), dir).string()] = sha256_file(e.path());
  }
  return out;
}

std::vector<std::string> csv_column(const std::filesystem::path& file, std::size_t column) {
  std::vector<std::string> out;
  std::istringstream in(read_file(file));
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string field;
    for (std::size_t c = 0; c <= column; ++c) std::getline(fields, field, ',');
    out.push_back(field);
  }
  return out;
}

}  // namespace

TEST_CASE("a second run skips every stage; a parameter change reruns only downstream") {
  oracle::TempDir dir;
  auto config = small_setup(dir);
  const auto first = run_pipeline(config);
  REQUIRE(first.size() == kStages.size());
  for (const auto& r : first) CHECK_FALSE(r.skipped);
  const auto before = tree_hashes(config.output_path());

  for (const auto& r : run_pipeline(config)) CHECK(r.skipped);
  CHECK(tree_hashes(config.output_path()) == before);

  config.embedding.epochs = 3;
  for (const auto& r : run_pipeline(config)) {
    const bool upstream = r.stage == Stage::kIngest || r.stage == Stage::kNormalize ||
                          r.stage == Stage::kSegment || r.stage == Stage::kCount;
    CHECK(r.skipped == upstream);
  }
  CHECK(run_stage(config, Stage::kIngest, true).skipped == false);
}

TEST_CASE("an edited input invalidates the stage that reads it") {
  oracle::TempDir dir;
  const auto config = small_setup(dir);
  run_pipeline(config);
  std::ofstream(dir / "lexicon" / "D.txt", std::ios::app) << "一丁\n";
  CHECK(run_stage(config, Stage::kCount).skipped == false);
  CHECK(run_stage(config, Stage::kTrain).skipped == true);
}

TEST_CASE("a missing dictionary fails validation before any work") {
  oracle::TempDir dir;
  auto config = small_setup(dir);
  config.dictionaries.push_back("no_such_dictionary.tsv");
  try {
    run_pipeline(config);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("no_such_dictionary.tsv") != std::string::npos);
  }
  CHECK_FALSE(std::filesystem::exists(config.output_path()));
}

TEST_CASE("stages rerun in isolation reproduce their outputs") {
  oracle::TempDir dir;
  const auto config = small_setup(dir);
  run_pipeline(config);
  const auto before = tree_hashes(config.output_path());
  for (const char* sub : {"reports", "aligned", "counts"}) std::filesystem::remove_all(config.output_path() / sub);
  for (Stage s : {Stage::kCount, Stage::kAlign, Stage::kDrift, Stage::kNeighbors, Stage::kProject}) {
    CHECK_FALSE(run_stage(config, s).skipped);
  }
  CHECK(tree_hashes(config.output_path()) == before);
}

TEST_CASE("a stage without its upstream artifact names the producer") {
  oracle::TempDir dir;
  const auto config = small_setup(dir);
  try {
    run_stage(config, Stage::kTrain);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("train") != std::string::npos);
    CHECK(msg.find("segment") != std::string::npos);
  }
}

TEST_CASE("config canonical form round-trips") {
  oracle::TempDir dir;
  const auto config = small_setup(dir);
  const std::string text = canonical_config(config);
  write_file(dir / "copy.json", text);
  const auto again = load_config(dir / "copy.json");
  CHECK(canonical_config(again) == text);

  auto j = nlohmann::json::parse(text);
  j["embedding"]["dimension"] = 3;
  write_file(dir / "typo.json", j.dump());
  CHECK_THROWS_AS(load_config(dir / "typo.json"), ValidationError);
  write_file(dir / "broken.json", "{");
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ValidationError);
}

TEST_CASE("a drift filter restricts the ranking to the listed words") {
  oracle::TempDir dir;
  auto config = small_setup(dir);
  const auto words = synthetic_words(SyntheticSpec::from_json(nlohmann::json::parse(read_file(dir / "planted.json"))["spec"]));
  std::vector<std::string> listed = {words.planted[0]};
  for (std::size_t i = 0; i < 5; ++i) listed.push_back(words.topics[i % 3][i]);
  {
    std::ofstream out(dir / "filter.txt");
    for (const auto& w : listed) out << w << '\n';
  }
  config.reports.drift_filter = "filter.txt";
  run_pipeline(config);
  const auto rows = csv_column(config.output_path() / "reports" / "drift.csv", 0);
  CHECK(rows.size() == 6);
  const auto cosines = csv_column(config.output_path() / "reports" / "drift.csv", 3);
  for (std::size_t i = 1; i < cosines.size(); ++i) CHECK(std::stod(cosines[i - 1]) <= std::stod(cosines[i]));
  CHECK(rows.front() == words.planted[0]);
}
