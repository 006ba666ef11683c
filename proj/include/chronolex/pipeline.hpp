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


#ifndef CHRONOLEX_PIPELINE_HPP_
#define CHRONOLEX_PIPELINE_HPP_

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chronolex/align.hpp"
#include "chronolex/config.hpp"

namespace chronolex {

enum class Stage { kIngest, kNormalize, kSegment, kCount, kTrain, kAlign, kDrift, kNeighbors, kProject };

inline constexpr std::array<Stage, 9> kStages = {Stage::kIngest, Stage::kNormalize, Stage::kSegment,
                                                 Stage::kCount,  Stage::kTrain,     Stage::kAlign,
                                                 Stage::kDrift,  Stage::kNeighbors, Stage::kProject};

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

struct StageResult {
  Stage stage;
  // Inputs, parameters and outputs all matched the stage's manifest.
  bool skipped = false;
  // Output paths relative to the output directory.
  std::vector<std::string> outputs;
  double seconds = 0.0;
};

// Runs one stage. Every stage reads its upstream artifacts from the output
// directory, writes its own, and records a manifest at
// manifests/<stage>.json holding SHA-256 hashes of its inputs, parameters
// and outputs. A stage whose manifest still matches is skipped unless
// `force` is set.
//
// Errors keep their type (ValidationError, IoError, StageError) and are
// prefixed with the stage name. A missing upstream artifact is a StageError
// naming the file and the stage that makes it.
StageResult run_stage(const PipelineConfig& config, Stage stage, bool force = false);

// Validates the config, then runs every stage in order. `progress` is called
// after each stage.
std::vector<StageResult> run_pipeline(const PipelineConfig& config, bool force = false,
                                      const std::function<void(const StageResult&)>& progress = {});

// Reads the aligned slices written by the align stage.
AlignedSeries load_aligned(const PipelineConfig& config);

}  // namespace chronolex

#endif  // CHRONOLEX_PIPELINE_HPP_
