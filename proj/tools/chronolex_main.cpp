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


// chronolex command-line front end.
//
//   chronolex --config run.json run
//   chronolex --config run.json drift --from 1904-1909 --to 1940-1949
//   chronolex synth --out data/synthetic --seed 42
//
// Exit codes: 0 success, 1 validation error, 2 stage failure, 3 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "chronolex/config.hpp"
#include "chronolex/error.hpp"
#include "chronolex/io.hpp"
#include "chronolex/pipeline.hpp"
#include "chronolex/synth.hpp"

namespace {

using namespace chronolex;

constexpr int kExitValidation = 1;
constexpr int kExitStage = 2;
constexpr int kExitIo = 3;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool deterministic = false;
};

PipelineConfig load(const GlobalFlags& g) {
  if (g.config.empty()) throw ValidationError("--config is required for this command");
  PipelineConfig c = load_config(g.config);
  if (g.seed) c.seed = *g.seed;
  if (g.workers) c.workers = *g.workers;
  if (g.deterministic) c.deterministic = true;
  return c;
}

void report(const StageResult& r) {
  std::printf("%-10s %-8s %7.2fs  %zu output(s)\n", std::string(stage_name(r.stage)).c_str(),
              r.skipped ? "skipped" : "done", r.seconds, r.outputs.size());
}

void print_outputs(const PipelineConfig& c, const StageResult& r) {
  report(r);
  for (const auto& rel : r.outputs) std::printf("  %s\n", (c.output_path() / rel).string().c_str());
}

int run(int argc, char** argv) {
  CLI::App app{"chronolex: diachronic corpus analysis over dated Chinese documents"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "Pipeline config (JSON)");
  app.add_option("--seed", g.seed, "Base seed, overrides the config");
  app.add_option("--workers", g.workers, "Worker threads, overrides the config")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", g.deterministic, "Force single-worker training");

  bool force = false;
  const auto stage_command = [&](Stage stage, const std::string& help) {
    CLI::App* sub = app.add_subcommand(std::string(stage_name(stage)), help);
    sub->add_flag("--force", force, "Rerun even if the stage is up to date");
    return sub;
  };

  stage_command(Stage::kIngest, "Read the corpus manifest and index documents by year");
  stage_command(Stage::kNormalize, "Apply the variant and script mapping tables");
  stage_command(Stage::kSegment, "Segment normalized text into lexical items");
  stage_command(Stage::kCount, "Term, category and appendix frequency reports");
  stage_command(Stage::kTrain, "Train one embedding model per time slice");
  stage_command(Stage::kAlign, "Rotate slice models into a common frame");

  std::optional<std::string> drift_from, drift_to, drift_filter;
  CLI::App* drift = stage_command(Stage::kDrift, "Rank words by cross-slice self-similarity");
  drift->add_option("--from", drift_from, "Earlier slice label");
  drift->add_option("--to", drift_to, "Later slice label");
  drift->add_option("--filter", drift_filter, "Word list restricting the ranking")->check(CLI::ExistingFile);

  std::vector<std::string> neighbor_words;
  std::optional<std::size_t> neighbor_k;
  CLI::App* nb = stage_command(Stage::kNeighbors, "Nearest neighbors of words in every slice");
  nb->add_option("--word", neighbor_words, "Query word (repeatable)");
  nb->add_option("-k", neighbor_k, "Neighbors per slice")->check(CLI::PositiveNumber);

  std::vector<std::string> trajectory_words;
  std::optional<std::size_t> context_k;
  CLI::App* project = stage_command(Stage::kProject, "2-D trajectory plot data for words");
  project->add_option("--word", trajectory_words, "Query word (repeatable)");
  project->add_option("--context-k", context_k, "Neighbors per slice in the point set");

  CLI::App* run_all = app.add_subcommand("run", "Run every stage, skipping those already up to date");
  run_all->add_flag("--force", force, "Rerun every stage");

  std::string synth_out;
  std::string synth_spec;
  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted drift");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--spec", synth_spec, "Synthetic spec (JSON); defaults otherwise")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  if (synth->parsed()) {
    SyntheticSpec spec;
    if (!synth_spec.empty()) {
      try {
        spec = SyntheticSpec::from_json(nlohmann::json::parse(read_file(synth_spec)));
      } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(synth_spec + ": " + e.what());
      }
    }
    if (g.seed) spec.seed = *g.seed;
    write_synthetic(spec, synth_out);
    std::printf("wrote synthetic corpus to %s\n", synth_out.c_str());
    return 0;
  }

  PipelineConfig config = load(g);
  if (drift_from) config.reports.drift_from = drift_from;
  if (drift_to) config.reports.drift_to = drift_to;
  if (drift_filter) config.reports.drift_filter = drift_filter;
  if (!neighbor_words.empty()) config.reports.neighbor_words = neighbor_words;
  if (neighbor_k) config.reports.neighbor_k = *neighbor_k;
  if (!trajectory_words.empty()) config.reports.trajectory_words = trajectory_words;
  if (context_k) config.reports.context_k = *context_k;
  config.validate();

  if (run_all->parsed()) {
    run_pipeline(config, force, report);
    return 0;
  }
  for (Stage s : kStages) {
    if (app.got_subcommand(std::string(stage_name(s)))) print_outputs(config, run_stage(config, s, force));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const StageError& e) {
    std::cerr << "stage failed: " << e.what() << "\n";
    return kExitStage;
  } catch (const std::exception& e) {
    std::cerr << "stage failed: " << e.what() << "\n";
    return kExitStage;
  }
}
