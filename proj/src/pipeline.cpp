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


#include "chronolex/pipeline.hpp"

#include <chrono>
#include <map>
#include <set>

#include "chronolex/corpus.hpp"
#include "chronolex/embedding.hpp"
#include "chronolex/error.hpp"
#include "chronolex/hashing.hpp"
#include "chronolex/io.hpp"
#include "chronolex/lexicon.hpp"
#include "chronolex/normalizer.hpp"
#include "chronolex/segmenter.hpp"

namespace chronolex {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kIngest: return "ingest";
    case Stage::kNormalize: return "normalize";
    case Stage::kSegment: return "segment";
    case Stage::kCount: return "count";
    case Stage::kTrain: return "train";
    case Stage::kAlign: return "align";
    case Stage::kDrift: return "drift";
    case Stage::kNeighbors: return "neighbors";
    case Stage::kProject: return "project";
  }
  return "unknown";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : kStages) {
    if (stage_name(s) == name) return s;
  }
  return std::nullopt;
}

namespace {

// Relative output path -> file content.
using Outputs = std::map<std::string, std::string>;

struct Plan {
  std::vector<fs::path> inputs;
  json params;
  std::function<Outputs()> build;
};

constexpr const char* kCorpusDocs = "corpus/documents.jsonl";
constexpr const char* kCorpusMeta = "corpus/meta.json";
constexpr const char* kNormalizedDocs = "normalized/documents.jsonl";
constexpr const char* kSegmentedDocs = "segmented/documents.jsonl";

// Which stage writes an artifact, for "run X first" messages.
std::string_view producer(const std::string& rel) {
  static const std::map<std::string, Stage, std::less<>> by_dir = {
      {"corpus", Stage::kIngest}, {"normalized", Stage::kNormalize}, {"segmented", Stage::kSegment},
      {"models", Stage::kTrain},  {"aligned", Stage::kAlign}};
  auto it = by_dir.find(rel.substr(0, rel.find('/')));
  return it == by_dir.end() ? "an earlier stage" : stage_name(it->second);
}

class Context {
 public:
  explicit Context(const PipelineConfig& c) : config(c), out(c.output_path()) {}

  const PipelineConfig& config;
  fs::path out;

  fs::path artifact(const std::string& rel) const { return out / rel; }

  // Throws StageError naming the producing stage when the artifact is absent.
  fs::path require(const std::string& rel) const {
    const fs::path p = artifact(rel);
    if (!fs::exists(p)) {
      throw StageError("missing " + p.string() + "; run '" + std::string(producer(rel)) + "' first");
    }
    return p;
  }

  std::string read_artifact(const std::string& rel) const { return read_file(require(rel)); }

  Corpus corpus(const std::string& rel) const {
    const json meta = json::parse(read_artifact(kCorpusMeta));
    IngestOptions strict;
    strict.max_reject_fraction = 0.0;
    return ingest_jsonl(read_artifact(rel), meta.at("year_min").get<int>(), meta.at("year_max").get<int>(), strict)
        .corpus;
  }

  MappingTable table() const {
    std::vector<MappingTable> tables;
    for (const auto& t : config.tables) tables.push_back(load_mapping(config.resolve(t)));
    return compose_all(tables);
  }

  SegDictionary dictionary() const {
    std::vector<fs::path> paths;
    for (const auto& d : config.dictionaries) paths.push_back(config.resolve(d));
    return load_dictionaries(paths);
  }

  std::vector<fs::path> resolved(const std::vector<std::string>& paths) const {
    std::vector<fs::path> out_paths;
    for (const auto& p : paths) out_paths.push_back(config.resolve(p));
    return out_paths;
  }

  std::vector<std::string> slice_labels() const {
    std::vector<std::string> labels;
    for (const auto& s : config.slices) labels.push_back(s.label);
    return labels;
  }

  SegmentOptions segment_options() const {
    return {.count_punctuation = config.count_punctuation, .workers = config.workers};
  }
};

void append(std::vector<fs::path>& to, const std::vector<fs::path>& from) { to.insert(to.end(), from.begin(), from.end()); }

std::string safe_name(std::string_view word) {
  std::string s(word);
  for (char& c : s) {
    if (c == '/' || c == '\\' || c == ':') c = '_';
  }
  return s;
}

std::string space_text(const VectorSpace& space) {
  std::string out = std::to_string(space.size()) + " " + std::to_string(space.vectors().cols()) + "\n";
  for (std::size_t i = 0; i < space.size(); ++i) {
    out += space.word(i);
    for (double x : space.vector(i)) {
      out += ' ';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

std::string json_text(const json& j) { return j.dump(2) + "\n"; }

Plan plan_ingest(const Context& ctx) {
  const fs::path manifest = ctx.config.resolve(ctx.config.manifest);
  json m;
  try {
    m = json::parse(read_file(manifest));
  } catch (const json::parse_error& e) {
    throw ValidationError(manifest.string() + ": " + e.what());
  }
  if (!m.is_object() || !m.contains("documents") || !m["documents"].is_string()) {
    throw ValidationError(manifest.string() + ": 'documents' path missing");
  }
  fs::path docs = m["documents"].get<std::string>();
  if (docs.is_relative()) docs = manifest.parent_path() / docs;
  Plan p;
  p.inputs = {manifest, docs};
  p.params = {{"max_reject_fraction", ctx.config.max_reject_fraction}};
  p.build = [&ctx, manifest] {
    IngestOptions opts;
    opts.max_reject_fraction = ctx.config.max_reject_fraction;
    const IngestResult r = ingest(manifest, opts);
    return Outputs{
        {kCorpusDocs, to_jsonl(r.corpus)},
        {kCorpusMeta, json_text({{"year_min", r.corpus.year_min()},
                                 {"year_max", r.corpus.year_max()},
                                 {"documents", r.corpus.size()}})},
        {"corpus/ingest_report.json", json_text(r.report.to_json())},
    };
  };
  return p;
}

Plan plan_normalize(const Context& ctx) {
  Plan p;
  p.inputs = {ctx.artifact(kCorpusDocs), ctx.artifact(kCorpusMeta)};
  append(p.inputs, ctx.resolved(ctx.config.tables));
  p.params = json::object();
  p.build = [&ctx] {
    Corpus corpus = ctx.corpus(kCorpusDocs);
    normalize_corpus(corpus, ctx.table(), ctx.config.workers);
    return Outputs{{kNormalizedDocs, to_jsonl(corpus)}};
  };
  return p;
}

Plan plan_segment(const Context& ctx) {
  Plan p;
  p.inputs = {ctx.artifact(kNormalizedDocs), ctx.artifact(kCorpusMeta)};
  append(p.inputs, ctx.resolved(ctx.config.dictionaries));
  p.params = {{"count_punctuation", ctx.config.count_punctuation}};
  p.build = [&ctx] {
    Corpus corpus = ctx.corpus(kNormalizedDocs);
    segment_corpus(corpus, ctx.dictionary(), ctx.segment_options());
    std::string totals = "year,total\n";
    for (const auto& [year, n] : year_totals(corpus, ctx.config.workers)) {
      totals += std::to_string(year) + "," + std::to_string(n) + "\n";
    }
    return Outputs{{kSegmentedDocs, to_jsonl(corpus)}, {"segmented/year_totals.csv", totals}};
  };
  return p;
}

Plan plan_count(const Context& ctx) {
  const auto& c = ctx.config;
  Plan p;
  p.inputs = {ctx.artifact(kSegmentedDocs), ctx.artifact(kCorpusMeta)};
  append(p.inputs, ctx.resolved(c.tables));
  append(p.inputs, ctx.resolved(c.dictionaries));
  json lex = json::object();
  for (const auto& [cat, files] : c.lexicon) {
    append(p.inputs, ctx.resolved(files));
    lex[cat] = files;
  }
  p.params = {{"lexicon", lex},
              {"terms", c.reports.terms},
              {"top_n", c.reports.top_n},
              {"rare_threshold", c.reports.rare_threshold},
              {"count_punctuation", c.count_punctuation}};
  p.build = [&ctx] {
    const auto& c = ctx.config;
    const Corpus corpus = ctx.corpus(kSegmentedDocs);
    const MappingTable table = ctx.table();
    const SegDictionary dict = ctx.dictionary();
    const LexiconForm form{&table, &dict, ctx.segment_options()};
    Outputs out;
    if (!c.reports.terms.empty()) {
      std::vector<TermQuery> queries;
      for (const auto& t : c.reports.terms) queries.push_back(make_query(t, form));
      out["counts/terms.csv"] = series_csv(term_counts(corpus, queries, c.workers));
    }
    if (!c.lexicon.empty()) {
      std::vector<LexiconSource> sources;
      for (const auto& [cat, files] : c.lexicon) {
        for (const auto& f : files) sources.push_back({c.resolve(f), *parse_category(cat)});
      }
      const Lexicon lexicon = load_lexicon(sources, form);
      out["counts/category_series.csv"] = series_csv(category_series(corpus, lexicon, c.workers));
      out["counts/appendix.json"] =
          json_text(appendix_report(corpus, lexicon, c.reports.top_n, c.reports.rare_threshold, c.workers).to_json());
      out["counts/zero_rare.json"] =
          json_text(zero_and_rare_report(corpus, lexicon, c.reports.rare_threshold, c.workers).to_json());
      json sizes = json::object();
      for (Category cat : kCategories) {
        if (lexicon.category_size(cat) > 0) sizes[std::string(1, label(cat))] = lexicon.category_size(cat);
      }
      json dups = json::array();
      for (const auto& d : lexicon.duplicates()) {
        dups.push_back({{"word", d.word}, {"kept", std::string(1, label(d.kept))}, {"dropped", std::string(1, label(d.dropped))}});
      }
      out["counts/lexicon.json"] = json_text({{"entries", lexicon.size()}, {"categories", sizes}, {"duplicates", dups}});
    }
    return out;
  };
  return p;
}

Plan plan_train(const Context& ctx) {
  const auto& c = ctx.config;
  Plan p;
  p.inputs = {ctx.artifact(kSegmentedDocs), ctx.artifact(kCorpusMeta)};
  json slices = json::array();
  for (const auto& s : c.slices) slices.push_back({s.label, s.start_year, s.end_year});
  SgnsParams params = c.embedding;
  params.workers = c.training_workers();
  p.params = {{"slices", slices}, {"embedding", params.to_json()}, {"seed", c.seed}};
  p.build = [&ctx, params] {
    const auto& c = ctx.config;
    const Corpus corpus = ctx.corpus(kSegmentedDocs);
    const auto buckets = slice(corpus, c.slices);
    Outputs out;
    json report = json::array();
    for (const auto& s : c.slices) {
      Sentences sentences;
      std::size_t tokens = 0;
      for (const auto& id : buckets.at(s.label)) {
        sentences.push_back(*corpus.find(id)->tokens);
        tokens += sentences.back().size();
      }
      const Vocab vocab = build_vocab(sentences, params.min_count, s.label, params.alpha);
      const std::uint64_t seed = derive_seed(c.seed, s.label);
      const EmbeddingModel model = train(sentences, vocab, params, seed, s.label);
      const std::string rel = "models/" + safe_name(s.label) + ".txt";
      out[rel] = model_text(model);
      out[rel + ".vocab"] = vocab_text(model.vocab);
      report.push_back({{"slice", s.label},
                        {"documents", sentences.size()},
                        {"tokens", tokens},
                        {"vocab", vocab.size()},
                        {"seed", seed}});
    }
    out["models/train.json"] = json_text(report);
    return out;
  };
  return p;
}

std::vector<fs::path> slice_files(const Context& ctx, const std::string& dir) {
  std::vector<fs::path> files;
  for (const auto& label : ctx.slice_labels()) {
    const fs::path f = ctx.artifact(dir + "/" + safe_name(label) + ".txt");
    files.push_back(f);
    fs::path side = f;
    side += ".vocab";
    files.push_back(side);
  }
  return files;
}

EmbeddingModel load_slice(const Context& ctx, const std::string& dir, const std::string& label) {
  const std::string rel = dir + "/" + safe_name(label) + ".txt";
  EmbeddingModel m = load_model(ctx.require(rel));
  m.slice_label = label;
  return m;
}

Plan plan_align(const Context& ctx) {
  Plan p;
  p.inputs = slice_files(ctx, "models");
  p.params = ctx.config.to_json()["align"];
  p.build = [&ctx] {
    std::vector<EmbeddingModel> models;
    for (const auto& label : ctx.slice_labels()) models.push_back(load_slice(ctx, "models", label));
    const AlignedSeries series = align_series(models, ctx.config.align);
    Outputs out;
    for (std::size_t i = 0; i < series.slices.size(); ++i) {
      const std::string rel = "aligned/" + safe_name(series.slices[i].label()) + ".txt";
      out[rel] = space_text(series.slices[i]);
      out[rel + ".vocab"] = vocab_text(models[i].vocab);
    }
    out["aligned/summary.json"] = json_text(series.summary());
    return out;
  };
  return p;
}

std::pair<std::string, std::string> drift_pair(const PipelineConfig& c) {
  return {c.reports.drift_from.value_or(c.slices.front().label), c.reports.drift_to.value_or(c.slices.back().label)};
}

Plan plan_drift(const Context& ctx) {
  const auto& c = ctx.config;
  Plan p;
  p.inputs = slice_files(ctx, "aligned");
  append(p.inputs, ctx.resolved(c.tables));
  if (c.reports.drift_filter) p.inputs.push_back(c.resolve(*c.reports.drift_filter));
  const auto [from, to] = drift_pair(c);
  p.params = {{"from", from}, {"to", to}, {"filter", c.reports.drift_filter ? json(*c.reports.drift_filter) : json(nullptr)}};
  p.build = [&ctx, from, to] {
    const auto& c = ctx.config;
    const AlignedSeries series = load_aligned(c);
    std::vector<DriftRecord> ranked;
    if (c.reports.drift_filter) {
      const MappingTable table = ctx.table();
      const std::string content = read_file(c.resolve(*c.reports.drift_filter));
      std::vector<std::string> words;
      for (std::string_view line : split_lines(content)) {
        const std::string_view w = trim(line);
        if (!w.empty() && w.front() != '#') words.push_back(table.apply(w));
      }
      ranked = rank_drift(series, from, to, std::span<const std::string>(words), c.workers);
    } else {
      ranked = rank_drift(series, from, to, std::nullopt, c.workers);
    }
    return Outputs{{"reports/drift.csv", drift_csv(ranked)}};
  };
  return p;
}

Plan plan_neighbors(const Context& ctx) {
  const auto& c = ctx.config;
  Plan p;
  p.inputs = slice_files(ctx, "aligned");
  append(p.inputs, ctx.resolved(c.tables));
  p.params = {{"words", c.reports.neighbor_words}, {"k", c.reports.neighbor_k}};
  p.build = [&ctx] {
    const auto& c = ctx.config;
    const AlignedSeries series = load_aligned(c);
    const MappingTable table = ctx.table();
    Outputs out;
    for (const auto& raw : c.reports.neighbor_words) {
      const std::string word = table.apply(raw);
      std::vector<NeighborTable> tables;
      for (const auto& s : series.slices) {
        if (s.find(word)) tables.push_back({s.label(), neighbors(s, word, c.reports.neighbor_k, c.workers)});
      }
      if (tables.empty()) series.slices.back().require(word);  // throws with spelling hints
      out["reports/neighbors_" + safe_name(word) + ".csv"] = neighbors_csv(tables);
    }
    return out;
  };
  return p;
}

Plan plan_project(const Context& ctx) {
  const auto& c = ctx.config;
  Plan p;
  p.inputs = slice_files(ctx, "aligned");
  append(p.inputs, ctx.resolved(c.tables));
  p.params = {{"words", c.reports.trajectory_words}, {"context_k", c.reports.context_k}};
  p.build = [&ctx] {
    const auto& c = ctx.config;
    const AlignedSeries series = load_aligned(c);
    const MappingTable table = ctx.table();
    Outputs out;
    json summary = json::object();
    for (const auto& raw : c.reports.trajectory_words) {
      const std::string word = table.apply(raw);
      const Trajectory t = project_trajectory(series, word, c.reports.context_k);
      out["reports/trajectory_" + safe_name(word) + ".csv"] = trajectory_csv(t);
      summary[word] = {{"points", t.points.size()}, {"variances", t.variances}};
    }
    out["reports/projection.json"] = json_text(summary);
    return out;
  };
  return p;
}

Plan make_plan(const Context& ctx, Stage stage) {
  switch (stage) {
    case Stage::kIngest: return plan_ingest(ctx);
    case Stage::kNormalize: return plan_normalize(ctx);
    case Stage::kSegment: return plan_segment(ctx);
    case Stage::kCount: return plan_count(ctx);
    case Stage::kTrain: return plan_train(ctx);
    case Stage::kAlign: return plan_align(ctx);
    case Stage::kDrift: return plan_drift(ctx);
    case Stage::kNeighbors: return plan_neighbors(ctx);
    case Stage::kProject: return plan_project(ctx);
  }
  throw StageError("unknown stage");
}

fs::path absolute_of(const fs::path& p) { return fs::weakly_canonical(fs::absolute(p.empty() ? fs::path(".") : p)); }

// Manifest key for an input: relative to the output directory when it is an
// artifact, else relative to the config directory. Keeps manifests free of
// machine-specific absolute paths.
std::string input_key(const Context& ctx, const fs::path& p) {
  const fs::path abs = absolute_of(p);
  const fs::path out = absolute_of(ctx.out);
  const fs::path rel = abs.lexically_relative(out);
  if (!rel.empty() && *rel.begin() != "..") return "@out/" + rel.generic_string();
  return abs.lexically_proximate(absolute_of(ctx.config.base_dir)).generic_string();
}

json hash_inputs(const Context& ctx, const std::vector<fs::path>& inputs) {
  json h = json::object();
  for (const auto& p : inputs) {
    const std::string key = input_key(ctx, p);
    if (!fs::exists(p)) {
      if (key.starts_with("@out/")) {
        const std::string rel = key.substr(5);
        throw StageError("missing " + p.string() + "; run '" + std::string(producer(rel)) + "' first");
      }
      throw IoError("input " + p.string() + " does not exist");
    }
    h[key] = sha256_file(p);
  }
  return h;
}

bool up_to_date(const Context& ctx, const fs::path& manifest, const json& inputs, const std::string& params_hash) {
  if (!fs::exists(manifest)) return false;
  json m;
  try {
    m = json::parse(read_file(manifest));
  } catch (const json::exception&) {
    return false;
  }
  if (m.value("inputs", json()) != inputs || m.value("params_sha256", std::string()) != params_hash) return false;
  const auto outputs = m.value("outputs", json::object());
  for (const auto& [rel, hash] : outputs.items()) {
    const fs::path f = ctx.artifact(rel);
    if (!fs::exists(f) || sha256_file(f) != hash.get<std::string>()) return false;
  }
  return true;
}

StageResult run_stage_impl(const PipelineConfig& config, Stage stage, bool force) {
  const auto start = std::chrono::steady_clock::now();
  const Context ctx(config);
  const Plan plan = make_plan(ctx, stage);
  const json inputs = hash_inputs(ctx, plan.inputs);
  const std::string params_hash = sha256_hex(plan.params.dump());
  const fs::path manifest = ctx.artifact("manifests/" + std::string(stage_name(stage)) + ".json");

  StageResult result;
  result.stage = stage;
  if (!force && up_to_date(ctx, manifest, inputs, params_hash)) {
    result.skipped = true;
    for (const auto& [rel, h] : json::parse(read_file(manifest))["outputs"].items()) result.outputs.push_back(rel);
  } else {
    // Outputs a previous run made but this one no longer does.
    std::set<std::string> stale;
    if (fs::exists(manifest)) {
      try {
        for (const auto& [rel, h] : json::parse(read_file(manifest))["outputs"].items()) stale.insert(rel);
      } catch (const json::exception&) {
      }
    }
    const Outputs outputs = plan.build();
    json hashes = json::object();
    for (const auto& [rel, content] : outputs) {
      write_file(ctx.artifact(rel), content);
      hashes[rel] = sha256_hex(content);
      stale.erase(rel);
      result.outputs.push_back(rel);
    }
    for (const auto& rel : stale) fs::remove(ctx.artifact(rel));
    write_file(manifest, json_text({{"stage", stage_name(stage)},
                                    {"inputs", inputs},
                                    {"params", plan.params},
                                    {"params_sha256", params_hash},
                                    {"outputs", hashes}}));
  }
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

StageResult run_stage(const PipelineConfig& config, Stage stage, bool force) {
  const std::string prefix = "stage '" + std::string(stage_name(stage)) + "': ";
  try {
    return run_stage_impl(config, stage, force);
  } catch (const ValidationError& e) {
    throw ValidationError(prefix + e.what());
  } catch (const IoError& e) {
    throw IoError(prefix + e.what());
  } catch (const StageError& e) {
    throw StageError(prefix + e.what());
  } catch (const json::exception& e) {
    throw ValidationError(prefix + e.what());
  } catch (const fs::filesystem_error& e) {
    throw IoError(prefix + e.what());
  } catch (const std::exception& e) {
    throw StageError(prefix + e.what());
  }
}

std::vector<StageResult> run_pipeline(const PipelineConfig& config, bool force,
                                      const std::function<void(const StageResult&)>& progress) {
  config.validate();
  std::vector<StageResult> results;
  for (Stage s : kStages) {
    results.push_back(run_stage(config, s, force));
    if (progress) progress(results.back());
  }
  return results;
}

AlignedSeries load_aligned(const PipelineConfig& config) {
  const Context ctx(config);
  AlignedSeries series;
  for (const auto& label : ctx.slice_labels()) {
    series.slices.push_back(VectorSpace::from_model(load_slice(ctx, "aligned", label)));
  }
  return series;
}

}  // namespace chronolex
