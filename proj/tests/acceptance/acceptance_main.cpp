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


// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]; exits non-zero if any selected one
// fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "chronolex/align.hpp"
#include "chronolex/config.hpp"
#include "chronolex/embedding.hpp"
#include "chronolex/error.hpp"
#include "chronolex/hashing.hpp"
#include "chronolex/io.hpp"
#include "chronolex/lexicon.hpp"
#include "chronolex/normalizer.hpp"
#include "chronolex/pipeline.hpp"
#include "chronolex/segmenter.hpp"
#include "chronolex/synth.hpp"
#include "chronolex/utf8.hpp"
#include "oracles.hpp"

using namespace chronolex;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

// Collects failures; the first few are kept for the report.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_++ < 3) notes_ += (notes_.empty() ? "" : "; ") + what;
  }
  bool ok() const { return failures_ == 0; }
  Outcome outcome(const std::string& summary) const {
    if (ok()) return {true, summary};
    return {false, std::to_string(failures_) + " failure(s): " + notes_};
  }

 private:
  std::size_t failures_ = 0;
  std::string notes_;
};

std::string fmt(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

SegDictionary make_dict(const oracle::Dict& d) {
  std::vector<std::pair<std::string, std::uint64_t>> entries;
  for (const auto& [w, f] : d) entries.emplace_back(oracle::u8(w), f);
  return SegDictionary::from_entries(entries);
}

std::map<std::string, std::string> tree_hashes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = sha256_file(e.path());
  }
  return out;
}

// Rows of a CSV file with a header, split on commas (no quoting needed here).
std::vector<std::vector<std::string>> read_csv(const fs::path& file) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(file));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream f(line);
    std::string field;
    while (std::getline(f, field, ',')) fields.push_back(field);
    rows.push_back(std::move(fields));
  }
  return rows;
}

// Copies the bundled corpus (without any previous outputs) into `dir`.
void copy_bundled(const fs::path& dir) {
  const fs::path src = CHRONOLEX_DATA_DIR "/synthetic";
  for (const auto& e : fs::recursive_directory_iterator(src)) {
    const auto rel = fs::relative(e.path(), src);
    if (*rel.begin() == "out") continue;
    if (e.is_directory()) {
      fs::create_directories(dir / rel);
    } else {
      fs::create_directories((dir / rel).parent_path());
      fs::copy_file(e.path(), dir / rel);
    }
  }
}

// ---------------------------------------------------------------------------

Outcome segmentation_optimality() {
  std::mt19937_64 rng(101);
  const std::u32string alphabet = U"政府經济学社会主义革命";
  Checker c;
  for (int trial = 0; trial < 500; ++trial) {
    const auto od = oracle::random_dict(rng, alphabet, 50);
    const auto text = oracle::random_text(rng, alphabet, 1 + rng() % 12);
    const auto d = make_dict(od);
    const double got = path_score(d, segment(d, oracle::u8(text)));
    const double want = oracle::best_score(od, text);
    c.expect(got == want, "instance " + std::to_string(trial) + ": " + fmt(got, 17) + " vs " + fmt(want, 17));
  }
  return c.outcome("500 instances equal the exhaustive maximum");
}

Outcome segmentation_losslessness() {
  std::mt19937_64 rng(102);
  const auto table = compose(load_mapping(CHRONOLEX_DATA_DIR "/tables/variants.tsv"),
                             load_mapping(CHRONOLEX_DATA_DIR "/tables/t2s.tsv"));
  const std::u32string pool = U"政府經濟學社會主義革命檢討为 abcXYZ0123，。「」、.!?\t\né７　";
  const auto d = make_dict({{U"政府", 10}, {U"经济", 5}, {U"社会", 3}, {U"主义", 4}, {U"革命", 2}, {U"检讨", 1}});
  Checker c;
  for (int trial = 0; trial < 10000; ++trial) {
    const std::string text = table.apply(oracle::u8(oracle::random_text(rng, pool, rng() % 80)));
    std::string joined;
    for (const auto& t : segment(d, text)) joined += t;
    c.expect(joined == text, "string " + std::to_string(trial));
  }
  return c.outcome("10000 strings reassemble exactly");
}

MappingTable random_table(std::mt19937_64& rng, const std::u32string& alphabet) {
  std::vector<char32_t> letters(alphabet.begin(), alphabet.end());
  std::shuffle(letters.begin(), letters.end(), rng);
  const std::size_t split = 1 + rng() % (letters.size() - 1);
  std::vector<std::pair<char32_t, char32_t>> entries;
  for (std::size_t i = 0; i < split; ++i) {
    if (rng() % 3 == 0) continue;
    entries.emplace_back(letters[i], letters[split + rng() % (letters.size() - split)]);
  }
  return MappingTable::from_entries("random", entries);
}

Outcome normalizer_laws() {
  std::mt19937_64 rng(103);
  const std::u32string alphabet = U"經濟政府學社會经济学会abcXYZ，。 1";
  Checker c;
  std::size_t composed = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto f = random_table(rng, alphabet);
    const auto s = random_table(rng, alphabet);
    const std::string x = oracle::u8(oracle::random_text(rng, alphabet, rng() % 60));
    const std::string fx = f.apply(x);
    c.expect(f.apply(fx) == fx, "idempotence, case " + std::to_string(trial));
    std::optional<MappingTable> fs;
    try {
      fs = compose(f, s);
    } catch (const ValidationError&) {
      continue;  // the composite would not be idempotent, so it is refused
    }
    ++composed;
    c.expect(fs->apply(x) == s.apply(fx), "composition, case " + std::to_string(trial));
    c.expect(fs->apply(fs->apply(x)) == fs->apply(x), "composite idempotence, case " + std::to_string(trial));
  }
  c.expect(composed >= 200, "only " + std::to_string(composed) + " composable pairs");
  return c.outcome("1000 cases, " + std::to_string(composed) + " composed");
}

// Runs ingest through count on a 10,000-token synthetic corpus and checks
// every emitted frequency against the emitted year totals, and every
// category row against member counts taken straight from the tokens.
Outcome frequency_formula() {
  oracle::TempDir dir;
  SyntheticSpec spec;
  spec.docs_per_slice = 20;
  spec.sentences_per_doc = 10;
  spec.sentence_length = 10;
  spec.drifts = {{0, 1, 1, 2}, {2, 3, 2, 2}};
  write_synthetic(spec, dir.path());
  const auto config = load_config(dir / "config.json");
  for (Stage s : {Stage::kIngest, Stage::kNormalize, Stage::kSegment, Stage::kCount}) run_stage(config, s);
  const fs::path out = config.output_path();

  // Independent tallies from the segmented documents.
  std::map<int, std::uint64_t> totals;
  std::map<std::pair<std::string, int>, std::uint64_t> counts;
  std::uint64_t tokens = 0;
  {
    std::istringstream in(read_file(out / "segmented" / "documents.jsonl"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const int year = j.at("year").get<int>();
      for (const auto& t : j.at("tokens")) {
        ++counts[{t.get<std::string>(), year}];
        ++totals[year];
        ++tokens;
      }
    }
  }
  Checker c;
  c.expect(tokens == 10000, "fixture has " + std::to_string(tokens) + " tokens");

  std::map<int, std::uint64_t> emitted_totals;
  for (const auto& row : read_csv(out / "segmented" / "year_totals.csv")) {
    emitted_totals[std::stoi(row.at(0))] = std::stoull(row.at(1));
  }
  c.expect(emitted_totals == totals, "year totals differ from a recount");

  std::size_t rows = 0;
  const auto check_rows = [&](const fs::path& file, std::map<std::string, std::map<int, std::uint64_t>>& by_subject) {
    for (const auto& row : read_csv(file)) {
      ++rows;
      const int year = std::stoi(row.at(0));
      const std::string& subject = row.at(1);
      const std::uint64_t count = std::stoull(row.at(2));
      const double freq = std::stod(row.at(3));
      const std::uint64_t total = totals.at(year);
      const std::string where = file.filename().string() + " " + subject + " " + row.at(0);
      // The emitted value is the correctly rounded quotient, and multiplying
      // back by the total recovers the integer count.
      c.expect(freq == static_cast<double>(count) / static_cast<double>(total), where + ": not count/total");
      c.expect(std::llround(freq * static_cast<double>(total)) == static_cast<long long>(count),
               where + ": frequency x total != count");
      by_subject[subject][year] = count;
    }
  };
  std::map<std::string, std::map<int, std::uint64_t>> terms, categories;
  check_rows(out / "counts" / "terms.csv", terms);
  check_rows(out / "counts" / "category_series.csv", categories);

  for (const auto& [word, series] : terms) {
    for (const auto& [year, n] : series) {
      const auto it = counts.find({word, year});
      c.expect(n == (it == counts.end() ? 0 : it->second), "term " + word + " count differs from a recount");
    }
  }

  // Category rows are sums over their members; ALL is the sum of categories.
  std::map<std::string, std::vector<std::string>> members;
  for (const auto& [cat, files] : config.lexicon) {
    for (const auto& f : files) {
      std::istringstream in(read_file(config.resolve(f)));
      std::string w;
      while (std::getline(in, w)) {
        if (!w.empty()) members[cat].push_back(w);
      }
    }
  }
  for (const auto& [year, total] : totals) {
    std::uint64_t all = 0;
    for (const auto& [cat, words] : members) {
      std::uint64_t sum = 0;
      for (const auto& w : words) {
        const auto it = counts.find({w, year});
        if (it != counts.end()) sum += it->second;
      }
      c.expect(categories[cat][year] == sum, "category " + cat + " in " + std::to_string(year));
      all += categories[cat][year];
    }
    c.expect(categories["ALL"][year] == all, "ALL in " + std::to_string(year));
  }
  return c.outcome(std::to_string(rows) + " rows over " + std::to_string(tokens) + " tokens");
}

Outcome appendix_ratio() {
  AppendixReport report;
  std::map<char, double> printed;
  {
    std::istringstream in(read_file(CHRONOLEX_FIXTURE_DIR "/table1.tsv"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      std::istringstream f(line);
      std::string cat;
      CategoryRow row;
      double average = 0;
      f >> cat >> row.word_count >> row.total >> average;
      row.category = *parse_category(cat);
      printed[cat[0]] = average;
      report.rows.push_back(row);
    }
  }
  Checker c;
  c.expect(report.rows.size() == 6, "fixture rows");
  for (const auto& row : report.rows) {
    const double want = static_cast<double>(row.total) / static_cast<double>(row.word_count);
    c.expect(row.average() == want, std::string(1, label(row.category)) + " average");
  }
  const double ratio = report.per_word_ratio(Category::D, Category::A).value_or(NAN);
  const double from_printed = printed['D'] / printed['A'];
  const auto j = report.to_json();
  double emitted = NAN;
  for (const auto& r : j.at("ratios")) {
    if (r.at("denominator") == "A") emitted = r.at("per_word_average").get<double>();
  }
  c.expect(emitted == ratio, "emitted ratio differs");
  c.expect(std::abs(ratio - 2.944) <= 0.05, "D/A ratio " + fmt(ratio));
  return c.outcome("avg_D/avg_A = " + fmt(ratio, 5) + " (printed averages give " + fmt(from_printed, 5) +
                   "), target 2.944 +/- 0.05");
}

Outcome gradient_check() {
  std::mt19937_64 rng(106);
  const std::size_t d = 5, k = 3;
  const double h = 1e-5;
  double worst = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto v = oracle::gaussian_vector(rng, d, 0.7);
    const auto uc = oracle::gaussian_vector(rng, d, 0.7);
    std::vector<std::vector<double>> un;
    for (std::size_t i = 0; i < k; ++i) un.push_back(oracle::gaussian_vector(rng, d, 0.7));
    std::vector<std::span<const double>> spans(un.begin(), un.end());
    SgnsGradient g;
    sgns_loss_gradient(v, uc, spans, g);
    const auto fd_v = oracle::finite_difference([&](const std::vector<double>& x) { return oracle::sgns_loss(x, uc, un); }, v, h);
    const auto fd_c = oracle::finite_difference([&](const std::vector<double>& x) { return oracle::sgns_loss(v, x, un); }, uc, h);
    worst = std::max({worst, oracle::relative_error(g.center, fd_v), oracle::relative_error(g.context, fd_c)});
    for (std::size_t n = 0; n < k; ++n) {
      const auto fd_n = oracle::finite_difference(
          [&](const std::vector<double>& x) {
            auto copy = un;
            copy[n] = x;
            return oracle::sgns_loss(v, uc, copy);
          },
          un[n], h);
      worst = std::max(worst, oracle::relative_error(g.negatives[n], fd_n));
    }
  }
  Checker c;
  c.expect(worst <= 1e-4, "worst relative error " + fmt(worst));
  return c.outcome("100 points, worst relative error " + fmt(worst, 3));
}

std::vector<std::string> word_list(const std::string& prefix, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

double mean_cosine(const EmbeddingModel& m, const std::vector<std::string>& a, const std::vector<std::string>& b) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& x : a) {
    for (const auto& y : b) {
      if (x == y) continue;
      sum += oracle::cosine(m.vector(x).data(), m.vector(y).data(), m.input.cols);
      ++n;
    }
  }
  return sum / static_cast<double>(n);
}

Outcome topic_clustering() {
  std::mt19937_64 rng(107);
  const auto x = word_list("x", 50), y = word_list("y", 50);
  const auto sentences = oracle::topic_sentences({x, y}, 100000, 10, rng);
  const auto vocab = build_vocab(sentences, 1, "topics");
  SgnsParams p;
  p.dim = 50;
  p.subsample = 0;  // 100 equally frequent words; subsampling would drop most of them
  const auto m = train(sentences, vocab, p, 7, "topics");
  const double within = (mean_cosine(m, x, x) + mean_cosine(m, y, y)) / 2.0;
  const double across = mean_cosine(m, x, y);
  Checker c;
  c.expect(within - across >= 0.3, "gap " + fmt(within - across));
  return c.outcome("within " + fmt(within, 4) + ", across " + fmt(across, 4) + ", gap " + fmt(within - across, 4));
}

Eigen::MatrixXd gaussian(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  return m;
}

Outcome procrustes_checks() {
  std::mt19937_64 rng(108);
  Checker c;
  double worst_orth = 0, worst_cos = 0;
  const auto note = [&](const Eigen::MatrixXd& w) {
    const double e = orthogonality_error(w);
    // Recomputed here rather than trusted.
    const double mine = (w.transpose() * w - Eigen::MatrixXd::Identity(w.cols(), w.cols())).cwiseAbs().maxCoeff();
    worst_orth = std::max({worst_orth, e, mine});
  };
  // (b) planted rotations, several sizes.
  for (int trial = 0; trial < 30; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 49);
    const int n = d + 10 + static_cast<int>(rng() % 100);
    const auto x = gaussian(rng, n, d);
    const auto r = oracle::random_orthogonal(d, rng);
    const Eigen::MatrixXd y = x * r;
    const auto w = procrustes(x, y).rotation;
    note(w);
    const Eigen::MatrixXd mapped = x * w;
    for (int i = 0; i < n; ++i) {
      const Eigen::VectorXd a = mapped.row(i), b = y.row(i);
      worst_cos = std::max(worst_cos, std::abs(oracle::cosine(a.data(), b.data(), static_cast<std::size_t>(d)) - 1.0));
    }
  }
  c.expect(worst_cos <= 1e-6, "planted rotation cosine off by " + fmt(worst_cos));
  // (c) the solution beats random orthogonal candidates.
  std::size_t beaten = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto x = gaussian(rng, 60, 10);
    const auto y = gaussian(rng, 60, 10);
    const auto w = procrustes(x, y).rotation;
    note(w);
    const double best = (x * w - y).norm();
    for (int i = 0; i < 1000; ++i) {
      const auto q = oracle::random_orthogonal(10, rng);
      c.expect(best <= (x * q - y).norm(), "a random candidate did better");
      ++beaten;
    }
  }
  // Degenerate inputs still give orthogonal solutions.
  note(procrustes(gaussian(rng, 3, 10), gaussian(rng, 3, 10)).rotation);
  note(procrustes(Eigen::MatrixXd::Zero(20, 5), gaussian(rng, 20, 5)).rotation);
  c.expect(worst_orth <= 1e-8, "orthogonality error " + fmt(worst_orth));
  return c.outcome("orthogonality " + fmt(worst_orth, 3) + ", planted cosine error " + fmt(worst_cos, 3) + ", " +
                   std::to_string(beaten) + " candidates beaten");
}

// Synthetic corpus with the bundled layout, trained under `seed`.
AlignedSeries drift_run(const fs::path& dir, std::uint64_t seed, SyntheticWords& words) {
  auto spec = SyntheticSpec::from_json(nlohmann::json::parse(read_file(CHRONOLEX_DATA_DIR "/synthetic/spec.json")));
  spec.seed = seed;
  write_synthetic(spec, dir);
  words = synthetic_words(spec);
  auto config = load_config(dir / "config.json");
  config.seed = seed;
  for (Stage s : {Stage::kIngest, Stage::kNormalize, Stage::kSegment, Stage::kTrain, Stage::kAlign}) {
    run_stage(config, s);
  }
  return load_aligned(config);
}

Outcome drift_detection() {
  Checker c;
  std::string margins;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    oracle::TempDir dir;
    SyntheticWords words;
    const auto series = drift_run(dir.path(), seed, words);
    const std::string first = series.slices.front().label(), last = series.slices.back().label();
    const auto ranked = rank_drift(series, first, last);
    const std::set<std::string> planted(words.planted.begin(), words.planted.end());
    std::set<std::string> bottom;
    for (std::size_t i = 0; i < 3 && i < ranked.size(); ++i) bottom.insert(ranked[i].word);
    c.expect(bottom == planted, "seed " + std::to_string(seed) + ": bottom three are not the planted words");
    double max_planted = -2, min_stable = 2;
    std::size_t stable = 0;
    for (const auto& r : ranked) {
      if (planted.count(r.word)) {
        max_planted = std::max(max_planted, r.cosine);
      } else {
        min_stable = std::min(min_stable, r.cosine);
        ++stable;
      }
    }
    c.expect(stable == 100, "seed " + std::to_string(seed) + ": " + std::to_string(stable) + " stable words ranked");
    c.expect(min_stable > max_planted, "seed " + std::to_string(seed) + ": a stable word drifts further than a planted one");
    margins += (margins.empty() ? "" : " ") + fmt(min_stable - max_planted, 3);
  }
  return c.outcome("10/10 seeds; stable-minus-planted margins " + margins);
}

Outcome neighbor_correctness() {
  std::mt19937_64 rng(110);
  Checker c;
  std::size_t queries = 0;
  for (std::size_t n : {2u, 20u, 300u, 1000u}) {
    const int dim = 30;
    const auto v = gaussian(rng, static_cast<int>(n), dim);
    std::vector<std::string> words;
    std::vector<std::vector<double>> vecs;
    for (std::size_t i = 0; i < n; ++i) {
      words.push_back("w" + std::to_string(i));
      vecs.emplace_back(v.row(static_cast<Eigen::Index>(i)).data(), v.row(static_cast<Eigen::Index>(i)).data() + dim);
    }
    // Duplicate a vector so exact ties occur.
    if (n > 2) vecs[1] = vecs[0];
    RowMatrix rows(static_cast<Eigen::Index>(n), dim);
    for (std::size_t i = 0; i < n; ++i) {
      for (int j = 0; j < dim; ++j) rows(static_cast<Eigen::Index>(i), j) = vecs[i][static_cast<std::size_t>(j)];
    }
    const VectorSpace space("s", words, std::vector<std::uint64_t>(n, 1), rows);
    for (std::size_t q = 0; q < n; ++q) {
      for (std::size_t k : {std::size_t{1}, std::size_t{10}, n}) {
        const auto got = neighbors(space, words[q], k);
        const auto want = oracle::brute_neighbors(words, vecs, q, k);
        bool same = got.size() == want.size();
        for (std::size_t i = 0; same && i < got.size(); ++i) {
          same = got[i].word == want[i].first && got[i].cosine == want[i].second;
        }
        c.expect(same, "|V|=" + std::to_string(n) + " query " + words[q] + " k=" + std::to_string(k));
        ++queries;
      }
    }
  }
  return c.outcome(std::to_string(queries) + " queries equal a brute-force scan");
}

struct BundledRuns {
  bool done = false;
  oracle::TempDir a, b;
  double seconds_a = 0, seconds_b = 0;
  std::string error;
};

BundledRuns& bundled_runs() {
  static BundledRuns runs;
  if (runs.done) return runs;
  runs.done = true;
  try {
    for (auto* pair : {&runs.a, &runs.b}) {
      copy_bundled(pair->path());
      const auto config = load_config(pair->path() / "config.json");
      const auto t0 = std::chrono::steady_clock::now();
      run_pipeline(config);
      const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      (pair == &runs.a ? runs.seconds_a : runs.seconds_b) = s;
    }
  } catch (const std::exception& e) {
    runs.error = e.what();
  }
  return runs;
}

Outcome end_to_end_determinism() {
  auto& runs = bundled_runs();
  if (!runs.error.empty()) return {false, runs.error};
  Checker c;
  const auto ha = tree_hashes(runs.a / "out");
  const auto hb = tree_hashes(runs.b / "out");
  c.expect(!ha.empty() && ha == hb, "output trees differ");
  std::size_t reports = 0;
  for (const auto& [rel, h] : ha) reports += rel.rfind("reports", 0) == 0;
  c.expect(reports > 0, "no reports written");
  c.expect(runs.seconds_a < 60 && runs.seconds_b < 60, "a run took over 60 s");
  return c.outcome(std::to_string(ha.size()) + " files identical; runs took " + fmt(runs.seconds_a, 3) + " s and " +
                   fmt(runs.seconds_b, 3) + " s");
}

Outcome trajectory_projection() {
  auto& runs = bundled_runs();
  if (!runs.error.empty()) return {false, runs.error};
  const auto config = load_config(runs.a / "config.json");
  const auto series = load_aligned(config);
  const auto spec =
      SyntheticSpec::from_json(nlohmann::json::parse(read_file(runs.a / "planted.json")).at("spec"));
  const auto words = synthetic_words(spec);
  Checker c;
  std::string trace;
  for (std::size_t p = 0; p < spec.drifts.size(); ++p) {
    const auto& word = words.planted[p];
    const auto& drift = spec.drifts[p];
    const std::set<std::string> dest(words.topics[drift.to_topic].begin(), words.topics[drift.to_topic].end());
    const auto t = project_trajectory(series, word, config.reports.context_k);
    double cx = 0, cy = 0;
    std::size_t members = 0;
    for (const auto& pt : t.points) {
      if (pt.is_query || !dest.count(pt.label)) continue;
      cx += pt.x;
      cy += pt.y;
      ++members;
    }
    c.expect(members > 0, word + ": no destination-topic points in the projection");
    if (members == 0) continue;
    cx /= static_cast<double>(members);
    cy /= static_cast<double>(members);
    // Drift slices run from the last slice before the onset to the end.
    std::vector<double> dist;
    for (const auto& pt : t.points) {
      if (!pt.is_query) continue;
      std::size_t s = 0;
      while (series.slices[s].label() != pt.slice) ++s;
      if (s + 1 >= drift.onset) dist.push_back(std::hypot(pt.x - cx, pt.y - cy));
    }
    c.expect(dist.size() == series.slices.size() - drift.onset + 1, word + ": missing slices");
    for (std::size_t i = 1; i < dist.size(); ++i) c.expect(dist[i] < dist[i - 1], word + ": distance rises");
    std::string seq;
    for (double x : dist) seq += (seq.empty() ? "" : ">") + fmt(x, 3);
    trace += (trace.empty() ? "" : "; ") + seq;
  }

  // Rank-2 point sets keep their pairwise distances.
  std::mt19937_64 rng(112);
  double worst = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 3 + static_cast<int>(rng() % 60), d = 2 + static_cast<int>(rng() % 60);
    const Eigen::MatrixXd coeffs = gaussian(rng, n, 2);
    const Eigen::MatrixXd basis = gaussian(rng, 2, d);
    Eigen::MatrixXd pts = coeffs * basis;
    pts.rowwise() += gaussian(rng, 1, d).row(0);
    const auto proj = project_points(pts);
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const double orig = (pts.row(i) - pts.row(j)).norm();
        const double flat = std::hypot(proj.points[static_cast<std::size_t>(i)].x - proj.points[static_cast<std::size_t>(j)].x,
                                       proj.points[static_cast<std::size_t>(i)].y - proj.points[static_cast<std::size_t>(j)].y);
        worst = std::max(worst, std::abs(orig - flat));
      }
    }
  }
  c.expect(worst <= 1e-8, "rank-2 distortion " + fmt(worst));
  return c.outcome("distances " + trace + "; rank-2 distortion " + fmt(worst, 3));
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0 when untimed
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "segmentation optimality", 5, segmentation_optimality},
      {2, "segmentation losslessness", 5, segmentation_losslessness},
      {3, "normalizer idempotence and composition", 5, normalizer_laws},
      {4, "frequency formula and category additivity", 0, frequency_formula},
      {5, "appendix per-word ratio", 0, appendix_ratio},
      {6, "gradient check", 10, gradient_check},
      {7, "topic clustering", 60, topic_clustering},
      {8, "procrustes", 10, procrustes_checks},
      {9, "drift detection", 180, drift_detection},
      {10, "neighbor correctness", 0, neighbor_correctness},
      {11, "end-to-end determinism", 0, end_to_end_determinism},
      {12, "trajectory projection", 0, trajectory_projection},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& cr : all) {
    if (!selected.empty() && !selected.count(cr.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.limit_seconds > 0 && s >= cr.limit_seconds) {
      o.pass = false;
      o.detail += "; over the " + fmt(cr.limit_seconds) + " s limit";
    }
    std::printf("%s %2d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", cr.id, cr.name, s, o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
