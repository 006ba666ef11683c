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

#include "chronolex/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include "chronolex/error.hpp"
#include "chronolex/io.hpp"

namespace chronolex {

using nlohmann::json;

std::optional<std::uint32_t> Vocab::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocab Vocab::from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts, double alpha) {
  return make(std::move(counts), alpha, true);
}

Vocab Vocab::from_ordered(std::vector<std::pair<std::string, std::uint64_t>> counts, double alpha) {
  return make(std::move(counts), alpha, false);
}

Vocab Vocab::make(std::vector<std::pair<std::string, std::uint64_t>> counts, double alpha, bool sort) {
  if (sort) {
    std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
  }
  Vocab v;
  v.words_.reserve(counts.size());
  v.counts_.reserve(counts.size());
  double z = 0.0;
  for (auto& [w, c] : counts) {
    if (!v.index_.emplace(w, static_cast<std::uint32_t>(v.words_.size())).second) {
      throw ValidationError("duplicate vocabulary word '" + w + "'");
    }
    v.words_.push_back(std::move(w));
    v.counts_.push_back(c);
    v.total_ += c;
    const double p = std::pow(static_cast<double>(c), alpha);
    v.noise_.push_back(p);
    z += p;
  }
  // Counts are all zero only for models loaded without their vocab sidecar.
  for (double& p : v.noise_) p = z > 0.0 ? p / z : 1.0 / static_cast<double>(v.noise_.size());
  return v;
}

Vocab build_vocab(const Sentences& sentences, std::uint64_t min_count, std::string_view slice_label,
                  double alpha) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& s : sentences) {
    for (const auto& w : s) ++counts[w];
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [w, c] : counts) {
    if (c >= min_count) kept.emplace_back(w, c);
  }
  if (kept.empty()) {
    throw ValidationError("slice '" + std::string(slice_label) + "' has no word with count >= " +
                          std::to_string(min_count));
  }
  return Vocab::from_counts(std::move(kept), alpha);
}

json SgnsParams::to_json() const {
  return {{"dim", dim},           {"window", window},
          {"negatives", negatives}, {"epochs", epochs},
          {"min_count", min_count}, {"subsample", subsample},
          {"alpha", alpha},       {"learning_rate", learning_rate},
          {"workers", workers}};
}

SgnsParams SgnsParams::from_json(const json& j) {
  SgnsParams p;
  p.dim = j.value("dim", p.dim);
  p.window = j.value("window", p.window);
  p.negatives = j.value("negatives", p.negatives);
  p.epochs = j.value("epochs", p.epochs);
  p.min_count = j.value("min_count", p.min_count);
  p.subsample = j.value("subsample", p.subsample);
  p.alpha = j.value("alpha", p.alpha);
  p.learning_rate = j.value("learning_rate", p.learning_rate);
  p.workers = j.value("workers", p.workers);
  return p;
}

std::span<const double> EmbeddingModel::vector(std::string_view word) const {
  auto i = vocab.find(word);
  if (!i) throw ValidationError("'" + std::string(word) + "' is not in the vocabulary of slice '" + slice_label + "'");
  return input.row(*i);
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow.
double log_sigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

}  // namespace

void sgns_loss_gradient(std::span<const double> center, std::span<const double> context,
                        std::span<const std::span<const double>> negatives, SgnsGradient& out) {
  const std::size_t d = center.size();
  out.center.assign(d, 0.0);
  out.context.resize(d);
  out.negatives.resize(negatives.size());

  const double pos = dot(context, center);
  out.loss = -log_sigmoid(pos);
  // d/dx [-log s(x)] = s(x) - 1
  const double gpos = sigmoid(pos) - 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    out.center[i] += gpos * context[i];
    out.context[i] = gpos * center[i];
  }
  for (std::size_t n = 0; n < negatives.size(); ++n) {
    const auto neg = negatives[n];
    const double x = dot(neg, center);
    out.loss -= log_sigmoid(-x);
    // d/dx [-log s(-x)] = s(x)
    const double g = sigmoid(x);
    auto& gn = out.negatives[n];
    gn.resize(d);
    for (std::size_t i = 0; i < d; ++i) {
      out.center[i] += g * neg[i];
      gn[i] = g * center[i];
    }
  }
}

double sgns_loss(std::span<const double> center, std::span<const double> context,
                 std::span<const std::span<const double>> negatives) {
  double loss = -log_sigmoid(dot(context, center));
  for (const auto neg : negatives) loss -= log_sigmoid(-dot(neg, center));
  return loss;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// [0, 1) from the top 53 bits.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

class NoiseSampler {
 public:
  explicit NoiseSampler(std::span<const double> probs) {
    cumulative_.reserve(probs.size());
    double acc = 0.0;
    for (double p : probs) cumulative_.push_back(acc += p);
  }
  std::uint32_t draw(std::mt19937_64& rng) const {
    const double u = uniform01(rng) * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

void validate(const SgnsParams& p, const Vocab& vocab) {
  if (vocab.empty()) throw ValidationError("empty vocabulary");
  if (p.dim < 2) throw ValidationError("embedding dim must be >= 2");
  if (p.window < 1) throw ValidationError("window must be >= 1");
  if (p.negatives < 1) throw ValidationError("negatives must be >= 1");
  if (p.epochs < 1) throw ValidationError("epochs must be >= 1");
  if (!(p.learning_rate > 0.0)) throw ValidationError("learning_rate must be positive");
  if (p.subsample < 0.0) throw ValidationError("subsample must be >= 0");
  if (p.workers < 1) throw ValidationError("workers must be >= 1");
}

// Row storage shared by trainer threads. With kShared, element reads and
// writes go through relaxed atomics: lock-free asynchronous SGD where lost
// updates are tolerated but data races are not.
template <bool kShared>
struct Rows {
  Matrix& m;

  void load(std::size_t r, std::vector<double>& out) const {
    auto row = m.row(r);
    out.resize(row.size());
    if constexpr (kShared) {
      for (std::size_t i = 0; i < row.size(); ++i) out[i] = std::atomic_ref<double>(row[i]).load(std::memory_order_relaxed);
    } else {
      std::copy(row.begin(), row.end(), out.begin());
    }
  }
  void add(std::size_t r, double scale, const std::vector<double>& delta) const {
    auto row = m.row(r);
    for (std::size_t i = 0; i < row.size(); ++i) {
      if constexpr (kShared) {
        std::atomic_ref<double> a(row[i]);
        a.store(a.load(std::memory_order_relaxed) + scale * delta[i], std::memory_order_relaxed);
      } else {
        row[i] += scale * delta[i];
      }
    }
  }
};

struct TrainShared {
  const std::vector<std::vector<std::uint32_t>>& encoded;
  const Vocab& vocab;
  const SgnsParams& params;
  const NoiseSampler& sampler;
  std::vector<double> keep;  // per word
  std::uint64_t total_work;
  std::atomic<std::uint64_t> processed{0};
};

template <bool kShared>
void train_range(TrainShared& sh, Matrix& input, Matrix& output, std::size_t begin, std::size_t end,
                 std::mt19937_64& rng, const std::string& slice_label) {
  const SgnsParams& p = sh.params;
  Rows<kShared> in{input};
  Rows<kShared> out{output};
  SgnsGradient grad;
  std::vector<double> center, context;
  std::vector<std::vector<double>> negs(p.negatives);
  std::vector<std::uint32_t> neg_ids;
  std::vector<std::span<const double>> neg_spans;
  std::vector<std::uint32_t> kept;

  for (std::size_t s = begin; s < end; ++s) {
    const auto& sentence = sh.encoded[s];
    kept.clear();
    for (std::uint32_t w : sentence) {
      if (sh.keep[w] >= 1.0 || uniform01(rng) < sh.keep[w]) kept.push_back(w);
    }
    const std::uint64_t before = sh.processed.fetch_add(sentence.size(), std::memory_order_relaxed);
    const double progress = static_cast<double>(before) / static_cast<double>(sh.total_work + 1);
    const double lr = p.learning_rate * std::max(1e-4, 1.0 - progress);

    for (std::size_t pos = 0; pos < kept.size(); ++pos) {
      const std::size_t b = 1 + static_cast<std::size_t>(rng() % p.window);
      const std::size_t lo = pos >= b ? pos - b : 0;
      const std::size_t hi = std::min(kept.size() - 1, pos + b);
      for (std::size_t c = lo; c <= hi; ++c) {
        if (c == pos) continue;
        const std::uint32_t w = kept[pos];
        const std::uint32_t ctx = kept[c];
        neg_ids.clear();
        for (std::size_t k = 0; k < p.negatives; ++k) {
          const std::uint32_t n = sh.sampler.draw(rng);
          if (n != ctx) neg_ids.push_back(n);
        }
        in.load(w, center);
        out.load(ctx, context);
        neg_spans.clear();
        for (std::size_t k = 0; k < neg_ids.size(); ++k) {
          out.load(neg_ids[k], negs[k]);
          neg_spans.emplace_back(negs[k]);
        }
        sgns_loss_gradient(center, context, neg_spans, grad);
        if (!std::isfinite(grad.loss)) {
          throw StageError("slice '" + slice_label + "': non-finite SGNS loss at center '" + sh.vocab.word(w) +
                           "', context '" + sh.vocab.word(ctx) + "' (learning rate " + format_double(lr) +
                           "); lower learning_rate or check the input");
        }
        in.add(w, -lr, grad.center);
        out.add(ctx, -lr, grad.context);
        for (std::size_t k = 0; k < neg_ids.size(); ++k) out.add(neg_ids[k], -lr, grad.negatives[k]);
      }
    }
  }
}

bool all_finite(const Matrix& m) {
  return std::all_of(m.data.begin(), m.data.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view slice_label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : slice_label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return splitmix64(base_seed ^ h);
}

double keep_probability(double freq, double threshold) {
  if (threshold <= 0.0 || freq <= threshold) return 1.0;
  return std::sqrt(threshold / freq);
}

EmbeddingModel train(const Sentences& sentences, const Vocab& vocab, const SgnsParams& params,
                     std::uint64_t seed, std::string slice_label) {
  validate(params, vocab);
  EmbeddingModel model;
  model.slice_label = std::move(slice_label);
  model.vocab = vocab;
  model.params = params;
  model.seed = seed;
  model.input = Matrix(vocab.size(), params.dim);
  model.output = Matrix(vocab.size(), params.dim);

  std::mt19937_64 rng(seed);
  const double half = 0.5 / static_cast<double>(params.dim);
  for (double& x : model.input.data) x = (uniform01(rng) * 2.0 - 1.0) * half;

  std::vector<std::vector<std::uint32_t>> encoded;
  encoded.reserve(sentences.size());
  std::uint64_t tokens = 0;
  for (const auto& s : sentences) {
    std::vector<std::uint32_t> ids;
    ids.reserve(s.size());
    for (const auto& w : s) {
      if (auto i = vocab.find(w)) ids.push_back(*i);
    }
    tokens += ids.size();
    encoded.push_back(std::move(ids));
  }

  const NoiseSampler sampler(vocab.noise());
  TrainShared shared{encoded, vocab, params, sampler, {}, tokens * params.epochs};
  shared.keep.reserve(vocab.size());
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    const double f = static_cast<double>(vocab.count(i)) / static_cast<double>(std::max<std::uint64_t>(vocab.total(), 1));
    shared.keep.push_back(keep_probability(f, params.subsample));
  }

  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    if (params.workers == 1) {
      train_range<false>(shared, model.input, model.output, 0, encoded.size(), rng, model.slice_label);
      continue;
    }
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(params.workers);
    for (std::size_t w = 0; w < params.workers; ++w) {
      const std::size_t begin = encoded.size() * w / params.workers;
      const std::size_t end = encoded.size() * (w + 1) / params.workers;
      threads.emplace_back([&, w, begin, end] {
        std::mt19937_64 local(splitmix64(seed + epoch * params.workers + w + 1));
        try {
          train_range<true>(shared, model.input, model.output, begin, end, local, model.slice_label);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  if (!all_finite(model.input) || !all_finite(model.output)) {
    throw StageError("slice '" + model.slice_label + "': training produced non-finite vectors");
  }
  return model;
}

std::string model_text(const EmbeddingModel& model) {
  std::string out = std::to_string(model.vocab.size()) + " " + std::to_string(model.input.cols) + "\n";
  for (std::size_t i = 0; i < model.vocab.size(); ++i) {
    out += model.vocab.word(i);
    for (double x : model.input.row(i)) {
      out += ' ';
      out += format_double(x, 9);
    }
    out += '\n';
  }
  return out;
}

std::string vocab_text(const Vocab& vocab) {
  std::string out;
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    out += vocab.word(i) + '\t' + std::to_string(vocab.count(i)) + '\n';
  }
  return out;
}

void save_model(const EmbeddingModel& model, const std::filesystem::path& path) {
  write_file(path, model_text(model));
  auto side = path;
  side += ".vocab";
  write_file(side, vocab_text(model.vocab));
}

EmbeddingModel parse_model(std::string_view text, std::string_view origin) {
  const auto lines = split_lines(text);
  const auto fail = [&](std::size_t line_no, const std::string& what) -> ValidationError {
    return ValidationError(std::string(origin) + ":" + std::to_string(line_no) + ": " + what);
  };
  if (lines.empty()) throw fail(1, "missing header");

  std::istringstream header{std::string(lines[0])};
  long long n = -1, d = -1;
  std::string extra;
  if (!(header >> n >> d) || (header >> extra) || n < 0 || d < 1) {
    throw fail(1, "header must be '<vocab_size> <dimension>'");
  }
  const auto rows = static_cast<std::size_t>(n);
  const auto cols = static_cast<std::size_t>(d);
  if (lines.size() - 1 < rows) {
    throw fail(lines.size() + 1, "truncated: header declares " + std::to_string(rows) + " rows, found " +
                                     std::to_string(lines.size() - 1));
  }
  EmbeddingModel model;
  model.input = Matrix(rows, cols);
  std::vector<std::pair<std::string, std::uint64_t>> words;
  words.reserve(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t line_no = r + 2;
    std::string_view line = lines[r + 1];
    std::size_t sp = line.find(' ');
    if (sp == std::string_view::npos || sp == 0) throw fail(line_no, "expected 'word v1 ... vd'");
    words.emplace_back(std::string(line.substr(0, sp)), 0);
    auto row = model.input.row(r);
    std::size_t pos = sp + 1;
    for (std::size_t c = 0; c < cols; ++c) {
      while (pos < line.size() && line[pos] == ' ') ++pos;
      if (pos >= line.size()) throw fail(line_no, "expected " + std::to_string(cols) + " values, found " + std::to_string(c));
      std::size_t endp = line.find(' ', pos);
      if (endp == std::string_view::npos) endp = line.size();
      const std::string_view tok = line.substr(pos, endp - pos);
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
        throw fail(line_no, "non-numeric value '" + std::string(tok) + "'");
      }
      row[c] = v;
      pos = endp;
    }
    if (!trim(line.substr(pos)).empty()) throw fail(line_no, "more than " + std::to_string(cols) + " values");
  }
  for (std::size_t extra_line = rows + 1; extra_line < lines.size(); ++extra_line) {
    if (!trim(lines[extra_line]).empty()) throw fail(extra_line + 1, "rows beyond the declared vocab size");
  }
  try {
    model.vocab = Vocab::from_ordered(std::move(words));
  } catch (const ValidationError& e) {
    throw ValidationError(std::string(origin) + ": " + e.what());
  }
  model.params.dim = cols;
  model.output = Matrix(rows, cols);
  return model;
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  EmbeddingModel model = parse_model(read_file(path), path.string());
  model.slice_label = path.stem().string();
  auto side = path;
  side += ".vocab";
  if (std::filesystem::exists(side)) {
    std::vector<std::pair<std::string, std::uint64_t>> counts;
    std::size_t line_no = 0;
    const std::string content = read_file(side);
    for (std::string_view line : split_lines(content)) {
      ++line_no;
      if (trim(line).empty()) continue;
      const std::size_t tab = line.find('\t');
      std::uint64_t c = 0;
      const std::string_view num = tab == std::string_view::npos ? std::string_view{} : line.substr(tab + 1);
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), c);
      if (tab == std::string_view::npos || ec != std::errc() || ptr != num.data() + num.size()) {
        throw ValidationError(side.string() + ":" + std::to_string(line_no) + ": expected word<TAB>count");
      }
      counts.emplace_back(std::string(line.substr(0, tab)), c);
    }
    if (counts.size() != model.vocab.size()) {
      throw ValidationError(side.string() + ": " + std::to_string(counts.size()) + " entries for a vocab of " +
                            std::to_string(model.vocab.size()));
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
      if (counts[i].first != model.vocab.word(i)) {
        throw ValidationError(side.string() + ":" + std::to_string(i + 1) + ": word '" + counts[i].first +
                              "' does not match model row '" + model.vocab.word(i) + "'");
      }
    }
    model.vocab = Vocab::from_ordered(std::move(counts));
  }
  return model;
}

}  // namespace chronolex
