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

#ifndef CHRONOLEX_EMBEDDING_HPP_
#define CHRONOLEX_EMBEDDING_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace chronolex {

// Words of one time slice with count >= min_count, ordered by descending
// count then word, and the negative-sampling noise distribution.
class Vocab {
 public:
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::string& word(std::size_t i) const { return words_[i]; }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  std::span<const std::string> words() const { return words_; }
  std::span<const std::uint64_t> counts() const { return counts_; }
  // count^alpha / sum(count^alpha).
  std::span<const double> noise() const { return noise_; }
  // Sum of counts of retained words.
  std::uint64_t total() const { return total_; }
  std::optional<std::uint32_t> find(std::string_view word) const;

  // Builds a vocab from explicit (word, count) pairs, sorting them into vocab
  // order. Throws ValidationError on a duplicate word.
  static Vocab from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts, double alpha = 0.75);
  // Same, keeping the given order (for models read back from disk).
  static Vocab from_ordered(std::vector<std::pair<std::string, std::uint64_t>> counts, double alpha = 0.75);

 private:
  static Vocab make(std::vector<std::pair<std::string, std::uint64_t>> counts, double alpha, bool sort);

  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::vector<double> noise_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::uint64_t total_ = 0;
};

using Sentences = std::vector<std::vector<std::string>>;

// Throws ValidationError naming `slice_label` when no word reaches min_count.
Vocab build_vocab(const Sentences& sentences, std::uint64_t min_count, std::string_view slice_label,
                  double alpha = 0.75);

struct SgnsParams {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  std::uint64_t min_count = 10;
  // Frequent-word subsampling threshold; 0 disables subsampling.
  double subsample = 1e-4;
  double alpha = 0.75;
  double learning_rate = 0.025;
  // 1 = deterministic. More workers run lock-free asynchronous updates.
  std::size_t workers = 1;

  nlohmann::json to_json() const;
  static SgnsParams from_json(const nlohmann::json& j);
};

// Row-major |V| x dim matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
};

struct EmbeddingModel {
  std::string slice_label;
  Vocab vocab;
  // Word vectors used downstream.
  Matrix input;
  // Context vectors; only needed for training, not saved.
  Matrix output;
  SgnsParams params;
  std::uint64_t seed = 0;

  std::span<const double> vector(std::string_view word) const;
};

// Loss and gradient of the skip-gram negative-sampling objective for one
// (center, context) pair:
//   loss = -log s(context . center) - sum_i log s(-negative_i . center)
// with s the logistic function.
struct SgnsGradient {
  double loss = 0.0;
  std::vector<double> center;                 // d loss / d center
  std::vector<double> context;                // d loss / d context
  std::vector<std::vector<double>> negatives;  // d loss / d negative_i
};

void sgns_loss_gradient(std::span<const double> center, std::span<const double> context,
                        std::span<const std::span<const double>> negatives, SgnsGradient& out);

double sgns_loss(std::span<const double> center, std::span<const double> context,
                 std::span<const std::span<const double>> negatives);

// Per-slice seed: splitmix64 of the base seed mixed with an FNV-1a hash of
// the label.
std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view slice_label);

// Probability of keeping one occurrence of a word with relative frequency
// `freq` under threshold t: min(1, sqrt(t / freq)); 1 when t is 0.
double keep_probability(double freq, double threshold);

// Trains one slice. Out-of-vocab and subsampled-away tokens are dropped
// before windows are formed, so windows close over the gaps. Throws
// ValidationError on bad params and StageError when the loss stops being
// finite.
EmbeddingModel train(const Sentences& sentences, const Vocab& vocab, const SgnsParams& params,
                     std::uint64_t seed, std::string slice_label);

// Text format: "<vocab_size> <dim>" then "word v1 ... vd" per vocab entry,
// 9 significant digits. Counts are written to a sidecar so that a loaded
// model keeps its vocab order and frequencies: "<path>.vocab" with
// "word<TAB>count" lines.
void save_model(const EmbeddingModel& model, const std::filesystem::path& path);
std::string model_text(const EmbeddingModel& model);
// The "<path>.vocab" sidecar content.
std::string vocab_text(const Vocab& vocab);

// Loads the text format. The sidecar is optional; without it counts are
// taken as zero. Throws ValidationError with the line number on malformed
// input.
EmbeddingModel load_model(const std::filesystem::path& path);
EmbeddingModel parse_model(std::string_view text, std::string_view origin);

}  // namespace chronolex

#endif  // CHRONOLEX_EMBEDDING_HPP_
