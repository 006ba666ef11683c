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

#ifndef CHRONOLEX_ALIGN_HPP_
#define CHRONOLEX_ALIGN_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "chronolex/embedding.hpp"

namespace chronolex {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ProcrustesResult {
  // Orthogonal d x d matrix minimizing ||X W - Y||_F.
  Eigen::MatrixXd rotation;
  // Fewer anchor rows than dimensions; the solution is not unique.
  bool underdetermined = false;
  // X^T Y is rank deficient; still solved, but not unique.
  bool rank_deficient = false;
};

// Solves min ||X W - Y||_F over orthogonal W as W = U V^T with
// U S V^T = svd(X^T Y). X and Y are used as given; callers normalize rows.
ProcrustesResult procrustes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y);

// Max-abs entry of W^T W - I.
double orthogonality_error(const Eigen::MatrixXd& w);

// Words with their vectors; cosine queries run against it.
class VectorSpace {
 public:
  VectorSpace() = default;
  VectorSpace(std::string label, std::vector<std::string> words, std::vector<std::uint64_t> counts,
              RowMatrix vectors);
  static VectorSpace from_model(const EmbeddingModel& model);

  const std::string& label() const { return label_; }
  std::size_t size() const { return words_.size(); }
  std::span<const std::string> words() const { return words_; }
  const std::string& word(std::size_t i) const { return words_[i]; }
  std::uint64_t count(std::size_t i) const { return counts_[i]; }
  const RowMatrix& vectors() const { return vectors_; }
  std::span<const double> vector(std::size_t i) const {
    return {vectors_.data() + i * static_cast<std::size_t>(vectors_.cols()), static_cast<std::size_t>(vectors_.cols())};
  }
  std::optional<std::size_t> find(std::string_view word) const;
  // Throws ValidationError listing spellings within edit distance 1.
  std::size_t require(std::string_view word) const;
  double norm(std::size_t i) const { return norms_[i]; }

 private:
  std::string label_;
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  RowMatrix vectors_;
  std::vector<double> norms_;
  std::unordered_map<std::string, std::size_t> index_;
};

// dot(a, b) / (|a| |b|), summing components in index order; 0 if either
// vector is zero.
double cosine(std::span<const double> a, std::span<const double> b);

enum class CommonFrame { kLast, kFirst };

struct AlignOptions {
  // Restrict anchors to the n shared words with the highest combined count.
  std::optional<std::size_t> anchor_top_n;
  CommonFrame frame = CommonFrame::kLast;
};

struct AlignedSeries {
  // Per slice, in input order: row-normalized vectors mapped into the common
  // frame.
  std::vector<VectorSpace> slices;
  // transforms[i] maps slice i's normalized vectors into the common frame.
  std::vector<Eigen::MatrixXd> transforms;
  // Anchor words used for each consecutive pair (i, i+1).
  std::vector<std::size_t> anchor_counts;
  std::vector<ProcrustesResult> pair_solutions;

  const VectorSpace& slice(std::string_view label) const;
  nlohmann::json summary() const;
};

// Aligns consecutive pairs on their shared vocabulary and composes the pair
// rotations into one frame. Throws ValidationError for fewer than two models
// or an empty intersection (naming the pair).
AlignedSeries align_series(std::span<const EmbeddingModel> models, const AlignOptions& options = {});

struct DriftRecord {
  std::string word;
  std::string from_slice;
  std::string to_slice;
  double cosine = 0.0;
};

DriftRecord drift(const AlignedSeries& series, std::string_view word, std::string_view from_slice,
                  std::string_view to_slice);

// Every word in both slices (intersected with `filter` when given), ascending
// by cosine, ties by word.
std::vector<DriftRecord> rank_drift(const AlignedSeries& series, std::string_view from_slice,
                                    std::string_view to_slice,
                                    std::optional<std::span<const std::string>> filter = std::nullopt,
                                    std::size_t workers = 1);

// `word,from_slice,to_slice,cosine`
std::string drift_csv(std::span<const DriftRecord> records);

struct Neighbor {
  std::string word;
  double cosine = 0.0;
};

// Top-k by cosine excluding the query word, descending, ties by word.
std::vector<Neighbor> neighbors(const VectorSpace& space, std::string_view word, std::size_t k,
                                std::size_t workers = 1);

struct NeighborTable {
  std::string slice;
  std::vector<Neighbor> neighbors;
};

// `slice,rank,word,cosine` (rank from 1).
std::string neighbors_csv(std::span<const NeighborTable> tables);

struct TrajectoryPoint {
  std::string label;  // the word
  std::string slice;
  bool is_query = false;
  double x = 0.0;
  double y = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryPoint> points;
  // Variance along each principal axis, descending (all of them, so callers
  // can compare the first two against the residual).
  std::vector<double> variances;
};

// Collects the word's aligned vector and its top context_k neighbors in each
// slice containing it, then projects the set onto its first two principal
// components. Each axis is signed so its first non-negligible loading is
// positive. Throws ValidationError if the word is in fewer than two slices.
Trajectory project_trajectory(const AlignedSeries& series, std::string_view word, std::size_t context_k);

// PCA projection of arbitrary rows to 2-D with the same conventions.
Trajectory project_points(const Eigen::MatrixXd& points);

// `label,slice,x,y`
std::string trajectory_csv(const Trajectory& t);

}  // namespace chronolex

#endif  // CHRONOLEX_ALIGN_HPP_
