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

#include "chronolex/align.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "chronolex/error.hpp"
#include "chronolex/io.hpp"
#include "chronolex/parallel.hpp"
#include "chronolex/utf8.hpp"

namespace chronolex {

using nlohmann::json;

ProcrustesResult procrustes(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  if (x.rows() != y.rows() || x.cols() != y.cols()) {
    throw ValidationError("procrustes: X and Y must have the same shape");
  }
  if (x.rows() == 0) throw ValidationError("procrustes: no anchor rows");
  const Eigen::MatrixXd m = x.transpose() * y;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ProcrustesResult r;
  r.rotation = svd.matrixU() * svd.matrixV().transpose();
  r.underdetermined = x.rows() < x.cols();
  r.rank_deficient = svd.rank() < m.cols();
  return r;
}

double orthogonality_error(const Eigen::MatrixXd& w) {
  const Eigen::MatrixXd e = w.transpose() * w - Eigen::MatrixXd::Identity(w.cols(), w.cols());
  return e.cwiseAbs().maxCoeff();
}

double cosine(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  return ab / (std::sqrt(aa) * std::sqrt(bb));
}

namespace {

double norm_of(std::span<const double> a) {
  double aa = 0.0;
  for (double v : a) aa += v * v;
  return std::sqrt(aa);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double ab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) ab += a[i] * b[i];
  return ab;
}

// Same arithmetic as cosine(), with the norms precomputed.
double cosine_with_norms(std::span<const double> a, double na, std::span<const double> b, double nb) {
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot(a, b) / (na * nb);
}

bool within_one_edit(std::u32string_view a, std::u32string_view b) {
  if (a.size() > b.size()) std::swap(a, b);
  if (b.size() - a.size() > 1) return false;
  std::size_t i = 0;
  while (i < a.size() && a[i] == b[i]) ++i;
  if (a.size() == b.size()) return a.substr(i + (i < a.size())) == b.substr(i + (i < b.size()));
  return a.substr(i) == b.substr(i + 1);
}

}  // namespace

VectorSpace::VectorSpace(std::string label, std::vector<std::string> words, std::vector<std::uint64_t> counts,
                         RowMatrix vectors)
    : label_(std::move(label)), words_(std::move(words)), counts_(std::move(counts)), vectors_(std::move(vectors)) {
  if (static_cast<std::size_t>(vectors_.rows()) != words_.size() || counts_.size() != words_.size()) {
    throw ValidationError("vector space '" + label_ + "': row count does not match vocabulary");
  }
  norms_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    norms_.push_back(norm_of(vector(i)));
    if (!index_.emplace(words_[i], i).second) {
      throw ValidationError("vector space '" + label_ + "': duplicate word '" + words_[i] + "'");
    }
  }
}

VectorSpace VectorSpace::from_model(const EmbeddingModel& model) {
  RowMatrix m(model.input.rows, model.input.cols);
  std::copy(model.input.data.begin(), model.input.data.end(), m.data());
  return VectorSpace(model.slice_label, {model.vocab.words().begin(), model.vocab.words().end()},
                     {model.vocab.counts().begin(), model.vocab.counts().end()}, std::move(m));
}

std::optional<std::size_t> VectorSpace::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t VectorSpace::require(std::string_view word) const {
  if (auto i = find(word)) return *i;
  std::string msg = "'" + std::string(word) + "' is not in the vocabulary of slice '" + label_ + "'";
  std::u32string q;
  try {
    q = utf8::decode(word);
  } catch (const ValidationError&) {
    throw ValidationError(msg);
  }
  std::vector<std::string> hints;
  for (const auto& w : words_) {
    if (within_one_edit(q, utf8::decode(w))) hints.push_back(w);
  }
  std::sort(hints.begin(), hints.end());
  if (!hints.empty()) {
    msg += "; did you mean:";
    for (std::size_t i = 0; i < hints.size() && i < 10; ++i) msg += " " + hints[i];
  }
  throw ValidationError(msg);
}

const VectorSpace& AlignedSeries::slice(std::string_view label) const {
  for (const auto& s : slices) {
    if (s.label() == label) return s;
  }
  throw ValidationError("unknown slice '" + std::string(label) + "'");
}

json AlignedSeries::summary() const {
  json pairs = json::array();
  for (std::size_t i = 0; i + 1 < slices.size(); ++i) {
    pairs.push_back({{"from", slices[i].label()},
                     {"to", slices[i + 1].label()},
                     {"anchors", anchor_counts[i]},
                     {"underdetermined", pair_solutions[i].underdetermined},
                     {"rank_deficient", pair_solutions[i].rank_deficient},
                     {"orthogonality_error", orthogonality_error(pair_solutions[i].rotation)}});
  }
  json labels = json::array();
  for (const auto& s : slices) labels.push_back(s.label());
  return {{"slices", labels}, {"pairs", pairs}};
}

namespace {

RowMatrix normalized_rows(const EmbeddingModel& m) {
  RowMatrix out(m.input.rows, m.input.cols);
  for (std::size_t i = 0; i < m.input.rows; ++i) {
    const auto row = m.input.row(i);
    const double n = norm_of(row);
    for (std::size_t j = 0; j < row.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = n > 0 ? row[j] / n : 0.0;
  }
  return out;
}

}  // namespace

AlignedSeries align_series(std::span<const EmbeddingModel> models, const AlignOptions& options) {
  if (models.size() < 2) throw ValidationError("alignment needs at least two models");
  const auto d = static_cast<Eigen::Index>(models.front().input.cols);
  for (const auto& m : models) {
    if (static_cast<Eigen::Index>(m.input.cols) != d) {
      throw ValidationError("model '" + m.slice_label + "' has a different dimension");
    }
  }

  std::vector<RowMatrix> normed;
  normed.reserve(models.size());
  for (const auto& m : models) normed.push_back(normalized_rows(m));

  AlignedSeries series;
  std::vector<Eigen::MatrixXd> pair_w;  // maps slice i into slice i+1
  for (std::size_t i = 0; i + 1 < models.size(); ++i) {
    const Vocab& a = models[i].vocab;
    const Vocab& b = models[i + 1].vocab;
    struct Anchor {
      std::uint32_t ia, ib;
      std::uint64_t weight;
    };
    std::vector<Anchor> anchors;
    for (std::uint32_t ia = 0; ia < a.size(); ++ia) {
      if (auto ib = b.find(a.word(ia))) anchors.push_back({ia, *ib, a.count(ia) + b.count(*ib)});
    }
    if (anchors.empty()) {
      throw ValidationError("slices '" + models[i].slice_label + "' and '" + models[i + 1].slice_label +
                            "' share no vocabulary");
    }
    if (options.anchor_top_n && *options.anchor_top_n < anchors.size()) {
      std::stable_sort(anchors.begin(), anchors.end(), [&](const Anchor& x, const Anchor& y) {
        return x.weight != y.weight ? x.weight > y.weight : a.word(x.ia) < a.word(y.ia);
      });
      anchors.resize(std::max<std::size_t>(*options.anchor_top_n, 1));
    }
    Eigen::MatrixXd x(static_cast<Eigen::Index>(anchors.size()), d);
    Eigen::MatrixXd y(static_cast<Eigen::Index>(anchors.size()), d);
    for (std::size_t r = 0; r < anchors.size(); ++r) {
      x.row(static_cast<Eigen::Index>(r)) = normed[i].row(anchors[r].ia);
      y.row(static_cast<Eigen::Index>(r)) = normed[i + 1].row(anchors[r].ib);
    }
    series.pair_solutions.push_back(procrustes(x, y));
    series.anchor_counts.push_back(anchors.size());
    pair_w.push_back(series.pair_solutions.back().rotation);
  }

  const std::size_t n = models.size();
  series.transforms.assign(n, Eigen::MatrixXd::Identity(d, d));
  if (options.frame == CommonFrame::kLast) {
    for (std::size_t i = n - 1; i-- > 0;) series.transforms[i] = pair_w[i] * series.transforms[i + 1];
  } else {
    for (std::size_t i = 1; i < n; ++i) series.transforms[i] = pair_w[i - 1].transpose() * series.transforms[i - 1];
  }

  for (std::size_t i = 0; i < n; ++i) {
    const auto& v = models[i].vocab;
    RowMatrix aligned = normed[i] * series.transforms[i];
    series.slices.emplace_back(models[i].slice_label, std::vector<std::string>(v.words().begin(), v.words().end()),
                               std::vector<std::uint64_t>(v.counts().begin(), v.counts().end()), std::move(aligned));
  }
  return series;
}

DriftRecord drift(const AlignedSeries& series, std::string_view word, std::string_view from_slice,
                  std::string_view to_slice) {
  const VectorSpace& a = series.slice(from_slice);
  const VectorSpace& b = series.slice(to_slice);
  const std::size_t ia = a.require(word);
  const std::size_t ib = b.require(word);
  return {std::string(word), a.label(), b.label(), cosine(a.vector(ia), b.vector(ib))};
}

std::vector<DriftRecord> rank_drift(const AlignedSeries& series, std::string_view from_slice,
                                    std::string_view to_slice, std::optional<std::span<const std::string>> filter,
                                    std::size_t workers) {
  const VectorSpace& a = series.slice(from_slice);
  const VectorSpace& b = series.slice(to_slice);
  std::vector<std::string> words;
  if (filter) {
    std::unordered_set<std::string> seen;
    for (const auto& w : *filter) {
      if (a.find(w) && b.find(w) && seen.insert(w).second) words.push_back(w);
    }
  } else {
    for (const auto& w : a.words()) {
      if (b.find(w)) words.push_back(w);
    }
  }
  std::vector<DriftRecord> out(words.size());
  parallel_chunks(words.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      out[i] = {words[i], a.label(), b.label(), cosine(a.vector(*a.find(words[i])), b.vector(*b.find(words[i])))};
    }
  });
  std::stable_sort(out.begin(), out.end(), [](const DriftRecord& x, const DriftRecord& y) {
    return x.cosine != y.cosine ? x.cosine < y.cosine : x.word < y.word;
  });
  return out;
}

std::string drift_csv(std::span<const DriftRecord> records) {
  std::string out = "word,from_slice,to_slice,cosine\n";
  for (const auto& r : records) {
    out += csv_field(r.word) + ',' + csv_field(r.from_slice) + ',' + csv_field(r.to_slice) + ',' +
           format_double(r.cosine) + '\n';
  }
  return out;
}

std::vector<Neighbor> neighbors(const VectorSpace& space, std::string_view word, std::size_t k, std::size_t workers) {
  if (k < 1) throw ValidationError("neighbor count k must be >= 1");
  const std::size_t q = space.require(word);
  const auto qv = space.vector(q);
  const double qn = space.norm(q);
  std::vector<Neighbor> all(space.size());
  parallel_chunks(space.size(), workers, [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      all[i] = {space.word(i), cosine_with_norms(qv, qn, space.vector(i), space.norm(i))};
    }
  });
  all.erase(all.begin() + static_cast<std::ptrdiff_t>(q));
  const auto by_rank = [](const Neighbor& x, const Neighbor& y) {
    return x.cosine != y.cosine ? x.cosine > y.cosine : x.word < y.word;
  };
  const std::size_t take = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end(), by_rank);
  all.resize(take);
  return all;
}

std::string neighbors_csv(std::span<const NeighborTable> tables) {
  std::string out = "slice,rank,word,cosine\n";
  for (const auto& t : tables) {
    for (std::size_t r = 0; r < t.neighbors.size(); ++r) {
      out += csv_field(t.slice) + ',' + std::to_string(r + 1) + ',' + csv_field(t.neighbors[r].word) + ',' +
             format_double(t.neighbors[r].cosine) + '\n';
    }
  }
  return out;
}

Trajectory project_points(const Eigen::MatrixXd& points) {
  Trajectory t;
  const Eigen::Index m = points.rows();
  if (m == 0) return t;
  const Eigen::RowVectorXd mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  Eigen::MatrixXd axes = Eigen::MatrixXd::Zero(points.cols(), 2);
  const Eigen::Index available = std::min<Eigen::Index>(2, svd.matrixV().cols());
  axes.leftCols(available) = svd.matrixV().leftCols(available);
  for (Eigen::Index c = 0; c < available; ++c) {
    const double scale = axes.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index r = 0; r < axes.rows(); ++r) {
      if (std::abs(axes(r, c)) > 1e-12 * scale) {
        if (axes(r, c) < 0) axes.col(c) *= -1.0;
        break;
      }
    }
  }
  const Eigen::MatrixXd projected = centered * axes;
  const double denom = m > 1 ? static_cast<double>(m - 1) : 1.0;
  for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
    const double s = svd.singularValues()(i);
    t.variances.push_back(s * s / denom);
  }
  t.points.resize(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) {
    t.points[static_cast<std::size_t>(i)].x = projected(i, 0);
    t.points[static_cast<std::size_t>(i)].y = projected(i, 1);
  }
  return t;
}

Trajectory project_trajectory(const AlignedSeries& series, std::string_view word, std::size_t context_k) {
  struct Source {
    const VectorSpace* space;
    std::size_t row;
    bool query;
  };
  std::vector<Source> sources;
  std::size_t present = 0;
  for (const auto& s : series.slices) {
    auto q = s.find(word);
    if (!q) continue;
    ++present;
    sources.push_back({&s, *q, true});
    if (context_k > 0 && s.size() > 1) {
      for (const auto& nb : neighbors(s, word, context_k)) sources.push_back({&s, *s.find(nb.word), false});
    }
  }
  if (present < 2) {
    throw ValidationError("'" + std::string(word) + "' occurs in " + std::to_string(present) +
                          " slice(s); a trajectory needs at least two");
  }
  const Eigen::Index d = series.slices.front().vectors().cols();
  Eigen::MatrixXd points(static_cast<Eigen::Index>(sources.size()), d);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    points.row(static_cast<Eigen::Index>(i)) = sources[i].space->vectors().row(static_cast<Eigen::Index>(sources[i].row));
  }
  Trajectory t = project_points(points);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    t.points[i].label = sources[i].space->word(sources[i].row);
    t.points[i].slice = sources[i].space->label();
    t.points[i].is_query = sources[i].query;
  }
  return t;
}

std::string trajectory_csv(const Trajectory& t) {
  std::string out = "label,slice,x,y\n";
  for (const auto& p : t.points) {
    out += csv_field(p.label) + ',' + csv_field(p.slice) + ',' + format_double(p.x) + ',' + format_double(p.y) + '\n';
  }
  return out;
}

}  // namespace chronolex
