// Copyright 2026 The UCO Authors.
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

#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "uco/error.hpp"
#include "uco/random.hpp"

namespace uco {

struct FeaturizerConfig {
  int ngram_min = 3;
  int ngram_max = 5;
  bool include_whole_tokens = true;
  std::uint64_t n_buckets = std::uint64_t{1} << 18;
  std::uint64_t hash_seed = 0;

  bool operator==(const FeaturizerConfig&) const = default;
};

void validate(const FeaturizerConfig& cfg);

using FeatureId = std::uint32_t;

// Lowercased, whitespace-split tokens; each token wrapped as "<token>" contributes
// its character n-grams (UTF-8 code points) and optionally the whole token.
std::vector<FeatureId> featurize(std::string_view text, const FeaturizerConfig& cfg);

// Raw feature strings before hashing, in emission order. Whole tokens carry a leading '\x01'.
std::vector<std::string> feature_strings(std::string_view text, const FeaturizerConfig& cfg);

FeatureId hash_feature(std::string_view feature, const FeaturizerConfig& cfg);

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;
template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// One embedding row per hash bucket. Queries and titles share the table.
template <typename Scalar>
struct EmbeddingModel {
  RowMatrix<Scalar> table;
  FeaturizerConfig featurizer;

  Eigen::Index dim() const { return table.cols(); }

  template <typename Other>
  EmbeddingModel<Other> cast() const {
    return {table.template cast<Other>(), featurizer};
  }
};

using EmbeddingModelf = EmbeddingModel<float>;
using EmbeddingModeld = EmbeddingModel<double>;

// Table entries i.i.d. uniform in [-0.5/dim, 0.5/dim].
template <typename Scalar>
EmbeddingModel<Scalar> init_model(const FeaturizerConfig& cfg, Eigen::Index dim, std::uint64_t seed) {
  validate(cfg);
  if (dim < 2) throw ValidationError("embedding dim must be at least 2");
  EmbeddingModel<Scalar> model{RowMatrix<Scalar>(static_cast<Eigen::Index>(cfg.n_buckets), dim), cfg};
  Rng rng(seed);
  const double half = 0.5 / static_cast<double>(dim);
  Scalar* data = model.table.data();
  for (Eigen::Index i = 0; i < model.table.size(); ++i) data[i] = static_cast<Scalar>(rng.uniform(-half, half));
  return model;
}

// Norms below this fall back to the first basis vector.
inline constexpr double kDegenerateNorm = 1e-12;

// Forward state kept for the backward pass.
template <typename Scalar>
struct Encoding {
  std::vector<FeatureId> features;
  Vector<Scalar> mean;    // pre-normalization mean of table rows
  Scalar norm = 0;        // ||mean||
  Vector<Scalar> output;  // unit vector
  bool degenerate = false;
};

template <typename Scalar>
Encoding<Scalar> encode_traced(std::vector<FeatureId> features, const EmbeddingModel<Scalar>& model) {
  if (features.empty()) throw ValidationError("cannot encode text with no features");
  Encoding<Scalar> enc;
  enc.features = std::move(features);
  enc.mean = Vector<Scalar>::Zero(model.dim());
  for (FeatureId f : enc.features) enc.mean += model.table.row(f).transpose();
  enc.mean /= static_cast<Scalar>(enc.features.size());
  enc.norm = enc.mean.norm();
  if (!(enc.norm >= static_cast<Scalar>(kDegenerateNorm))) {
    enc.degenerate = true;
    enc.output = Vector<Scalar>::Unit(model.dim(), 0);
  } else {
    enc.output = enc.mean / enc.norm;
  }
  return enc;
}

template <typename Scalar>
Encoding<Scalar> encode_traced(std::string_view text, const EmbeddingModel<Scalar>& model) {
  return encode_traced(featurize(text, model.featurizer), model);
}

// Unit-norm embedding of text: mean of feature rows, L2-normalized.
template <typename Scalar>
Vector<Scalar> encode(std::string_view text, const EmbeddingModel<Scalar>& model) {
  return encode_traced(text, model).output;
}

template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar cosine(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  using Scalar = typename DerivedA::Scalar;
  if (u.size() != v.size()) throw ValidationError("cosine: dimension mismatch");
  return std::clamp(u.dot(v), Scalar(-1), Scalar(1));
}

// Row gradients keyed by bucket; duplicate features accumulate into one row.
template <typename Scalar>
struct SparseGrad {
  std::unordered_map<FeatureId, RowVector<Scalar>> rows;

  void add(FeatureId row, const RowVector<Scalar>& g) {
    auto [it, inserted] = rows.try_emplace(row, g);
    if (!inserted) it->second += g;
  }

  void merge(const SparseGrad& other) {
    for (const auto& [row, g] : other.rows) add(row, g);
  }

  // Bucket ids in ascending order, for deterministic traversal.
  std::vector<FeatureId> sorted_rows() const {
    std::vector<FeatureId> ids;
    ids.reserve(rows.size());
    for (const auto& kv : rows) ids.push_back(kv.first);
    std::sort(ids.begin(), ids.end());
    return ids;
  }
};

// Pulls dL/d(output) back through normalization, dL/dmean = (I - y y^T) g / ||mean||,
// and spreads it evenly over the contributing rows. Degenerate encodings get zero gradient.
template <typename Scalar, typename Derived>
void encode_backward(const Encoding<Scalar>& enc, const Eigen::MatrixBase<Derived>& upstream, SparseGrad<Scalar>& grad) {
  if (upstream.size() != enc.output.size()) throw ValidationError("encode_backward: dimension mismatch");
  if (enc.degenerate) return;
  const Vector<Scalar>& y = enc.output;
  const Vector<Scalar> g_mean = (upstream - y * y.dot(upstream)) / enc.norm;
  const RowVector<Scalar> per_row = (g_mean / static_cast<Scalar>(enc.features.size())).transpose();
  for (FeatureId f : enc.features) grad.add(f, per_row);
}

template <typename Scalar, typename Derived>
SparseGrad<Scalar> encode_backward(std::string_view text, const EmbeddingModel<Scalar>& model,
                                   const Eigen::MatrixBase<Derived>& upstream) {
  SparseGrad<Scalar> grad;
  encode_backward(encode_traced(text, model), upstream, grad);
  return grad;
}

// Checkpoint layout, all integers little-endian:
//   8 bytes  magic "UCOCKPT1"
//   u32 dim, u64 n_buckets, u32 ngram_min, u32 ngram_max, u32 include_whole_tokens, u64 hash_seed
//   n_buckets * dim float32 table entries, row-major
void save_checkpoint(const EmbeddingModelf& model, const std::filesystem::path& path);
EmbeddingModelf load_checkpoint(const std::filesystem::path& path);

template <typename Scalar>
void save_checkpoint(const EmbeddingModel<Scalar>& model, const std::filesystem::path& path) {
  save_checkpoint(model.template cast<float>(), path);
}

// Share of distinct feature strings that lost their own bucket to a collision:
// 1 - distinct buckets / distinct features.
double collision_rate(const std::vector<std::string>& texts, const FeaturizerConfig& cfg);

}  // namespace uco
