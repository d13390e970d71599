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

#include <cstddef>
#include <string>
#include <vector>

#include "uco/datamodel.hpp"
#include "uco/encoder.hpp"

namespace uco {

// Exact cosine search index over unit-norm float rows.
class Index {
 public:
  Index(RowMatrix<float> matrix, std::vector<std::string> ids);

  const RowMatrix<float>& matrix() const { return matrix_; }
  const std::vector<std::string>& ids() const { return ids_; }
  Eigen::Index size() const { return matrix_.rows(); }
  Eigen::Index dim() const { return matrix_.cols(); }

  // Position of each id in ascending id order, used for tie-breaking.
  const std::vector<std::uint32_t>& id_rank() const { return id_rank_; }
  // Transposed copy widened to double: dim x size, each feature row contiguous.
  const RowMatrix<double>& scoring() const { return scoring_; }

 private:
  RowMatrix<float> matrix_;
  std::vector<std::string> ids_;
  std::vector<std::uint32_t> id_rank_;
  RowMatrix<double> scoring_;
};

template <typename Scalar>
Index build_index(const std::vector<Document>& corpus, const EmbeddingModel<Scalar>& model) {
  if (corpus.empty()) throw ValidationError("cannot index an empty corpus");
  RowMatrix<float> matrix(static_cast<Eigen::Index>(corpus.size()), model.dim());
  std::vector<std::string> ids;
  ids.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    try {
      matrix.row(static_cast<Eigen::Index>(i)) = encode(corpus[i].text, model).template cast<float>().transpose();
    } catch (const ValidationError& e) {
      throw ValidationError("cannot encode title '" + corpus[i].id + "': " + e.what());
    }
    ids.push_back(corpus[i].id);
  }
  return Index(std::move(matrix), std::move(ids));
}

struct SearchOptions {
  Eigen::Index block_size = 64;  // queries scored together against each corpus tile
  unsigned threads = 0;          // 0 = hardware concurrency
};

// The k best titles by cosine (clamped to [-1, 1]), descending; ties go to the smaller title_id.
std::vector<ScoredTitle> top_k(const Index& index, const Eigen::Ref<const Eigen::VectorXf>& query, std::size_t k);

// top_k for every row of queries; query_ids name the rows in the returned run.
RankedRun batch_search(const Index& index, const Eigen::Ref<const RowMatrix<float>>& queries,
                       const std::vector<std::string>& query_ids, std::size_t k, const SearchOptions& opt = {});

}  // namespace uco
