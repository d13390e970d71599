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

#include "uco/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_set>

namespace uco {
namespace {

// Corpus columns scored per pass; fixed so every score is produced by the same
// instruction sequence whatever the query blocking.
constexpr Eigen::Index kTile = 512;

struct Candidate {
  double score;
  std::uint32_t row;
  std::uint32_t rank;
};

bool better(const Candidate& a, const Candidate& b) {
  return a.score != b.score ? a.score > b.score : a.rank < b.rank;
}

class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { items_.reserve(k); }

  void offer(const Candidate& c) {
    if (items_.size() < k_) {
      items_.push_back(c);
      if (items_.size() == k_) find_worst();
      return;
    }
    if (!better(c, items_[worst_])) return;
    items_[worst_] = c;
    find_worst();
  }

  std::vector<Candidate> sorted() && {
    std::sort(items_.begin(), items_.end(), better);
    return std::move(items_);
  }

 private:
  void find_worst() {
    worst_ = 0;
    for (std::size_t i = 1; i < items_.size(); ++i) {
      if (better(items_[worst_], items_[i])) worst_ = i;
    }
  }

  std::size_t k_;
  std::size_t worst_ = 0;
  std::vector<Candidate> items_;
};

void search_range(const Index& index, const Eigen::Ref<const RowMatrix<float>>& queries, Eigen::Index begin,
                  Eigen::Index end, std::size_t k, Eigen::Index block_size, std::vector<std::vector<Candidate>>& out) {
  const RowMatrix<double>& corpus = index.scoring();
  const Eigen::Index n = index.size();
  const Eigen::Index dim = index.dim();
  const auto& id_rank = index.id_rank();
  Eigen::VectorXd acc(kTile);
  Eigen::VectorXd q(dim);
  for (Eigen::Index b0 = begin; b0 < end; b0 += block_size) {
    const Eigen::Index b1 = std::min(end, b0 + block_size);
    std::vector<TopK> heaps(static_cast<std::size_t>(b1 - b0), TopK(k));
    for (Eigen::Index c0 = 0; c0 < n; c0 += kTile) {
      const Eigen::Index len = std::min(kTile, n - c0);
      for (Eigen::Index qi = b0; qi < b1; ++qi) {
        q = queries.row(qi).transpose().cast<double>();
        auto a = acc.head(len);
        a.setZero();
        for (Eigen::Index d = 0; d < dim; ++d) {
          a.noalias() += q[d] * corpus.row(d).segment(c0, len).transpose();
        }
        auto& heap = heaps[static_cast<std::size_t>(qi - b0)];
        for (Eigen::Index j = 0; j < len; ++j) {
          const auto row = static_cast<std::uint32_t>(c0 + j);
          heap.offer({std::clamp(a[j], -1.0, 1.0), row, id_rank[row]});
        }
      }
    }
    for (Eigen::Index qi = b0; qi < b1; ++qi) out[static_cast<std::size_t>(qi)] = std::move(heaps[static_cast<std::size_t>(qi - b0)]).sorted();
  }
}

}  // namespace

Index::Index(RowMatrix<float> matrix, std::vector<std::string> ids) : matrix_(std::move(matrix)), ids_(std::move(ids)) {
  if (matrix_.rows() == 0) throw ValidationError("index is empty");
  if (static_cast<std::size_t>(matrix_.rows()) != ids_.size()) throw ValidationError("index: row count differs from id count");
  if (ids_.size() > UINT32_MAX) throw ValidationError("index: too many rows");
  std::unordered_set<std::string_view> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) throw ValidationError("index: duplicate title_id '" + id + "'");
  }
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
    const double norm = matrix_.row(i).cast<double>().norm();
    if (std::abs(norm - 1.0) > 1e-6) throw ValidationError("index: row for '" + ids_[static_cast<std::size_t>(i)] + "' is not unit-norm");
  }
  std::vector<std::uint32_t> order(ids_.size());
  std::iota(order.begin(), order.end(), 0U);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return ids_[a] < ids_[b]; });
  id_rank_.resize(ids_.size());
  for (std::uint32_t r = 0; r < order.size(); ++r) id_rank_[order[r]] = r;
  scoring_ = matrix_.transpose().cast<double>();
}

std::vector<ScoredTitle> top_k(const Index& index, const Eigen::Ref<const Eigen::VectorXf>& query, std::size_t k) {
  RowMatrix<float> q = query.transpose();
  auto run = batch_search(index, q, {"query"}, k, {1, 1});
  return std::move(run.queries.front().titles);
}

RankedRun batch_search(const Index& index, const Eigen::Ref<const RowMatrix<float>>& queries,
                       const std::vector<std::string>& query_ids, std::size_t k, const SearchOptions& opt) {
  if (k < 1) throw ValidationError("k must be at least 1");
  if (queries.cols() != index.dim()) throw ValidationError("query dimension differs from index dimension");
  if (static_cast<std::size_t>(queries.rows()) != query_ids.size()) throw ValidationError("one query id per query row required");
  if (opt.block_size < 1) throw ValidationError("block size must be at least 1");
  for (Eigen::Index i = 0; i < queries.rows(); ++i) {
    if (std::abs(queries.row(i).cast<double>().norm() - 1.0) > 1e-6) {
      throw ValidationError("query '" + query_ids[static_cast<std::size_t>(i)] + "' is not unit-norm");
    }
  }
  const std::size_t depth = std::min<std::size_t>(k, static_cast<std::size_t>(index.size()));
  std::vector<std::vector<Candidate>> results(static_cast<std::size_t>(queries.rows()));

  unsigned threads = opt.threads ? opt.threads : std::max(1U, std::thread::hardware_concurrency());
  const Eigen::Index n_queries = queries.rows();
  threads = static_cast<unsigned>(std::clamp<Eigen::Index>(threads, 1, std::max<Eigen::Index>(1, n_queries)));
  if (threads == 1) {
    search_range(index, queries, 0, n_queries, depth, opt.block_size, results);
  } else {
    std::vector<std::jthread> pool;
    const Eigen::Index chunk = (n_queries + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const Eigen::Index begin = t * chunk;
      const Eigen::Index end = std::min(n_queries, begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, begin, end] { search_range(index, queries, begin, end, depth, opt.block_size, results); });
    }
  }

  RankedRun run;
  run.k_max = k;
  run.queries.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    QueryRanking ranking{query_ids[i], {}};
    ranking.titles.reserve(results[i].size());
    for (const auto& c : results[i]) ranking.titles.push_back({index.ids()[c.row], c.score});
    run.queries.push_back(std::move(ranking));
  }
  return run;
}

}  // namespace uco
