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

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "support.hpp"
#include "uco/error.hpp"
#include "uco/retrieval.hpp"

using namespace uco;

namespace {

RowMatrix<float> random_unit_rows(Rng& rng, Eigen::Index rows, Eigen::Index dim) {
  RowMatrix<float> m(rows, dim);
  for (Eigen::Index i = 0; i < rows; ++i) {
    Eigen::VectorXd v(dim);
    for (auto& x : v) x = rng.uniform(-1, 1);
    m.row(i) = v.normalized().cast<float>().transpose();
  }
  return m;
}

// Ids deliberately not in row order, so the tie-break is exercised against position.
std::vector<std::string> shuffled_ids(Rng& rng, Eigen::Index n) {
  std::vector<std::string> ids;
  for (Eigen::Index i = 0; i < n; ++i) ids.push_back("t" + std::to_string(i));
  rng.shuffle(std::span<std::string>(ids));
  return ids;
}

std::vector<double> scores_of(const RowMatrix<float>& corpus, const Eigen::VectorXf& q) {
  std::vector<double> s;
  for (Eigen::Index i = 0; i < corpus.rows(); ++i) {
    double acc = 0;
    for (Eigen::Index d = 0; d < corpus.cols(); ++d) acc += static_cast<double>(q[d]) * static_cast<double>(corpus(i, d));
    s.push_back(acc);
  }
  return s;
}

}  // namespace

TEST(Index, ConstructionChecks) {
  Rng rng(1);
  auto m = random_unit_rows(rng, 3, 4);
  EXPECT_THROW(Index(m, {"a", "a", "b"}), ValidationError);
  EXPECT_THROW(Index(m, {"a", "b"}), ValidationError);
  RowMatrix<float> not_unit = m;
  not_unit(0, 0) += 0.5f;
  EXPECT_THROW(Index(not_unit, {"a", "b", "c"}), ValidationError);
  EXPECT_THROW(Index(RowMatrix<float>(0, 4), {}), ValidationError);
}

TEST(Index, BuildFromCorpus) {
  const auto model = init_model<double>(FeaturizerConfig{}, 8, 2);
  const std::vector<Document> corpus = {{"c", "red shoes"}, {"a", "blue hat"}, {"b", "green scarf"}};
  const Index idx = build_index(corpus, model);
  EXPECT_EQ(idx.size(), 3);
  EXPECT_EQ(idx.ids(), (std::vector<std::string>{"c", "a", "b"}));
  EXPECT_EQ(build_index(corpus, model).matrix(), idx.matrix());
  EXPECT_THROW(build_index(std::vector<Document>{{"x", "a"}, {"x", "b"}}, model), ValidationError);
  EXPECT_THROW(build_index(std::vector<Document>{{"x", "   "}}, model), ValidationError);
}

TEST(TopK, SelfMatchFirst) {
  Rng rng(2);
  const auto m = random_unit_rows(rng, 50, 16);
  const Index idx(m, shuffled_ids(rng, 50));
  const auto hits = top_k(idx, m.row(17).transpose(), 5);
  ASSERT_EQ(hits.size(), 5U);
  EXPECT_EQ(hits[0].title_id, idx.ids()[17]);
  EXPECT_NEAR(hits[0].score, 1.0, 1e-6);
}

TEST(TopK, WholeCorpusWhenKLarge) {
  Rng rng(3);
  const auto m = random_unit_rows(rng, 7, 4);
  const Index idx(m, shuffled_ids(rng, 7));
  const Eigen::VectorXf q = m.row(0).transpose();
  const auto hits = top_k(idx, q, 100);
  ASSERT_EQ(hits.size(), 7U);
  const auto expect = oracle::full_sort_top_k(scores_of(m, q), idx.ids(), 100);
  for (std::size_t i = 0; i < hits.size(); ++i) EXPECT_EQ(hits[i].title_id, expect[i].first);
  EXPECT_THROW(top_k(idx, q, 0), ValidationError);
}

TEST(TopK, TiesBrokenByTitleId) {
  RowMatrix<float> m(4, 2);
  m << 1, 0, 0, 1, 1, 0, 0, 1;
  const Index idx(m, {"z", "b", "a", "c"});
  const auto hits = top_k(idx, Eigen::Vector2f(1, 0), 4);
  EXPECT_EQ(hits[0].title_id, "a");
  EXPECT_EQ(hits[1].title_id, "z");
  EXPECT_EQ(hits[2].title_id, "b");
  EXPECT_EQ(hits[3].title_id, "c");
}

TEST(TopK, EqualsFullSortOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::Index n = 1 + static_cast<Eigen::Index>(rng.below(1000));
    const Eigen::Index dim = 2 + static_cast<Eigen::Index>(rng.below(63));
    auto m = random_unit_rows(rng, n, dim);
    // Duplicate some rows to force exact score ties.
    for (Eigen::Index i = 1; i < n; i += 7) m.row(i) = m.row(i - 1);
    const Index idx(m, shuffled_ids(rng, n));
    const std::size_t k = 1 + rng.below(20);
    const Eigen::VectorXf q = random_unit_rows(rng, 1, dim).row(0).transpose();
    const auto hits = top_k(idx, q, k);
    const auto expect = oracle::full_sort_top_k(scores_of(m, q), idx.ids(), k);
    ASSERT_EQ(hits.size(), expect.size());
    for (std::size_t i = 0; i < hits.size(); ++i) {
      EXPECT_EQ(hits[i].title_id, expect[i].first);
      EXPECT_EQ(hits[i].score, expect[i].second);
      EXPECT_LE(std::abs(hits[i].score), 1.0);
    }
  }
}

TEST(BatchSearch, BlockAndThreadInvariant) {
  Rng rng(5);
  const auto corpus = random_unit_rows(rng, 1300, 24);
  const auto queries = random_unit_rows(rng, 70, 24);
  std::vector<std::string> qids;
  for (int i = 0; i < 70; ++i) qids.push_back("q" + std::to_string(i));
  const Index idx(corpus, shuffled_ids(rng, 1300));
  const RankedRun base = batch_search(idx, queries, qids, 10, {1, 1});
  for (Eigen::Index block : {2, 7, 64, 256}) {
    for (unsigned threads : {1U, 3U}) EXPECT_EQ(batch_search(idx, queries, qids, 10, {block, threads}), base);
  }
  const auto single = top_k(idx, queries.row(5).transpose(), 10);
  EXPECT_EQ(single, base.queries[5].titles);
  validate_run(base);
}

TEST(BatchSearch, RejectsBadQueries) {
  Rng rng(6);
  const auto corpus = random_unit_rows(rng, 10, 4);
  const Index idx(corpus, shuffled_ids(rng, 10));
  RowMatrix<float> q = RowMatrix<float>::Zero(1, 4);
  EXPECT_THROW(batch_search(idx, q, {"q"}, 3), ValidationError);
  EXPECT_THROW(batch_search(idx, random_unit_rows(rng, 1, 5), {"q"}, 3), ValidationError);
  EXPECT_THROW(batch_search(idx, random_unit_rows(rng, 2, 4), {"q"}, 3), ValidationError);
}
