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

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "support.hpp"
#include "uco/curation.hpp"
#include "uco/error.hpp"
#include "uco/synthgen.hpp"

using namespace uco;

namespace {

GradedPair pair(std::string q, std::string qt, std::string t, std::string tt, int rel) {
  return {std::move(q), std::move(qt), std::move(t), std::move(tt), rel, rel > 3 ? 1 : 0};
}

std::set<std::string> query_ids(const EvalSplit& s) {
  std::set<std::string> ids;
  for (const auto& q : s.dev_queries) ids.insert(q.id);
  for (const auto& q : s.test_queries) ids.insert(q.id);
  return ids;
}

// n queries with one positive and one negative each.
std::vector<GradedPair> simple_pairs(int n) {
  std::vector<GradedPair> out;
  for (int i = 0; i < n; ++i) {
    const std::string q = "q" + std::to_string(i);
    out.push_back(pair(q, "query " + q, q + "a", "good " + q, 5));
    out.push_back(pair(q, "query " + q, q + "b", "bad " + q, 1));
  }
  return out;
}

}  // namespace

TEST(FilterPairs, DropsGradeThreeKeepsFour) {
  const CurationConfig cfg;
  const auto out = filter_pairs({pair("q", "a", "t1", "x", 3), pair("q", "a", "t2", "y", 4)}, cfg);
  ASSERT_EQ(out.size(), 1U);
  EXPECT_EQ(out[0].title_id, "t2");
}

TEST(FilterPairs, EnglishHeuristic) {
  CurationConfig cfg;
  const auto cyrillic = pair("q", "phone", "t1", "Чехол для телефона", 2);
  EXPECT_TRUE(filter_pairs({cyrillic}, cfg).empty());
  cfg.english_filter = false;
  EXPECT_EQ(filter_pairs({cyrillic}, cfg).size(), 1U);
  EXPECT_DOUBLE_EQ(ascii_printable_ratio("abc"), 1.0);
  EXPECT_DOUBLE_EQ(ascii_printable_ratio("ab\xD0\xA7\xD0\xB5"), 0.5);  // two ASCII, two Cyrillic code points
}

TEST(FilterPairs, Deduplicates) {
  const auto p = pair("q", "a", "t1", "x", 4);
  EXPECT_EQ(filter_pairs({p, p}, CurationConfig{}).size(), 1U);
}

TEST(BuildCq, BothSidesRule) {
  std::vector<GradedPair> pairs = {pair("q1", "a", "t1", "x", 4), pair("q1", "a", "t2", "y", 2),
                                   pair("q2", "b", "t3", "z", 4), pair("q2", "b", "t4", "w", 5)};
  const EvalSplit s = build_cq(pairs, CurationConfig{});
  EXPECT_EQ(query_ids(s), std::set<std::string>{"q1"});
  EXPECT_EQ(s.corpus.size(), 2U);
  EXPECT_THROW(build_cq({pairs[2], pairs[3]}, CurationConfig{}), ValidationError);
}

TEST(BuildCq, EightyTwentyPartition) {
  const EvalSplit s = build_cq(simple_pairs(10), CurationConfig{});
  EXPECT_EQ(s.dev_queries.size(), 8U);
  EXPECT_EQ(s.test_queries.size(), 2U);
  validate_split(s);
}

TEST(BuildCq, ThresholdsMustBracketThree) {
  CurationConfig cfg;
  cfg.negative_threshold = 4;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = {};
  cfg.dev_fraction = 1.0;
  EXPECT_THROW(validate(cfg), ValidationError);
}

TEST(Balance, FiveVersusTwo) {
  std::vector<GradedPair> pairs;
  for (int i = 0; i < 5; ++i) pairs.push_back(pair("q", "a", "p" + std::to_string(i), "pos", 4));
  for (int i = 0; i < 2; ++i) pairs.push_back(pair("q", "a", "n" + std::to_string(i), "neg", 2));
  pairs.push_back(pair("r", "b", "rp", "pos", 5));
  pairs.push_back(pair("r", "b", "rn", "neg", 1));
  const EvalSplit cq = build_cq(pairs, CurationConfig{});
  const EvalSplit b = build_cq_balanced(cq, 3);
  int pos = 0, neg = 0;
  for (const auto& j : b.qrels.at("q")) (j.relevance > 3 ? pos : neg)++;
  EXPECT_GE(pos, 2);
  EXPECT_LE(pos, 3);
  EXPECT_EQ(neg, 2);
  EXPECT_EQ(b.qrels.at("r"), cq.qrels.at("r"));
  EXPECT_EQ(query_ids(b), query_ids(cq));
  validate_split(b);
}

TEST(Balance, PropertiesOnRandomDatasets) {
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<GradedPair> pairs;
    const int n_q = 1 + static_cast<int>(rng.below(20));
    for (int q = 0; q < n_q; ++q) {
      const std::string qid = "q" + std::to_string(q);
      const int n_t = 2 + static_cast<int>(rng.below(12));
      for (int t = 0; t < n_t; ++t) {
        const int rel = t == 0 ? 5 : t == 1 ? 1 : 1 + static_cast<int>(rng.below(5));
        pairs.push_back(pair(qid, "text " + qid, qid + "t" + std::to_string(t), "title " + std::to_string(t), rel));
      }
    }
    const EvalSplit cq = build_cq(filter_pairs(pairs, CurationConfig{}), CurationConfig{});
    const EvalSplit b = build_cq_balanced(cq, trial);
    std::size_t pos = 0, neg = 0;
    for (const auto& [qid, js] : b.qrels) {
      std::size_t p = 0, n = 0;
      for (const auto& j : js) (j.relevance > 3 ? p : n)++;
      EXPECT_EQ(p, n) << qid;
      EXPECT_LE(js.size(), cq.qrels.at(qid).size());
      pos += p;
      neg += n;
    }
    const double ratio = static_cast<double>(pos) / static_cast<double>(neg);
    EXPECT_GE(ratio, 0.9);
    EXPECT_LE(ratio, 1.1);
    EXPECT_EQ(b, build_cq_balanced(cq, trial));
    validate_split(b);
  }
}

TEST(CommonStr, PrinterBarbieGpu) {
  std::vector<GradedPair> pairs = {
      pair("q1", "3d printer", "t1", "Acme X2 3D Printer", 5),
      pair("q1", "3d printer", "t2", "3D Printer PLA Filament 1kg Spool", 1),
      pair("q2", "barbie model", "t3", "Barbie  Model doll", 5),
      pair("q2", "barbie model", "t4", "Barbie shoes", 1),
      pair("q3", "gpu", "t5", "graphics card", 5),
      pair("q3", "gpu", "t6", "fan", 1),
  };
  const EvalSplit cq = build_cq(pairs, CurationConfig{});
  const EvalSplit s = build_cq_common_str(cq);
  EXPECT_EQ(query_ids(s), std::set<std::string>{"q1"});
  EXPECT_EQ(s.corpus.size(), 2U);
  validate_split(s);
}

TEST(Alphanum, TokenRule) {
  EXPECT_TRUE(has_alphanumeric_token("S2716DG"));
  EXPECT_FALSE(has_alphanumeric_token("iphone 13"));
  EXPECT_TRUE(has_alphanumeric_token("i5 pc 1tb 16gb 8gb gpu"));
  EXPECT_FALSE(has_alphanumeric_token("2023"));
}

TEST(Subsets, InheritMembershipAndStayWithinCq) {
  GenConfig g;
  g.n_queries = 200;
  g.rng_seed = 5;
  const auto pairs = generate(g);
  const EvalSplit cq = build_cq(filter_pairs(pairs, CurationConfig{}), CurationConfig{});
  std::set<std::string> dev;
  for (const auto& q : cq.dev_queries) dev.insert(q.id);
  std::set<std::string> corpus;
  for (const auto& d : cq.corpus) corpus.insert(d.id);
  for (const EvalSplit& s : {build_cq_common_str(cq), build_cq_alphanum(cq)}) {
    validate_split(s);
    for (const auto& q : s.dev_queries) EXPECT_TRUE(dev.count(q.id));
    for (const auto& q : s.test_queries) EXPECT_FALSE(dev.count(q.id));
    for (const auto& d : s.corpus) EXPECT_TRUE(corpus.count(d.id));
  }
}

TEST(Correlations, KnownValues) {
  const std::vector<double> rel = {1, 2, 3, 4, 5};
  const std::vector<double> cen = {0, 0, 0, 1, 1};
  const Correlations c = correlations(rel, cen);
  // 3 / sqrt(12); the independent oracle below agrees.
  EXPECT_NEAR(c.pearson, 0.8660254037844386, 1e-12);
  EXPECT_NEAR(c.pearson, oracle::pearson(rel, cen), 1e-12);
  const Correlations self = correlations(rel, rel);
  EXPECT_DOUBLE_EQ(self.pearson, 1.0);
  EXPECT_DOUBLE_EQ(self.kendall, 1.0);
  EXPECT_DOUBLE_EQ(self.spearman, 1.0);
  const std::vector<double> rev = {5, 4, 3, 2, 1};
  EXPECT_DOUBLE_EQ(correlations(rel, rev).kendall, -1.0);
  EXPECT_THROW(correlations(rel, std::vector<double>(5, 1.0)), ValidationError);
  EXPECT_EQ(format_correlations(self), "pearson\t1.0000\nkendall\t1.0000\nspearman\t1.0000\n");
}

TEST(Correlations, MatchOracleWithTies) {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(60);
    std::vector<double> x(n), y(n);
    const bool discrete = rng.bernoulli(0.5);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = discrete ? static_cast<double>(1 + rng.below(5)) : rng.uniform(-3, 3);
      y[i] = discrete ? static_cast<double>(rng.below(2)) : 0.5 * x[i] + rng.uniform(-2, 2);
    }
    x[0] = 1, x[1] = 2, y[0] = 0, y[1] = 1;  // never constant
    const Correlations c = correlations(x, y);
    EXPECT_NEAR(c.pearson, oracle::pearson(x, y), 1e-9);
    EXPECT_NEAR(c.kendall, oracle::kendall_tau_b(x, y), 1e-9);
    EXPECT_NEAR(c.spearman, oracle::spearman(x, y), 1e-9);
    for (double v : {c.pearson, c.kendall, c.spearman}) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(Correlations, AverageRanks) {
  const std::vector<double> v = {10, 20, 10, 30};
  EXPECT_EQ(average_ranks(v), (std::vector<double>{1.5, 3, 1.5, 4}));
}
