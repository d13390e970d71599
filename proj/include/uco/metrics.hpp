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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "uco/datamodel.hpp"

namespace uco {

enum class GainMode { kBinary, kGraded };

struct MetricConfig {
  std::vector<std::size_t> cutoffs = {3, 5, 10};
  std::size_t mrr_depth = 10;
  GainMode gain_mode = GainMode::kBinary;
};

void validate(const MetricConfig& cfg);

using RelevantSet = std::unordered_set<std::string>;
using Ranking = std::span<const std::string>;

// Titles with relevance > 3.
RelevantSet relevant_titles(const std::vector<Judgment>& judgments);
std::vector<std::string> ranked_ids(const QueryRanking& ranking);

// |top-k ∩ relevant| / k, even when fewer than k titles were retrieved.
double precision_at_k(Ranking ranking, const RelevantSet& relevant, std::size_t k);
// |top-k ∩ relevant| / |relevant|; relevant must be non-empty.
double recall_at_k(Ranking ranking, const RelevantSet& relevant, std::size_t k);
// DCG@k over log2(rank + 1) discounts, normalized by the ideal ordering of the judgments.
// Binary gain is 1 for relevance > 3; graded gain is 2^relevance - 1.
double ndcg_at_k(Ranking ranking, const std::vector<Judgment>& judgments, std::size_t k, GainMode mode = GainMode::kBinary);
// 1 / rank of the first relevant title within depth, else 0.
double reciprocal_rank(Ranking ranking, const RelevantSet& relevant, std::size_t depth);
// Mean reciprocal rank over the run's queries; queries absent from qrels count as 0.
double mrr(const RankedRun& run, const Qrels& qrels, std::size_t depth);

// Macro averages over queries with at least one relevant title.
struct MetricReport {
  std::vector<std::size_t> cutoffs;
  std::vector<double> precision;
  std::vector<double> recall;
  std::vector<double> ndcg;
  std::size_t mrr_depth = 10;
  double mrr = 0.0;
  std::size_t n_queries = 0;
  std::size_t n_excluded = 0;

  double ndcg_at(std::size_t k) const;
  double precision_at(std::size_t k) const;
  double recall_at(std::size_t k) const;
};

MetricReport aggregate(const RankedRun& run, const Qrels& qrels, const MetricConfig& cfg = {});

// Column names and values in report order: P@k..., R@k..., NDCG@k..., MRR@depth.
// P/R print as percentages with 2 decimals, NDCG/MRR as 4-decimal fractions.
std::vector<std::string> report_columns(const MetricReport& r);
std::vector<std::string> report_values(const MetricReport& r);
std::vector<double> report_numbers(const MetricReport& r);
std::string format_report_tsv(const MetricReport& r);

}  // namespace uco
