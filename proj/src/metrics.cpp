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

#include "uco/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "uco/error.hpp"

namespace uco {
namespace {

double gain(int relevance, GainMode mode) {
  if (mode == GainMode::kGraded) return std::exp2(relevance) - 1.0;
  return is_positive(relevance) ? 1.0 : 0.0;
}

std::size_t hits(Ranking ranking, const RelevantSet& relevant, std::size_t k) {
  const std::size_t n = std::min(k, ranking.size());
  return static_cast<std::size_t>(std::count_if(ranking.begin(), ranking.begin() + static_cast<std::ptrdiff_t>(n),
                                                [&](const std::string& id) { return relevant.count(id) > 0; }));
}

std::size_t index_of(const std::vector<std::size_t>& cutoffs, std::size_t k) {
  auto it = std::find(cutoffs.begin(), cutoffs.end(), k);
  if (it == cutoffs.end()) throw ValidationError("cutoff " + std::to_string(k) + " not in report");
  return static_cast<std::size_t>(it - cutoffs.begin());
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

void validate(const MetricConfig& cfg) {
  if (cfg.cutoffs.empty()) throw ValidationError("at least one cutoff required");
  for (std::size_t i = 0; i < cfg.cutoffs.size(); ++i) {
    if (cfg.cutoffs[i] == 0) throw ValidationError("cutoffs must be positive");
    if (i > 0 && cfg.cutoffs[i] <= cfg.cutoffs[i - 1]) throw ValidationError("cutoffs must be strictly increasing");
  }
  if (cfg.mrr_depth < 1) throw ValidationError("mrr_depth must be at least 1");
}

RelevantSet relevant_titles(const std::vector<Judgment>& judgments) {
  RelevantSet out;
  for (const auto& j : judgments) {
    if (is_positive(j.relevance)) out.insert(j.title_id);
  }
  return out;
}

std::vector<std::string> ranked_ids(const QueryRanking& ranking) {
  std::vector<std::string> ids;
  ids.reserve(ranking.titles.size());
  for (const auto& t : ranking.titles) ids.push_back(t.title_id);
  return ids;
}

double precision_at_k(Ranking ranking, const RelevantSet& relevant, std::size_t k) {
  if (k < 1) throw ValidationError("k must be at least 1");
  return static_cast<double>(hits(ranking, relevant, k)) / static_cast<double>(k);
}

double recall_at_k(Ranking ranking, const RelevantSet& relevant, std::size_t k) {
  if (relevant.empty()) throw ValidationError("recall is undefined without relevant titles");
  return static_cast<double>(hits(ranking, relevant, k)) / static_cast<double>(relevant.size());
}

double ndcg_at_k(Ranking ranking, const std::vector<Judgment>& judgments, std::size_t k, GainMode mode) {
  std::unordered_map<std::string_view, int> grade;
  std::vector<double> gains;
  for (const auto& j : judgments) {
    grade.emplace(j.title_id, j.relevance);
    gains.push_back(gain(j.relevance, mode));
  }
  std::sort(gains.begin(), gains.end(), std::greater<>());
  double ideal = 0.0;
  for (std::size_t r = 0; r < std::min(k, gains.size()); ++r) ideal += gains[r] / std::log2(static_cast<double>(r) + 2.0);
  if (!(ideal > 0.0)) throw ValidationError("NDCG is undefined when the ideal DCG is zero");
  double dcg = 0.0;
  for (std::size_t r = 0; r < std::min(k, ranking.size()); ++r) {
    auto it = grade.find(ranking[r]);
    if (it != grade.end()) dcg += gain(it->second, mode) / std::log2(static_cast<double>(r) + 2.0);
  }
  return dcg / ideal;
}

double reciprocal_rank(Ranking ranking, const RelevantSet& relevant, std::size_t depth) {
  if (depth < 1) throw ValidationError("depth must be at least 1");
  for (std::size_t r = 0; r < std::min(depth, ranking.size()); ++r) {
    if (relevant.count(ranking[r])) return 1.0 / static_cast<double>(r + 1);
  }
  return 0.0;
}

double mrr(const RankedRun& run, const Qrels& qrels, std::size_t depth) {
  if (run.queries.empty()) return 0.0;
  double total = 0.0;
  for (const auto& q : run.queries) {
    auto it = qrels.find(q.query_id);
    if (it == qrels.end()) continue;
    total += reciprocal_rank(ranked_ids(q), relevant_titles(it->second), depth);
  }
  return total / static_cast<double>(run.queries.size());
}

double MetricReport::ndcg_at(std::size_t k) const { return ndcg[index_of(cutoffs, k)]; }
double MetricReport::precision_at(std::size_t k) const { return precision[index_of(cutoffs, k)]; }
double MetricReport::recall_at(std::size_t k) const { return recall[index_of(cutoffs, k)]; }

MetricReport aggregate(const RankedRun& run, const Qrels& qrels, const MetricConfig& cfg) {
  validate(cfg);
  MetricReport r;
  r.cutoffs = cfg.cutoffs;
  r.mrr_depth = cfg.mrr_depth;
  const std::size_t m = cfg.cutoffs.size();
  r.precision.assign(m, 0.0);
  r.recall.assign(m, 0.0);
  r.ndcg.assign(m, 0.0);
  for (const auto& q : run.queries) {
    auto it = qrels.find(q.query_id);
    if (it == qrels.end()) throw ValidationError("query '" + q.query_id + "' in run has no relevance judgments");
    const RelevantSet relevant = relevant_titles(it->second);
    if (relevant.empty()) {
      ++r.n_excluded;
      continue;
    }
    const auto ids = ranked_ids(q);
    for (std::size_t c = 0; c < m; ++c) {
      r.precision[c] += precision_at_k(ids, relevant, cfg.cutoffs[c]);
      r.recall[c] += recall_at_k(ids, relevant, cfg.cutoffs[c]);
      r.ndcg[c] += ndcg_at_k(ids, it->second, cfg.cutoffs[c], cfg.gain_mode);
    }
    r.mrr += reciprocal_rank(ids, relevant, cfg.mrr_depth);
    ++r.n_queries;
  }
  if (r.n_queries > 0) {
    const auto n = static_cast<double>(r.n_queries);
    for (std::size_t c = 0; c < m; ++c) {
      r.precision[c] /= n;
      r.recall[c] /= n;
      r.ndcg[c] /= n;
    }
    r.mrr /= n;
  }
  return r;
}

std::vector<std::string> report_columns(const MetricReport& r) {
  std::vector<std::string> cols;
  for (auto k : r.cutoffs) cols.push_back("P@" + std::to_string(k));
  for (auto k : r.cutoffs) cols.push_back("R@" + std::to_string(k));
  for (auto k : r.cutoffs) cols.push_back("NDCG@" + std::to_string(k));
  cols.push_back("MRR@" + std::to_string(r.mrr_depth));
  return cols;
}

std::vector<double> report_numbers(const MetricReport& r) {
  std::vector<double> v;
  for (double p : r.precision) v.push_back(100.0 * p);
  for (double x : r.recall) v.push_back(100.0 * x);
  for (double x : r.ndcg) v.push_back(x);
  v.push_back(r.mrr);
  return v;
}

std::vector<std::string> report_values(const MetricReport& r) {
  std::vector<std::string> out;
  const auto nums = report_numbers(r);
  const std::size_t pr = 2 * r.cutoffs.size();
  for (std::size_t i = 0; i < nums.size(); ++i) out.push_back(fixed(nums[i], i < pr ? 2 : 4));
  return out;
}

std::string format_report_tsv(const MetricReport& r) {
  std::string out;
  const auto cols = report_columns(r);
  const auto vals = report_values(r);
  for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "\t" : "") + cols[i];
  out += '\n';
  for (std::size_t i = 0; i < vals.size(); ++i) out += (i ? "\t" : "") + vals[i];
  out += '\n';
  return out;
}

}  // namespace uco
