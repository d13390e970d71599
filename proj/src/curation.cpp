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

#include "uco/curation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "uco/error.hpp"
#include "uco/random.hpp"

namespace uco {
namespace {

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

struct QueryGroup {
  std::string text;
  std::vector<Judgment> judgments;
};

EvalSplit restrict_to(const EvalSplit& cq, const std::set<std::string>& kept, std::string name) {
  EvalSplit out;
  out.name = std::move(name);
  std::unordered_set<std::string> titles;
  for (const auto& [qid, judgments] : cq.qrels) {
    if (!kept.count(qid)) continue;
    out.qrels[qid] = judgments;
    for (const auto& j : judgments) titles.insert(j.title_id);
  }
  for (const auto& d : cq.corpus) {
    if (titles.count(d.id)) out.corpus.push_back(d);
  }
  for (const auto& q : cq.dev_queries) {
    if (kept.count(q.id)) out.dev_queries.push_back(q);
  }
  for (const auto& q : cq.test_queries) {
    if (kept.count(q.id)) out.test_queries.push_back(q);
  }
  return out;
}

std::vector<const Document*> all_queries(const EvalSplit& split) {
  std::vector<const Document*> qs;
  for (const auto& q : split.dev_queries) qs.push_back(&q);
  for (const auto& q : split.test_queries) qs.push_back(&q);
  return qs;
}

}  // namespace

void validate(const CurationConfig& cfg) {
  if (cfg.negative_threshold > cfg.positive_threshold) {
    throw ValidationError("negative_threshold must not exceed positive_threshold");
  }
  if (cfg.negative_threshold > kNeutralGrade || cfg.positive_threshold < kNeutralGrade) {
    throw ValidationError("thresholds must bracket grade 3 so curated splits agree with the metric relevance cut");
  }
  if (!(cfg.dev_fraction > 0.0 && cfg.dev_fraction < 1.0)) throw ValidationError("dev_fraction must lie in (0, 1)");
}

double ascii_printable_ratio(std::string_view text) {
  std::size_t code_points = 0;
  std::size_t printable = 0;
  for (unsigned char c : text) {
    if ((c & 0xC0) == 0x80) continue;  // continuation byte
    ++code_points;
    if (c >= 0x20 && c <= 0x7E) ++printable;
  }
  return code_points == 0 ? 0.0 : static_cast<double>(printable) / static_cast<double>(code_points);
}

std::string normalize_for_match(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
  }
  return out;
}

bool has_alphanumeric_token(std::string_view text) {
  bool letter = false;
  bool digit = false;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    const unsigned char c = i < text.size() ? static_cast<unsigned char>(text[i]) : ' ';
    if (is_space(c)) {
      if (letter && digit) return true;
      letter = digit = false;
      continue;
    }
    letter = letter || (c < 0x80 && std::isalpha(c));
    digit = digit || (c < 0x80 && std::isdigit(c));
  }
  return false;
}

std::vector<GradedPair> filter_pairs(const std::vector<GradedPair>& pairs, const CurationConfig& cfg) {
  validate(cfg);
  std::vector<GradedPair> out;
  std::set<std::pair<std::string_view, std::string_view>> seen;
  for (const auto& p : pairs) {
    const bool graded = p.relevance > cfg.positive_threshold || p.relevance < cfg.negative_threshold;
    if (!graded) continue;
    if (cfg.english_filter && (ascii_printable_ratio(p.query_text) < cfg.min_ascii_ratio ||
                               ascii_printable_ratio(p.title_text) < cfg.min_ascii_ratio)) {
      continue;
    }
    if (!seen.emplace(p.query_id, p.title_id).second) continue;
    out.push_back(p);
  }
  return out;
}

EvalSplit build_cq(const std::vector<GradedPair>& pairs, const CurationConfig& cfg) {
  validate(cfg);
  std::map<std::string, QueryGroup> groups;
  std::map<std::string, std::string> titles;
  for (const auto& p : pairs) {
    if (!(p.relevance > cfg.positive_threshold || p.relevance < cfg.negative_threshold)) continue;
    auto& g = groups[p.query_id];
    if (g.text.empty()) {
      g.text = p.query_text;
    } else if (g.text != p.query_text) {
      throw ValidationError("query '" + p.query_id + "' appears with two different texts");
    }
    auto [it, inserted] = titles.emplace(p.title_id, p.title_text);
    if (!inserted && it->second != p.title_text) {
      throw ValidationError("title '" + p.title_id + "' appears with two different texts");
    }
    if (std::none_of(g.judgments.begin(), g.judgments.end(), [&](const Judgment& j) { return j.title_id == p.title_id; })) {
      g.judgments.push_back({p.title_id, p.relevance, p.centrality});
    }
  }

  EvalSplit split;
  split.name = "CQ";
  std::vector<std::string> kept;
  std::set<std::string> used_titles;
  for (auto& [qid, g] : groups) {
    const bool has_pos = std::any_of(g.judgments.begin(), g.judgments.end(),
                                     [&](const Judgment& j) { return j.relevance > cfg.positive_threshold; });
    const bool has_neg = std::any_of(g.judgments.begin(), g.judgments.end(),
                                     [&](const Judgment& j) { return j.relevance < cfg.negative_threshold; });
    if (!has_pos || !has_neg) continue;
    std::sort(g.judgments.begin(), g.judgments.end(),
              [](const Judgment& a, const Judgment& b) { return a.title_id < b.title_id; });
    for (const auto& j : g.judgments) used_titles.insert(j.title_id);
    split.qrels[qid] = g.judgments;
    kept.push_back(qid);
  }
  if (kept.empty()) throw ValidationError("no query has both a positive and a negative title");

  for (const auto& tid : used_titles) split.corpus.push_back({tid, titles.at(tid)});

  // kept is sorted by query_id (map order); permute with the seed, first share goes to dev.
  Rng rng(derive_seed(cfg.rng_seed, "dev_test_partition"));
  rng.shuffle(std::span<std::string>(kept));
  const auto n_dev = static_cast<std::size_t>(std::llround(cfg.dev_fraction * static_cast<double>(kept.size())));
  std::vector<std::string> dev(kept.begin(), kept.begin() + static_cast<std::ptrdiff_t>(n_dev));
  std::vector<std::string> test(kept.begin() + static_cast<std::ptrdiff_t>(n_dev), kept.end());
  std::sort(dev.begin(), dev.end());
  std::sort(test.begin(), test.end());
  for (const auto& q : dev) split.dev_queries.push_back({q, groups.at(q).text});
  for (const auto& q : test) split.test_queries.push_back({q, groups.at(q).text});
  return split;
}

EvalSplit build_cq_balanced(const EvalSplit& cq, std::uint64_t rng_seed) {
  EvalSplit out = cq;
  out.name = "CQ-balanced";
  std::unordered_set<std::string> titles;
  for (auto& [qid, judgments] : out.qrels) {
    std::vector<Judgment> pos;
    std::vector<Judgment> neg;
    for (const auto& j : judgments) {
      if (is_positive(j.relevance)) pos.push_back(j);
      else if (is_negative(j.relevance)) neg.push_back(j);
    }
    auto& major = pos.size() > neg.size() ? pos : neg;
    const std::size_t keep = std::min(pos.size(), neg.size());
    if (major.size() > keep && keep > 0) {
      // Per-query stream: the draw does not depend on iteration order or other queries.
      Rng rng(derive_seed(derive_seed(rng_seed, "balance"), fnv1a(qid)));
      rng.shuffle(std::span<Judgment>(major));
      major.resize(keep);
    }
    judgments.clear();
    judgments.insert(judgments.end(), pos.begin(), pos.end());
    judgments.insert(judgments.end(), neg.begin(), neg.end());
    std::sort(judgments.begin(), judgments.end(), [](const Judgment& a, const Judgment& b) { return a.title_id < b.title_id; });
    for (const auto& j : judgments) titles.insert(j.title_id);
  }
  std::erase_if(out.corpus, [&](const Document& d) { return !titles.count(d.id); });
  return out;
}

EvalSplit build_cq_common_str(const EvalSplit& cq) {
  std::unordered_map<std::string_view, std::string> normalized_titles;
  for (const auto& d : cq.corpus) normalized_titles.emplace(d.id, normalize_for_match(d.text));
  std::set<std::string> kept;
  for (const Document* q : all_queries(cq)) {
    const std::string needle = normalize_for_match(q->text);
    bool in_pos = false;
    bool in_neg = false;
    auto it = cq.qrels.find(q->id);
    if (it == cq.qrels.end()) continue;
    for (const auto& j : it->second) {
      const bool contains = normalized_titles.at(j.title_id).find(needle) != std::string::npos;
      in_pos = in_pos || (contains && is_positive(j.relevance));
      in_neg = in_neg || (contains && is_negative(j.relevance));
    }
    if (in_pos && in_neg) kept.insert(q->id);
  }
  if (kept.empty()) throw ValidationError("no query string occurs in both a positive and a negative title");
  return restrict_to(cq, kept, "CQ-common-str");
}

EvalSplit build_cq_alphanum(const EvalSplit& cq) {
  std::set<std::string> kept;
  for (const Document* q : all_queries(cq)) {
    if (has_alphanumeric_token(q->text)) kept.insert(q->id);
  }
  if (kept.empty()) throw ValidationError("no query contains a token mixing letters and digits");
  return restrict_to(cq, kept, "CQ-alphanum");
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Centered sums are formed as n*x - sum(x), which is exact for integer-valued data,
// so perfectly linear integer series come out at exactly +/-1.
double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double sx = std::accumulate(x.begin(), x.end(), 0.0);
  const double sy = std::accumulate(y.begin(), y.end(), 0.0);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = n * x[i] - sx;
    const double dy = n * y[i] - sy;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// Sum of t(t-1)/2 over runs of equal keys; equal keys must be contiguous.
template <typename Eq>
double tied_pairs(std::size_t n, Eq&& equal) {
  double ties = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && equal(i, j)) ++j;
    const double t = static_cast<double>(j - i);
    ties += t * (t - 1.0) / 2.0;
    i = j;
  }
  return ties;
}

// Knight's algorithm: sort by (x, y), then count inversions of y with a merge sort.
double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });
  const double x_ties = tied_pairs(n, [&](std::size_t i, std::size_t j) { return x[order[i]] == x[order[j]]; });
  const double joint_ties = tied_pairs(n, [&](std::size_t i, std::size_t j) {
    return x[order[i]] == x[order[j]] && y[order[i]] == y[order[j]];
  });

  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> buffer(n);
  double swaps = 0.0;
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo;
      std::size_t j = mid;
      std::size_t k = lo;
      while (i < mid && j < hi) {
        if (ys[j] < ys[i]) {
          swaps += static_cast<double>(mid - i);
          buffer[k++] = ys[j++];
        } else {
          buffer[k++] = ys[i++];
        }
      }
      while (i < mid) buffer[k++] = ys[i++];
      while (j < hi) buffer[k++] = ys[j++];
    }
    std::swap(ys, buffer);
  }
  const double y_ties = tied_pairs(n, [&](std::size_t i, std::size_t j) { return ys[i] == ys[j]; });
  const double total = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
  const double concordant_minus_discordant = total - x_ties - y_ties + joint_ties - 2.0 * swaps;
  return std::clamp(concordant_minus_discordant / std::sqrt((total - x_ties) * (total - y_ties)), -1.0, 1.0);
}

}  // namespace

Correlations correlations(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ValidationError("correlation series differ in length");
  if (x.size() < 2) throw ValidationError("correlation needs at least two observations");
  auto constant = [](std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double e) { return e == v.front(); });
  };
  if (constant(x) || constant(y)) throw ValidationError("correlation is undefined for a constant series");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return {pearson(x, y), kendall_tau_b(x, y), pearson(rx, ry)};
}

Correlations correlation_stats(const std::vector<GradedPair>& pairs) {
  std::vector<double> relevance;
  std::vector<double> centrality;
  for (const auto& p : pairs) {
    relevance.push_back(p.relevance);
    centrality.push_back(p.centrality);
  }
  return correlations(relevance, centrality);
}

std::string format_correlations(const Correlations& c) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "pearson\t%.4f\nkendall\t%.4f\nspearman\t%.4f\n", c.pearson, c.kendall, c.spearman);
  return buf;
}

}  // namespace uco
