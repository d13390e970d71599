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

// Slow, direct re-implementations used as test oracles. They share no code with
// the library beyond the record types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "uco/datamodel.hpp"

namespace oracle {

inline bool relevant(int rel) { return rel >= 4; }

inline std::map<std::string, int> grade_map(const std::vector<uco::Judgment>& js) {
  std::map<std::string, int> m;
  for (const auto& j : js) m[j.title_id] = j.relevance;
  return m;
}

inline double precision(const std::vector<std::string>& ranking, const std::vector<uco::Judgment>& js, std::size_t k) {
  const auto g = grade_map(js);
  double hits = 0;
  for (std::size_t i = 0; i < ranking.size() && i < k; ++i) {
    auto it = g.find(ranking[i]);
    if (it != g.end() && relevant(it->second)) hits += 1;
  }
  return hits / static_cast<double>(k);
}

inline double recall(const std::vector<std::string>& ranking, const std::vector<uco::Judgment>& js, std::size_t k) {
  const auto g = grade_map(js);
  double total = 0;
  for (const auto& [id, rel] : g) total += relevant(rel) ? 1 : 0;
  double hits = 0;
  for (std::size_t i = 0; i < ranking.size() && i < k; ++i) {
    auto it = g.find(ranking[i]);
    if (it != g.end() && relevant(it->second)) hits += 1;
  }
  return hits / total;
}

inline double gain(int rel, bool graded) {
  if (graded) return std::pow(2.0, rel) - 1.0;
  return relevant(rel) ? 1.0 : 0.0;
}

inline double ndcg(const std::vector<std::string>& ranking, const std::vector<uco::Judgment>& js, std::size_t k,
                   bool graded) {
  const auto g = grade_map(js);
  double dcg = 0;
  for (std::size_t i = 0; i < ranking.size() && i < k; ++i) {
    auto it = g.find(ranking[i]);
    if (it == g.end()) continue;
    dcg += gain(it->second, graded) / std::log2(static_cast<double>(i) + 2.0);
  }
  std::vector<double> gains;
  for (const auto& [id, rel] : g) gains.push_back(gain(rel, graded));
  std::sort(gains.rbegin(), gains.rend());
  double ideal = 0;
  for (std::size_t i = 0; i < gains.size() && i < k; ++i) ideal += gains[i] / std::log2(static_cast<double>(i) + 2.0);
  return dcg / ideal;
}

inline double reciprocal_rank(const std::vector<std::string>& ranking, const std::vector<uco::Judgment>& js,
                              std::size_t depth) {
  const auto g = grade_map(js);
  for (std::size_t i = 0; i < ranking.size() && i < depth; ++i) {
    auto it = g.find(ranking[i]);
    if (it != g.end() && relevant(it->second)) return 1.0 / static_cast<double>(i + 1);
  }
  return 0.0;
}

// Every (score, id) pair sorted by score descending, then id ascending; first k.
inline std::vector<std::pair<std::string, double>> full_sort_top_k(const std::vector<double>& scores,
                                                                     const std::vector<std::string>& ids,
                                                                     std::size_t k) {
  std::vector<std::pair<std::string, double>> all;
  for (std::size_t i = 0; i < scores.size(); ++i) all.emplace_back(ids[i], std::clamp(scores[i], -1.0, 1.0));
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (all.size() > k) all.resize(k);
  return all;
}

// Two-pass textbook Pearson.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Quadratic tau-b straight from the pair counts.
inline double kendall_tau_b(const std::vector<double>& x, const std::vector<double>& y) {
  double concordant = 0, discordant = 0, ties_x = 0, ties_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ties_x += 1;
      } else if (dy == 0) {
        ties_y += 1;
      } else if ((dx > 0) == (dy > 0)) {
        concordant += 1;
      } else {
        discordant += 1;
      }
    }
  }
  return (concordant - discordant) / std::sqrt((concordant + discordant + ties_x) * (concordant + discordant + ties_y));
}

// Average ranks by counting: rank = #smaller + (#equal + 1) / 2.
inline std::vector<double> midranks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) less += 1;
      if (w == v[i]) equal += 1;
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  return pearson(midranks(x), midranks(y));
}

}  // namespace oracle
