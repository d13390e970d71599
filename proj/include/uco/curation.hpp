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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "uco/datamodel.hpp"

namespace uco {

struct CurationConfig {
  // relevance > positive_threshold is a positive, relevance < negative_threshold a negative.
  int positive_threshold = kNeutralGrade;
  int negative_threshold = kNeutralGrade;
  double dev_fraction = 0.8;
  std::uint64_t rng_seed = 0;
  bool english_filter = true;
  // Minimum share of printable-ASCII code points for the English heuristic.
  double min_ascii_ratio = 0.9;
};

void validate(const CurationConfig& cfg);

// Share of code points in the printable ASCII range [0x20, 0x7e]. Invalid UTF-8 bytes count as non-ASCII.
double ascii_printable_ratio(std::string_view text);

// Lowercase (ASCII) with whitespace runs collapsed to one space and the ends trimmed.
std::string normalize_for_match(std::string_view text);

// True when some whitespace token holds at least one ASCII letter and one digit.
bool has_alphanumeric_token(std::string_view text);

std::vector<GradedPair> filter_pairs(const std::vector<GradedPair>& pairs, const CurationConfig& cfg);

// Common Queries: queries with at least one positive and one negative title.
EvalSplit build_cq(const std::vector<GradedPair>& pairs, const CurationConfig& cfg);
EvalSplit build_cq_balanced(const EvalSplit& cq, std::uint64_t rng_seed);
EvalSplit build_cq_common_str(const EvalSplit& cq);
EvalSplit build_cq_alphanum(const EvalSplit& cq);

struct Correlations {
  double pearson = 0.0;
  double kendall = 0.0;
  double spearman = 0.0;
};

// Pearson r, Kendall tau-b (O(n log n)) and Spearman rho with average ranks for ties.
Correlations correlations(std::span<const double> x, std::span<const double> y);
Correlations correlation_stats(const std::vector<GradedPair>& pairs);
std::string format_correlations(const Correlations& c);

// Average (fractional) ranks, 1-based.
std::vector<double> average_ranks(std::span<const double> values);

}  // namespace uco
