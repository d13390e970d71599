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
#include <string>
#include <vector>

#include "uco/datamodel.hpp"

namespace uco {

// Accessory/part terms used to build hard negatives ("cover", "filament", ...).
std::vector<std::string> default_noise_words();

struct GenConfig {
  int n_queries = 1000;
  int titles_per_query = 6;
  double frac_common_str = 0.5;
  double frac_alphanum = 0.3;
  std::vector<std::string> noise_word_pool = default_noise_words();
  std::uint64_t rng_seed = 0;
  // Prefix for query/title ids, so separately generated sets can share a corpus.
  std::string id_prefix;
};

void validate(const GenConfig& cfg);

enum class QueryKind { kPlain, kCommonStr, kAlphanum };

// Labelled pairs with three query kinds:
//   plain      - "brand product" queries; positives contain the query string, hard negatives
//                are accessories that reuse the query words but not the contiguous string.
//   common-str - as plain, but the hard negatives contain the full query string as well.
//   alphanum   - a single model-code token; positives carry the code, hard negatives carry
//                the code with one character changed.
// Positives get relevance 4 and centrality 1, hard negatives relevance 2 and centrality 0.
std::vector<GradedPair> generate(const GenConfig& cfg);

}  // namespace uco
