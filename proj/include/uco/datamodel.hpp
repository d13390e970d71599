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
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace uco {

// One annotated (query, title) record. Relevance is the 1..5 graded scale
// (Bad..Perfect); centrality is the binary user-intent label.
struct GradedPair {
  std::string query_id;
  std::string query_text;
  std::string title_id;
  std::string title_text;
  int relevance = 1;
  int centrality = 0;

  bool operator==(const GradedPair&) const = default;
};

struct Document {
  std::string id;
  std::string text;

  bool operator==(const Document&) const = default;
};

struct Judgment {
  std::string title_id;
  int relevance = 1;
  int centrality = 0;

  bool operator==(const Judgment&) const = default;
};

// Judgments per query, each list sorted by title_id.
using Qrels = std::map<std::string, std::vector<Judgment>>;

struct EvalSplit {
  std::string name;
  std::vector<Document> corpus;
  std::vector<Document> dev_queries;
  std::vector<Document> test_queries;
  Qrels qrels;

  bool operator==(const EvalSplit&) const = default;
};

enum class QuerySet { kDev, kTest };

const std::vector<Document>& queries_of(const EvalSplit& split, QuerySet which);
QuerySet parse_query_set(std::string_view name);

struct ScoredTitle {
  std::string title_id;
  double score = 0.0;

  bool operator==(const ScoredTitle&) const = default;
};

struct QueryRanking {
  std::string query_id;
  std::vector<ScoredTitle> titles;

  bool operator==(const QueryRanking&) const = default;
};

// Ranked lists in query order. Scores are non-increasing per list.
struct RankedRun {
  std::size_t k_max = 0;
  std::vector<QueryRanking> queries;

  bool operator==(const RankedRun&) const = default;
};

// Relevance grade bounds and the positive/negative cut (strictly above / below 3).
inline constexpr int kMinGrade = 1;
inline constexpr int kMaxGrade = 5;
inline constexpr int kNeutralGrade = 3;

inline bool is_positive(int relevance) { return relevance > kNeutralGrade; }
inline bool is_negative(int relevance) { return relevance < kNeutralGrade; }

// Throws ValidationError naming the field when a text field is blank or holds a tab/newline.
void validate_text_field(std::string_view value, std::string_view what);
void validate_pair(const GradedPair& pair);

// Checks every EvalSplit invariant; throws ValidationError describing the first violation.
void validate_split(const EvalSplit& split);
void validate_run(const RankedRun& run);

std::vector<GradedPair> load_pairs(const std::filesystem::path& path);
void save_pairs(const std::vector<GradedPair>& pairs, const std::filesystem::path& path);
std::string format_pairs(const std::vector<GradedPair>& pairs);

// Split directory layout: corpus.tsv, dev_queries.tsv, test_queries.tsv, qrels.tsv.
// The split name is the directory's final component.
void save_split(const EvalSplit& split, const std::filesystem::path& dir);
EvalSplit load_split(const std::filesystem::path& dir);

// run.tsv rows: query_id, rank (1-based), title_id, score.
void save_run(const RankedRun& run, const std::filesystem::path& path);
RankedRun load_run(const std::filesystem::path& path);

// Line-level helpers shared by the TSV readers.
std::vector<std::string_view> split_tabs(std::string_view line);
int parse_int(std::string_view field, std::string_view what);
double parse_real(std::string_view field, std::string_view what);
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace uco
