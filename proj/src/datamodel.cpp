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

#include "uco/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "uco/error.hpp"

namespace uco {
namespace {

namespace fs = std::filesystem;

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); });
}

[[noreturn]] void fail_at(const fs::path& path, std::size_t line, const std::string& what) {
  throw ValidationError(path.string() + ":" + std::to_string(line) + ": " + what);
}

// Calls fn(line_number, fields) for every line; wraps field errors with the location.
template <typename Fn>
void for_each_row(const fs::path& path, std::size_t expected_fields, Fn&& fn) {
  const std::string contents = read_file(path);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < contents.size()) {
    std::size_t end = contents.find('\n', pos);
    if (end == std::string::npos) end = contents.size();
    std::string_view line(contents.data() + pos, end - pos);
    pos = end + 1;
    ++line_no;
    auto fields = split_tabs(line);
    if (fields.size() != expected_fields) {
      fail_at(path, line_no, "expected " + std::to_string(expected_fields) + " tab-separated fields, got " +
                                 std::to_string(fields.size()));
    }
    try {
      fn(line_no, fields);
    } catch (const ValidationError& e) {
      fail_at(path, line_no, e.what());
    }
  }
}

std::vector<Document> load_documents(const fs::path& path, std::string_view what) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  for_each_row(path, 2, [&](std::size_t, const std::vector<std::string_view>& f) {
    validate_text_field(f[0], std::string(what) + " id");
    validate_text_field(f[1], std::string(what) + " text");
    if (!seen.emplace(f[0]).second) throw ValidationError("duplicate " + std::string(what) + " id '" + std::string(f[0]) + "'");
    docs.push_back({std::string(f[0]), std::string(f[1])});
  });
  return docs;
}

std::string format_documents(const std::vector<Document>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += d.id;
    out += '\t';
    out += d.text;
    out += '\n';
  }
  return out;
}

void check_grades(int relevance, int centrality) {
  if (relevance < kMinGrade || relevance > kMaxGrade) {
    throw ValidationError("grade out of range: " + std::to_string(relevance));
  }
  if (centrality != 0 && centrality != 1) {
    throw ValidationError("centrality must be 0 or 1, got " + std::to_string(centrality));
  }
}

}  // namespace

const std::vector<Document>& queries_of(const EvalSplit& split, QuerySet which) {
  return which == QuerySet::kDev ? split.dev_queries : split.test_queries;
}

QuerySet parse_query_set(std::string_view name) {
  if (name == "dev") return QuerySet::kDev;
  if (name == "test") return QuerySet::kTest;
  throw ValidationError("query set must be 'dev' or 'test', got '" + std::string(name) + "'");
}

void validate_text_field(std::string_view value, std::string_view what) {
  if (value.find_first_of("\t\n") != std::string_view::npos) {
    throw ValidationError(std::string(what) + " contains a tab or newline");
  }
  if (is_blank(value)) throw ValidationError(std::string(what) + " is empty");
}

void validate_pair(const GradedPair& pair) {
  validate_text_field(pair.query_id, "query_id");
  validate_text_field(pair.query_text, "query_text");
  validate_text_field(pair.title_id, "title_id");
  validate_text_field(pair.title_text, "title_text");
  check_grades(pair.relevance, pair.centrality);
}

void validate_split(const EvalSplit& split) {
  if (split.corpus.empty()) throw ValidationError("split '" + split.name + "': empty corpus");
  std::unordered_set<std::string> corpus_ids;
  for (const auto& d : split.corpus) {
    validate_text_field(d.id, "title_id");
    validate_text_field(d.text, "title_text");
    if (!corpus_ids.insert(d.id).second) {
      throw ValidationError("split '" + split.name + "': duplicate corpus title_id '" + d.id + "'");
    }
  }
  std::unordered_set<std::string> dev_ids;
  for (const auto& q : split.dev_queries) {
    validate_text_field(q.id, "query_id");
    validate_text_field(q.text, "query_text");
    if (!dev_ids.insert(q.id).second) throw ValidationError("duplicate dev query '" + q.id + "'");
  }
  std::unordered_set<std::string> test_ids;
  for (const auto& q : split.test_queries) {
    validate_text_field(q.id, "query_id");
    validate_text_field(q.text, "query_text");
    if (dev_ids.count(q.id)) throw ValidationError("query '" + q.id + "' is in both dev and test queries");
    if (!test_ids.insert(q.id).second) throw ValidationError("duplicate test query '" + q.id + "'");
  }
  for (const auto& [qid, judgments] : split.qrels) {
    std::set<std::string_view> seen;
    for (const auto& j : judgments) {
      check_grades(j.relevance, j.centrality);
      if (!corpus_ids.count(j.title_id)) {
        throw ValidationError("split '" + split.name + "': qrels title '" + j.title_id + "' of query '" + qid +
                              "' is not in the corpus");
      }
      if (!seen.insert(j.title_id).second) {
        throw ValidationError("duplicate qrel (" + qid + ", " + j.title_id + ")");
      }
    }
  }
  auto check_query = [&](const Document& q) {
    auto it = split.qrels.find(q.id);
    const bool ok = it != split.qrels.end() &&
                    std::any_of(it->second.begin(), it->second.end(), [](const Judgment& j) { return is_positive(j.relevance); }) &&
                    std::any_of(it->second.begin(), it->second.end(), [](const Judgment& j) { return is_negative(j.relevance); });
    if (!ok) {
      throw ValidationError("split '" + split.name + "': query '" + q.id + "' lacks a positive or a negative judgment");
    }
  };
  std::for_each(split.dev_queries.begin(), split.dev_queries.end(), check_query);
  std::for_each(split.test_queries.begin(), split.test_queries.end(), check_query);
}

void validate_run(const RankedRun& run) {
  for (const auto& q : run.queries) {
    if (q.titles.size() > run.k_max) {
      throw ValidationError("run list for '" + q.query_id + "' is longer than k_max");
    }
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < q.titles.size(); ++i) {
      if (!seen.insert(q.titles[i].title_id).second) {
        throw ValidationError("run list for '" + q.query_id + "' repeats title '" + q.titles[i].title_id + "'");
      }
      if (i > 0 && q.titles[i].score > q.titles[i - 1].score) {
        throw ValidationError("run list for '" + q.query_id + "' has increasing scores at rank " + std::to_string(i + 1));
      }
    }
  }
}

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

int parse_int(std::string_view field, std::string_view what) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw ValidationError("non-integer " + std::string(what) + " '" + std::string(field) + "'");
  }
  return value;
}

double parse_real(std::string_view field, std::string_view what) {
  // from_chars for double is unavailable in older libstdc++; strtod on a copy.
  std::string copy(field);
  char* end = nullptr;
  const double value = std::strtod(copy.c_str(), &end);
  if (copy.empty() || end != copy.c_str() + copy.size()) {
    throw ValidationError("non-numeric " + std::string(what) + " '" + copy + "'");
  }
  return value;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot write '" + path.string() + "'");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw RuntimeError("write failed for '" + path.string() + "'");
}

std::vector<GradedPair> load_pairs(const fs::path& path) {
  std::vector<GradedPair> pairs;
  std::set<std::pair<std::string, std::string>> keys;
  for_each_row(path, 6, [&](std::size_t, const std::vector<std::string_view>& f) {
    GradedPair p{std::string(f[0]), std::string(f[1]), std::string(f[2]), std::string(f[3]),
                 parse_int(f[4], "relevance grade"), parse_int(f[5], "centrality")};
    validate_pair(p);
    if (!keys.emplace(p.query_id, p.title_id).second) {
      throw ValidationError("duplicate pair (" + p.query_id + ", " + p.title_id + ")");
    }
    pairs.push_back(std::move(p));
  });
  return pairs;
}

std::string format_pairs(const std::vector<GradedPair>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    validate_pair(p);
    out += p.query_id + '\t' + p.query_text + '\t' + p.title_id + '\t' + p.title_text + '\t' +
           std::to_string(p.relevance) + '\t' + std::to_string(p.centrality) + '\n';
  }
  return out;
}

void save_pairs(const std::vector<GradedPair>& pairs, const fs::path& path) {
  write_file(path, format_pairs(pairs));
}

void save_split(const EvalSplit& split, const fs::path& dir) {
  validate_split(split);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create directory '" + dir.string() + "': " + ec.message());
  write_file(dir / "corpus.tsv", format_documents(split.corpus));
  write_file(dir / "dev_queries.tsv", format_documents(split.dev_queries));
  write_file(dir / "test_queries.tsv", format_documents(split.test_queries));
  std::string qrels;
  for (const auto& [qid, judgments] : split.qrels) {
    for (const auto& j : judgments) {
      qrels += qid + '\t' + j.title_id + '\t' + std::to_string(j.relevance) + '\t' + std::to_string(j.centrality) + '\n';
    }
  }
  write_file(dir / "qrels.tsv", qrels);
}

EvalSplit load_split(const fs::path& dir) {
  EvalSplit split;
  split.name = fs::path(dir).lexically_normal().filename().string();
  if (split.name.empty()) split.name = fs::path(dir).lexically_normal().parent_path().filename().string();
  split.corpus = load_documents(dir / "corpus.tsv", "title");
  split.dev_queries = load_documents(dir / "dev_queries.tsv", "query");
  split.test_queries = load_documents(dir / "test_queries.tsv", "query");
  for_each_row(dir / "qrels.tsv", 4, [&](std::size_t, const std::vector<std::string_view>& f) {
    validate_text_field(f[0], "query_id");
    validate_text_field(f[1], "title_id");
    split.qrels[std::string(f[0])].push_back(
        {std::string(f[1]), parse_int(f[2], "relevance grade"), parse_int(f[3], "centrality")});
  });
  for (auto& [qid, judgments] : split.qrels) {
    std::sort(judgments.begin(), judgments.end(), [](const Judgment& a, const Judgment& b) { return a.title_id < b.title_id; });
  }
  validate_split(split);
  return split;
}

void save_run(const RankedRun& run, const fs::path& path) {
  validate_run(run);
  std::string out;
  char buf[64];
  for (const auto& q : run.queries) {
    for (std::size_t r = 0; r < q.titles.size(); ++r) {
      std::snprintf(buf, sizeof buf, "%.17g", q.titles[r].score);
      out += q.query_id + '\t' + std::to_string(r + 1) + '\t' + q.titles[r].title_id + '\t' + buf + '\n';
    }
  }
  write_file(path, out);
}

RankedRun load_run(const fs::path& path) {
  RankedRun run;
  for_each_row(path, 4, [&](std::size_t, const std::vector<std::string_view>& f) {
    validate_text_field(f[0], "query_id");
    validate_text_field(f[2], "title_id");
    const int rank = parse_int(f[1], "rank");
    if (run.queries.empty() || run.queries.back().query_id != f[0]) {
      for (const auto& q : run.queries) {
        if (q.query_id == f[0]) throw ValidationError("rows of query '" + std::string(f[0]) + "' are not contiguous");
      }
      run.queries.push_back({std::string(f[0]), {}});
    }
    auto& titles = run.queries.back().titles;
    if (rank != static_cast<int>(titles.size()) + 1) {
      throw ValidationError("expected rank " + std::to_string(titles.size() + 1) + ", got " + std::to_string(rank));
    }
    titles.push_back({std::string(f[2]), parse_real(f[3], "score")});
    if (titles.size() > 1 && titles.back().score > titles[titles.size() - 2].score) {
      throw ValidationError("scores increase at rank " + std::to_string(rank));
    }
    run.k_max = std::max(run.k_max, titles.size());
  });
  validate_run(run);
  return run;
}

}  // namespace uco
