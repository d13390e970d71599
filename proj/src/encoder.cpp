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

#include "uco/encoder.hpp"

#include <bit>
#include <cstring>
#include <type_traits>
#include <fstream>
#include <unordered_set>

namespace uco {
namespace {

constexpr char kMagic[8] = {'U', 'C', 'O', 'C', 'K', 'P', 'T', '1'};
constexpr char kWholeTokenTag = '\x01';

bool is_space(unsigned char c) { return c == ' ' || (c >= '\t' && c <= '\r'); }

std::vector<std::string> tokens_of(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_space(c)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current += static_cast<char>(c < 0x80 ? std::tolower(c) : c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

// Byte offsets of UTF-8 code point starts, plus the end offset.
std::vector<std::size_t> code_point_offsets(std::string_view s) {
  std::vector<std::size_t> offsets;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) offsets.push_back(i);
  }
  offsets.push_back(s.size());
  return offsets;
}

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_integral_v<T>);
  for (std::size_t i = 0; i < sizeof(T); ++i) out += static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xFF);
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw ValidationError("checkpoint header truncated");
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  pos += sizeof(T);
  return static_cast<T>(v);
}

}  // namespace

void validate(const FeaturizerConfig& cfg) {
  if (cfg.ngram_min < 1 || cfg.ngram_min > cfg.ngram_max) throw ValidationError("need 1 <= ngram_min <= ngram_max");
  if (cfg.n_buckets < 2 || !std::has_single_bit(cfg.n_buckets)) {
    throw ValidationError("n_buckets must be a power of two >= 2");
  }
  if (cfg.n_buckets > (std::uint64_t{1} << 32)) throw ValidationError("n_buckets must fit a 32-bit feature id");
}

std::vector<std::string> feature_strings(std::string_view text, const FeaturizerConfig& cfg) {
  std::vector<std::string> features;
  for (const auto& token : tokens_of(text)) {
    const std::string marked = "<" + token + ">";
    const auto offsets = code_point_offsets(marked);
    const std::size_t n_chars = offsets.size() - 1;
    for (int n = cfg.ngram_min; n <= cfg.ngram_max; ++n) {
      const auto len = static_cast<std::size_t>(n);
      for (std::size_t start = 0; start + len <= n_chars; ++start) {
        features.push_back(marked.substr(offsets[start], offsets[start + len] - offsets[start]));
      }
    }
    if (cfg.include_whole_tokens) features.push_back(kWholeTokenTag + marked);
  }
  return features;
}

FeatureId hash_feature(std::string_view feature, const FeaturizerConfig& cfg) {
  const std::uint64_t h = fnv1a(feature, kFnvOffset ^ splitmix64(cfg.hash_seed));
  return static_cast<FeatureId>(splitmix64(h) & (cfg.n_buckets - 1));
}

std::vector<FeatureId> featurize(std::string_view text, const FeaturizerConfig& cfg) {
  const auto strings = feature_strings(text, cfg);
  if (strings.empty()) throw ValidationError("text is empty after normalization");
  std::vector<FeatureId> ids;
  ids.reserve(strings.size());
  for (const auto& s : strings) ids.push_back(hash_feature(s, cfg));
  return ids;
}

double collision_rate(const std::vector<std::string>& texts, const FeaturizerConfig& cfg) {
  std::unordered_set<std::string> distinct;
  for (const auto& t : texts) {
    for (auto& f : feature_strings(t, cfg)) distinct.insert(std::move(f));
  }
  if (distinct.empty()) return 0.0;
  std::unordered_set<FeatureId> buckets;
  for (const auto& f : distinct) buckets.insert(hash_feature(f, cfg));
  return 1.0 - static_cast<double>(buckets.size()) / static_cast<double>(distinct.size());
}

void save_checkpoint(const EmbeddingModelf& model, const std::filesystem::path& path) {
  validate(model.featurizer);
  if (static_cast<std::uint64_t>(model.table.rows()) != model.featurizer.n_buckets) {
    throw ValidationError("table rows do not match n_buckets");
  }
  std::string header(kMagic, sizeof kMagic);
  put_le<std::uint32_t>(header, static_cast<std::uint32_t>(model.dim()));
  put_le<std::uint64_t>(header, model.featurizer.n_buckets);
  put_le<std::uint32_t>(header, static_cast<std::uint32_t>(model.featurizer.ngram_min));
  put_le<std::uint32_t>(header, static_cast<std::uint32_t>(model.featurizer.ngram_max));
  put_le<std::uint32_t>(header, model.featurizer.include_whole_tokens ? 1U : 0U);
  put_le<std::uint64_t>(header, model.featurizer.hash_seed);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeError("cannot write checkpoint '" + path.string() + "'");
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  std::string body(static_cast<std::size_t>(model.table.size()) * 4, '\0');
  const float* data = model.table.data();
  for (Eigen::Index i = 0; i < model.table.size(); ++i) {
    const auto bits = std::bit_cast<std::uint32_t>(data[i]);
    for (int b = 0; b < 4; ++b) body[static_cast<std::size_t>(i) * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xFF);
  }
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) throw RuntimeError("checkpoint write failed for '" + path.string() + "'");
}

EmbeddingModelf load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint '" + path.string() + "'");
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw ValidationError("'" + path.string() + "' is not a checkpoint (bad magic)");
  }
  std::size_t pos = sizeof kMagic;
  const auto dim = get_le<std::uint32_t>(bytes, pos);
  FeaturizerConfig cfg;
  cfg.n_buckets = get_le<std::uint64_t>(bytes, pos);
  cfg.ngram_min = static_cast<int>(get_le<std::uint32_t>(bytes, pos));
  cfg.ngram_max = static_cast<int>(get_le<std::uint32_t>(bytes, pos));
  cfg.include_whole_tokens = get_le<std::uint32_t>(bytes, pos) != 0;
  cfg.hash_seed = get_le<std::uint64_t>(bytes, pos);
  validate(cfg);
  if (dim < 2) throw ValidationError("checkpoint dim must be at least 2");
  const std::uint64_t count = cfg.n_buckets * dim;
  if (bytes.size() - pos != count * 4) throw ValidationError("checkpoint table size does not match its header");

  EmbeddingModelf model{RowMatrix<float>(static_cast<Eigen::Index>(cfg.n_buckets), static_cast<Eigen::Index>(dim)), cfg};
  float* data = model.table.data();
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[pos + i * 4 + b])) << (8 * b);
    data[i] = std::bit_cast<float>(bits);
    if (!std::isfinite(data[i])) throw ValidationError("checkpoint contains a non-finite table entry");
  }
  return model;
}

}  // namespace uco
