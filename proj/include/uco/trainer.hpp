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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "uco/datamodel.hpp"
#include "uco/encoder.hpp"
#include "uco/losses.hpp"
#include "uco/metrics.hpp"

namespace uco {

struct TrainConfig {
  int batch_size = 32;
  double learning_rate = 2e-5;
  double weight_decay = 0.01;
  int max_epochs = 10;
  double margin = 0.5;
  // Cosine cut for the centrality evaluator; nullopt sweeps for the best F1 on dev.
  std::optional<double> centrality_threshold;
  std::uint64_t rng_seed = 0;
  bool in_batch_negatives = true;
  LossKind loss = LossKind::kDual;
  LossOptions loss_options;
  MetricConfig metrics;
};

void validate(const TrainConfig& cfg);

// Adam moments shaped like the table. Rows are only touched when they receive a gradient.
struct AdamState {
  RowMatrix<double> first_moment;
  RowMatrix<double> second_moment;
  std::int64_t step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState like(const EmbeddingModeld& model);
};

// Bias-corrected Adam on the touched rows, with decoupled weight decay row *= (1 - lr * wd)
// applied to the same rows. Throws RuntimeError on a non-finite gradient.
void adam_step(EmbeddingModeld& model, const SparseGrad<double>& grads, AdamState& state, const TrainConfig& cfg);

// A query with its annotated titles, grouped from GradedPairs by centrality.
struct TrainQuery {
  std::string query_id;
  std::string text;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

// Queries with at least one central and one non-central title, sorted by query_id.
std::vector<TrainQuery> group_train_queries(const std::vector<GradedPair>& pairs);

// Batch of texts; links index into titles. Encoded into a LossBatch by encode_batch.
struct TextBatch {
  std::vector<std::string> anchors;
  std::vector<std::string> titles;
  std::vector<std::vector<Link>> links;
};

std::vector<TextBatch> make_batches(const std::vector<TrainQuery>& queries, const TrainConfig& cfg, int epoch);
std::vector<TextBatch> make_batches(const std::vector<GradedPair>& pairs, const TrainConfig& cfg, int epoch);

struct EncodedBatch {
  LossBatch<double> batch;
  std::vector<Encoding<double>> anchors;
  std::vector<Encoding<double>> titles;
};

EncodedBatch encode_batch(const TextBatch& text, const EmbeddingModeld& model, double margin);

// Pushes loss gradients on the unit vectors back to table rows.
SparseGrad<double> backward(const EncodedBatch& encoded, const LossResult<double>& loss);

struct CentralityEval {
  double accuracy = 0.0;
  double f1 = 0.0;
  double threshold = 0.0;
};

// Pair (query, title) is predicted central iff cosine > threshold. Without a threshold,
// 101 evenly spaced values in [-1, 1] are swept and the first F1 maximizer is used.
CentralityEval eval_centrality(const std::vector<double>& cosines, const std::vector<int>& labels,
                               std::optional<double> threshold);

template <typename Scalar>
CentralityEval eval_centrality(const EmbeddingModel<Scalar>& model, const std::vector<GradedPair>& pairs,
                               std::optional<double> threshold) {
  if (pairs.empty()) throw ValidationError("centrality evaluation needs at least one pair");
  std::vector<double> cosines;
  std::vector<int> labels;
  for (const auto& p : pairs) {
    cosines.push_back(static_cast<double>(cosine(encode(p.query_text, model), encode(p.title_text, model))));
    labels.push_back(p.centrality);
  }
  return eval_centrality(cosines, labels, threshold);
}

// (query, title) pairs of one query set, from the split's qrels.
std::vector<GradedPair> split_pairs(const EvalSplit& split, QuerySet which);

// Encodes the corpus once and ranks every query of the set at depth k.
RankedRun retrieve_run(const EmbeddingModeld& model, const EvalSplit& split, QuerySet which, std::size_t k);
RankedRun retrieve_run(const EmbeddingModelf& model, const EvalSplit& split, QuerySet which, std::size_t k);

// retrieve_run at depth max(cutoffs, mrr_depth), scored with aggregate.
MetricReport eval_retrieval(const EmbeddingModeld& model, const EvalSplit& split, QuerySet which,
                            const MetricConfig& cfg = {});
MetricReport eval_retrieval(const EmbeddingModelf& model, const EvalSplit& split, QuerySet which,
                            const MetricConfig& cfg = {});

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;  // mean batch loss
  CentralityEval centrality;
  MetricReport retrieval;
};

struct TrainResult {
  EmbeddingModeld best;
  int best_epoch = 0;
  std::vector<EpochRecord> history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Full fine-tuning loop; keeps the epoch with the highest dev NDCG@10 (earliest on ties).
TrainResult train(EmbeddingModeld model, const std::vector<GradedPair>& train_pairs, const EvalSplit& dev_split,
                  const TrainConfig& cfg, const EpochCallback& on_epoch = {});

// history.tsv: epoch, loss, acc, f1, threshold, then report columns.
std::string format_history(const std::vector<EpochRecord>& history);

}  // namespace uco
