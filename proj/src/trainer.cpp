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

#include "uco/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include "uco/random.hpp"
#include "uco/retrieval.hpp"

namespace uco {
namespace {

template <typename Scalar>
RankedRun retrieve_impl(const EmbeddingModel<Scalar>& model, const EvalSplit& split, QuerySet which, std::size_t k) {
  const Index index = build_index(split.corpus, model);
  const auto& queries = queries_of(split, which);
  RowMatrix<float> q(static_cast<Eigen::Index>(queries.size()), model.dim());
  std::vector<std::string> ids;
  ids.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i) {
    q.row(static_cast<Eigen::Index>(i)) = encode(queries[i].text, model).template cast<float>().transpose();
    ids.push_back(queries[i].id);
  }
  if (queries.empty()) return RankedRun{k, {}};
  return batch_search(index, q, ids, k);
}

std::size_t search_depth(const MetricConfig& cfg) {
  validate(cfg);
  return std::max(cfg.cutoffs.back(), cfg.mrr_depth);
}

}  // namespace

void validate(const TrainConfig& cfg) {
  if (cfg.batch_size < 2) throw ValidationError("batch_size must be at least 2");
  if (!(cfg.learning_rate > 0)) throw ValidationError("learning_rate must be positive");
  if (!(cfg.weight_decay >= 0)) throw ValidationError("weight_decay must be non-negative");
  if (cfg.max_epochs < 1) throw ValidationError("max_epochs must be at least 1");
  if (!(cfg.margin > 0)) throw ValidationError("margin must be positive");
  if (cfg.centrality_threshold && !(*cfg.centrality_threshold > -1.0 && *cfg.centrality_threshold < 1.0)) {
    throw ValidationError("centrality_threshold must lie in (-1, 1)");
  }
  validate(cfg.metrics);
}

AdamState AdamState::like(const EmbeddingModeld& model) {
  AdamState s;
  s.first_moment = RowMatrix<double>::Zero(model.table.rows(), model.table.cols());
  s.second_moment = RowMatrix<double>::Zero(model.table.rows(), model.table.cols());
  return s;
}

void adam_step(EmbeddingModeld& model, const SparseGrad<double>& grads, AdamState& state, const TrainConfig& cfg) {
  if (state.first_moment.rows() != model.table.rows() || state.first_moment.cols() != model.table.cols()) {
    throw ValidationError("Adam state does not match the model table");
  }
  for (const auto& [row, g] : grads.rows) {
    if (!g.allFinite()) throw RuntimeError("non-finite gradient in table row " + std::to_string(row));
  }
  ++state.step;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  const double decay = 1.0 - cfg.learning_rate * cfg.weight_decay;
  for (FeatureId row : grads.sorted_rows()) {
    const RowVector<double>& g = grads.rows.at(row);
    auto m = state.first_moment.row(row);
    auto v = state.second_moment.row(row);
    m = state.beta1 * m + (1.0 - state.beta1) * g;
    v = state.beta2 * v + (1.0 - state.beta2) * g.cwiseAbs2();
    auto w = model.table.row(row);
    w *= decay;
    w.array() -= cfg.learning_rate * (m.array() / correction1) / ((v.array() / correction2).sqrt() + state.epsilon);
  }
}

std::vector<TrainQuery> group_train_queries(const std::vector<GradedPair>& pairs) {
  std::map<std::string, TrainQuery> groups;
  for (const auto& p : pairs) {
    auto& q = groups[p.query_id];
    if (q.query_id.empty()) {
      q.query_id = p.query_id;
      q.text = p.query_text;
    }
    (p.centrality == 1 ? q.positives : q.negatives).push_back(p.title_text);
  }
  std::vector<TrainQuery> out;
  for (auto& [id, q] : groups) {
    if (!q.positives.empty() && !q.negatives.empty()) out.push_back(std::move(q));
  }
  return out;
}

std::vector<TextBatch> make_batches(const std::vector<TrainQuery>& queries, const TrainConfig& cfg, int epoch) {
  validate(cfg);
  if (queries.empty()) throw ValidationError("no trainable query (needs both central and non-central titles)");
  std::vector<std::size_t> order(queries.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(derive_seed(derive_seed(cfg.rng_seed, "batches"), static_cast<std::uint64_t>(epoch)));
  rng.shuffle(std::span<std::size_t>(order));

  std::vector<TextBatch> batches;
  const auto bs = static_cast<std::size_t>(cfg.batch_size);
  for (std::size_t start = 0; start < order.size(); start += bs) {
    const std::size_t end = std::min(order.size(), start + bs);
    TextBatch b;
    std::vector<std::vector<Eigen::Index>> own_positives;
    for (std::size_t i = start; i < end; ++i) {
      const TrainQuery& q = queries[order[i]];
      b.anchors.push_back(q.text);
      std::vector<Link> links;
      std::vector<Eigen::Index> pos_ids;
      for (const auto& t : q.positives) {
        pos_ids.push_back(static_cast<Eigen::Index>(b.titles.size()));
        links.push_back({pos_ids.back(), 1});
        b.titles.push_back(t);
      }
      for (const auto& t : q.negatives) {
        links.push_back({static_cast<Eigen::Index>(b.titles.size()), 0});
        b.titles.push_back(t);
      }
      b.links.push_back(std::move(links));
      own_positives.push_back(std::move(pos_ids));
    }
    if (cfg.in_batch_negatives) {
      for (std::size_t a = 0; a < b.links.size(); ++a) {
        for (std::size_t other = 0; other < own_positives.size(); ++other) {
          if (other == a) continue;
          for (Eigen::Index t : own_positives[other]) b.links[a].push_back({t, 0});
        }
      }
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

std::vector<TextBatch> make_batches(const std::vector<GradedPair>& pairs, const TrainConfig& cfg, int epoch) {
  return make_batches(group_train_queries(pairs), cfg, epoch);
}

EncodedBatch encode_batch(const TextBatch& text, const EmbeddingModeld& model, double margin) {
  EncodedBatch e;
  e.batch.margin = margin;
  e.batch.links = text.links;
  e.batch.anchors.resize(static_cast<Eigen::Index>(text.anchors.size()), model.dim());
  e.batch.titles.resize(static_cast<Eigen::Index>(text.titles.size()), model.dim());
  for (std::size_t i = 0; i < text.anchors.size(); ++i) {
    e.anchors.push_back(encode_traced(text.anchors[i], model));
    e.batch.anchors.row(static_cast<Eigen::Index>(i)) = e.anchors.back().output.transpose();
  }
  for (std::size_t i = 0; i < text.titles.size(); ++i) {
    e.titles.push_back(encode_traced(text.titles[i], model));
    e.batch.titles.row(static_cast<Eigen::Index>(i)) = e.titles.back().output.transpose();
  }
  return e;
}

SparseGrad<double> backward(const EncodedBatch& encoded, const LossResult<double>& loss) {
  SparseGrad<double> grad;
  for (std::size_t i = 0; i < encoded.anchors.size(); ++i) {
    encode_backward(encoded.anchors[i], loss.grad_anchors.row(static_cast<Eigen::Index>(i)).transpose(), grad);
  }
  for (std::size_t i = 0; i < encoded.titles.size(); ++i) {
    encode_backward(encoded.titles[i], loss.grad_titles.row(static_cast<Eigen::Index>(i)).transpose(), grad);
  }
  return grad;
}

CentralityEval eval_centrality(const std::vector<double>& cosines, const std::vector<int>& labels,
                               std::optional<double> threshold) {
  if (cosines.empty()) throw ValidationError("centrality evaluation needs at least one pair");
  if (cosines.size() != labels.size()) throw ValidationError("one label per cosine required");
  auto score = [&](double t) {
    std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
    for (std::size_t i = 0; i < cosines.size(); ++i) {
      const bool predicted = cosines[i] > t;
      const bool actual = labels[i] == 1;
      tp += predicted && actual;
      fp += predicted && !actual;
      fn += !predicted && actual;
      correct += predicted == actual;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return CentralityEval{static_cast<double>(correct) / static_cast<double>(cosines.size()),
                          denom > 0 ? static_cast<double>(2 * tp) / denom : 0.0, t};
  };
  if (threshold) return score(*threshold);
  CentralityEval best = score(-1.0);
  for (int i = 1; i <= 100; ++i) {
    const auto candidate = score(-1.0 + 0.02 * i);
    if (candidate.f1 > best.f1) best = candidate;
  }
  return best;
}

std::vector<GradedPair> split_pairs(const EvalSplit& split, QuerySet which) {
  std::map<std::string_view, const std::string*> titles;
  for (const auto& d : split.corpus) titles.emplace(d.id, &d.text);
  std::vector<GradedPair> out;
  for (const auto& q : queries_of(split, which)) {
    auto it = split.qrels.find(q.id);
    if (it == split.qrels.end()) continue;
    for (const auto& j : it->second) {
      out.push_back({q.id, q.text, j.title_id, *titles.at(j.title_id), j.relevance, j.centrality});
    }
  }
  return out;
}

RankedRun retrieve_run(const EmbeddingModeld& model, const EvalSplit& split, QuerySet which, std::size_t k) {
  return retrieve_impl(model, split, which, k);
}

RankedRun retrieve_run(const EmbeddingModelf& model, const EvalSplit& split, QuerySet which, std::size_t k) {
  return retrieve_impl(model, split, which, k);
}

MetricReport eval_retrieval(const EmbeddingModeld& model, const EvalSplit& split, QuerySet which, const MetricConfig& cfg) {
  return aggregate(retrieve_run(model, split, which, search_depth(cfg)), split.qrels, cfg);
}

MetricReport eval_retrieval(const EmbeddingModelf& model, const EvalSplit& split, QuerySet which, const MetricConfig& cfg) {
  return aggregate(retrieve_run(model, split, which, search_depth(cfg)), split.qrels, cfg);
}

TrainResult train(EmbeddingModeld model, const std::vector<GradedPair>& train_pairs, const EvalSplit& dev_split,
                  const TrainConfig& cfg, const EpochCallback& on_epoch) {
  validate(cfg);
  const auto queries = group_train_queries(train_pairs);
  const auto dev_pairs = split_pairs(dev_split, QuerySet::kDev);
  AdamState adam = AdamState::like(model);
  TrainResult result;
  double best_score = -1.0;

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    const auto batches = make_batches(queries, cfg, epoch);
    double total = 0.0;
    for (std::size_t bi = 0; bi < batches.size(); ++bi) {
      const auto encoded = encode_batch(batches[bi], model, cfg.margin);
      const auto loss = compute_loss(encoded.batch, cfg.loss, cfg.loss_options);
      if (!std::isfinite(loss.loss)) {
        throw RuntimeError("non-finite loss in epoch " + std::to_string(epoch) + ", batch " + std::to_string(bi));
      }
      total += loss.loss;
      try {
        adam_step(model, backward(encoded, loss), adam, cfg);
      } catch (const RuntimeError& e) {
        throw RuntimeError("epoch " + std::to_string(epoch) + ", batch " + std::to_string(bi) + ": " + e.what());
      }
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = total / static_cast<double>(batches.size());
    record.centrality = dev_pairs.empty() ? CentralityEval{} : eval_centrality(model, dev_pairs, cfg.centrality_threshold);
    record.retrieval = eval_retrieval(model, dev_split, QuerySet::kDev, cfg.metrics);
    const double score = record.retrieval.ndcg.back();
    if (score > best_score) {
      best_score = score;
      result.best = model;
      result.best_epoch = epoch;
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
  }
  return result;
}

std::string format_history(const std::vector<EpochRecord>& history) {
  std::string out = "epoch\tloss\tacc\tf1\tthreshold";
  if (!history.empty()) {
    for (const auto& c : report_columns(history.front().retrieval)) out += "\t" + c;
  }
  out += '\n';
  char buf[64];
  for (const auto& r : history) {
    std::snprintf(buf, sizeof buf, "%d\t%.6f\t%.4f\t%.4f\t%.2f", r.epoch, r.loss, r.centrality.accuracy, r.centrality.f1,
                  r.centrality.threshold);
    out += buf;
    for (const auto& v : report_values(r.retrieval)) out += "\t" + v;
    out += '\n';
  }
  return out;
}

}  // namespace uco
