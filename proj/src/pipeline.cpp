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

#include "uco/pipeline.hpp"

#include <cstdio>

#include "uco/random.hpp"

namespace uco {

EmbeddingModeld initial_model(const ModelConfig& cfg, std::uint64_t seed) {
  return init_model<double>(cfg.featurizer, cfg.dim, derive_seed(seed, "model_init"));
}

std::vector<AblationRow> run_ablation(const std::vector<GradedPair>& train_pairs, const EvalSplit& split,
                                      const AblationConfig& cfg, const Logger& log) {
  const EmbeddingModeld start = initial_model(cfg.model, cfg.train.rng_seed);
  std::vector<AblationRow> rows;
  rows.push_back({"baseline", eval_retrieval(start, split, QuerySet::kTest, cfg.train.metrics), 0.0, 0});

  const std::pair<LossKind, const char*> kinds[] = {
      {LossKind::kMnrl, "MNRL"}, {LossKind::kOcl, "OCL"}, {LossKind::kDual, "MNRL+OCL"}};
  const std::vector<double> margins = cfg.sweep_margins ? cfg.margins : std::vector<double>{cfg.train.margin};
  for (const auto& [kind, name] : kinds) {
    double best_dev = -1.0;
    AblationRow row{name, {}, 0.0, 0};
    for (double margin : margins) {
      TrainConfig tc = cfg.train;
      tc.loss = kind;
      tc.margin = margin;
      const TrainResult result = train(start, train_pairs, split, tc);
      const double dev = result.history[static_cast<std::size_t>(result.best_epoch - 1)].retrieval.ndcg.back();
      if (log) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s margin %.2f: best epoch %d, dev NDCG@%zu %.4f", name, margin,
                      result.best_epoch, tc.metrics.cutoffs.back(), dev);
        log(buf);
      }
      if (dev > best_dev) {
        best_dev = dev;
        row.test = eval_retrieval(result.best, split, QuerySet::kTest, cfg.train.metrics);
        row.margin = margin;
        row.best_epoch = result.best_epoch;
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_ablation(const std::vector<AblationRow>& rows) {
  std::string out = "loss\tNDCG@5\tMRR@10\tmargin\tbest_epoch\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%s\t%.4f\t%.4f\t%.2f\t%d\n", r.name.c_str(), r.test.ndcg_at(5), r.test.mrr, r.margin,
                  r.best_epoch);
    out += buf;
  }
  return out;
}

}  // namespace uco
