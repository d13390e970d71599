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
#include <string>
#include <vector>

#include "uco/datamodel.hpp"
#include "uco/encoder.hpp"
#include "uco/metrics.hpp"
#include "uco/trainer.hpp"

namespace uco {

struct ModelConfig {
  Eigen::Index dim = 64;
  FeaturizerConfig featurizer;
};

// Freshly initialized (untrained) encoder; the UCO-off baseline.
EmbeddingModeld initial_model(const ModelConfig& cfg, std::uint64_t seed);

struct AblationConfig {
  ModelConfig model;
  TrainConfig train;
  bool sweep_margins = false;
  std::vector<double> margins = {0.25, 0.5, 0.75};
};

struct AblationRow {
  std::string name;  // baseline, MNRL, OCL, MNRL+OCL
  MetricReport test;
  double margin = 0.0;
  int best_epoch = 0;
};

using Logger = std::function<void(const std::string&)>;

// Untrained baseline plus one training per loss from the same initial model and seeds.
// With sweep_margins, each loss keeps the margin with the best dev NDCG@10.
std::vector<AblationRow> run_ablation(const std::vector<GradedPair>& train_pairs, const EvalSplit& split,
                                      const AblationConfig& cfg, const Logger& log = {});

// loss, NDCG@5, MRR@10, margin, best_epoch.
std::string format_ablation(const std::vector<AblationRow>& rows);

}  // namespace uco
