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

// Hand-rolled generators and the finite-difference harness shared by the unit
// tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "uco/datamodel.hpp"
#include "uco/encoder.hpp"
#include "uco/losses.hpp"
#include "uco/random.hpp"

namespace support {

using uco::Rng;
using Mat = uco::RowMatrix<double>;

inline std::string random_word(Rng& rng, std::size_t min_len = 1, std::size_t max_len = 8) {
  static constexpr char kChars[] = "abcdefghijklmnopqrstuvwxyz0123456789";
  const std::size_t len = min_len + rng.below(max_len - min_len + 1);
  std::string w;
  for (std::size_t i = 0; i < len; ++i) w += kChars[rng.below(sizeof kChars - 1)];
  return w;
}

inline std::string random_text(Rng& rng, std::size_t min_words = 1, std::size_t max_words = 6) {
  const std::size_t n = min_words + rng.below(max_words - min_words + 1);
  std::string t;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) t += rng.bernoulli(0.2) ? "  " : " ";
    t += random_word(rng);
  }
  return t;
}

inline Mat random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-1.0, 1.0);
  return m;
}

inline Mat normalize_rows(const Mat& m) {
  Mat out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) /= out.row(i).norm();
  return out;
}

// Pre-normalization anchor/title vectors plus batch structure.
struct RawBatch {
  Mat anchors;
  Mat titles;
  std::vector<std::vector<uco::Link>> links;
  double margin = 0.5;

  uco::LossBatch<double> normalized() const {
    return {normalize_rows(anchors), normalize_rows(titles), links, margin};
  }
};

// 1..max_anchors anchors, each with 1..max_p own positives and 1..max_n negatives;
// some negatives are other anchors' positives, so titles are shared across anchors.
inline RawBatch random_raw_batch(Rng& rng, Eigen::Index dim, int max_anchors = 3, int max_p = 4, int max_n = 4) {
  RawBatch b;
  b.margin = 0.25 + 0.5 * rng.uniform();
  const int n_anchors = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_anchors)));
  std::vector<std::vector<Eigen::Index>> positives(static_cast<std::size_t>(n_anchors));
  Eigen::Index n_titles = 0;
  b.links.resize(static_cast<std::size_t>(n_anchors));
  for (int a = 0; a < n_anchors; ++a) {
    const int p = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_p)));
    for (int i = 0; i < p; ++i) {
      positives[static_cast<std::size_t>(a)].push_back(n_titles);
      b.links[static_cast<std::size_t>(a)].push_back({n_titles++, 1});
    }
  }
  for (int a = 0; a < n_anchors; ++a) {
    const int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_n)));
    for (int j = 0; j < n; ++j) {
      const auto other = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n_anchors)));
      if (n_anchors > 1 && other != static_cast<std::size_t>(a) && rng.bernoulli(0.3)) {
        const auto& pos = positives[other];
        b.links[static_cast<std::size_t>(a)].push_back({pos[rng.below(pos.size())], 0});
      } else {
        b.links[static_cast<std::size_t>(a)].push_back({n_titles++, 0});
      }
    }
  }
  b.anchors = random_matrix(rng, n_anchors, dim);
  b.titles = random_matrix(rng, n_titles, dim);
  return b;
}

// Analytic gradient with respect to the raw vectors: the loss gradient on unit
// vectors pulled back through y = x / |x|, i.e. (I - y y^T) g / |x|, row by row.
inline void pull_back(const Mat& raw, const Mat& grad_unit, Mat& out) {
  out.resize(raw.rows(), raw.cols());
  for (Eigen::Index i = 0; i < raw.rows(); ++i) {
    const double n = raw.row(i).norm();
    const Eigen::RowVectorXd y = raw.row(i) / n;
    const Eigen::RowVectorXd g = grad_unit.row(i);
    out.row(i) = (g - y * y.dot(g)) / n;
  }
}

struct GradCheck {
  double max_rel_error = 0.0;
  double kink_distance = 0.0;
};

// Central differences on every raw coordinate. The error is the largest absolute
// deviation relative to the largest gradient component (normwise, so that tiny
// components carry no spurious weight).
inline GradCheck check_gradient(const RawBatch& raw, uco::LossKind kind, const uco::LossOptions& opt, double step) {
  const auto batch = raw.normalized();
  const auto result = uco::compute_loss(batch, kind, opt);
  Mat ga, gt;
  pull_back(raw.anchors, result.grad_anchors, ga);
  pull_back(raw.titles, result.grad_titles, gt);

  auto loss_at = [&](const RawBatch& r) { return uco::compute_loss(r.normalized(), kind, opt).loss; };
  RawBatch probe = raw;
  double max_dev = 0.0;
  double max_grad = 0.0;
  auto sweep = [&](Mat& m, const Mat& analytic) {
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      const double saved = m.data()[i];
      m.data()[i] = saved + step;
      const double up = loss_at(probe);
      m.data()[i] = saved - step;
      const double down = loss_at(probe);
      m.data()[i] = saved;
      const double fd = (up - down) / (2 * step);
      max_dev = std::max(max_dev, std::abs(fd - analytic.data()[i]));
      max_grad = std::max({max_grad, std::abs(fd), std::abs(analytic.data()[i])});
    }
  };
  sweep(probe.anchors, ga);
  sweep(probe.titles, gt);
  GradCheck c;
  c.max_rel_error = max_dev / std::max(max_grad, 1e-8);
  c.kink_distance = uco::distance_to_kinks(batch);
  return c;
}

// Random run over a small id universe with graded judgments.
struct RunCase {
  std::vector<std::string> ranking;
  std::vector<uco::Judgment> judgments;  // sorted by title_id
};

inline RunCase random_run_case(Rng& rng, bool ensure_relevant = true) {
  const std::size_t universe = 2 + rng.below(30);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < universe; ++i) ids.push_back("t" + std::to_string(i));
  RunCase c;
  for (const auto& id : ids) {
    if (rng.bernoulli(0.6)) c.judgments.push_back({id, 1 + static_cast<int>(rng.below(5)), 0});
  }
  if (ensure_relevant) {
    bool any = false;
    for (const auto& j : c.judgments) any = any || j.relevance > 3;
    if (!any) {
      const auto& id = ids[rng.below(ids.size())];
      auto it = std::find_if(c.judgments.begin(), c.judgments.end(), [&](const auto& j) { return j.title_id == id; });
      if (it == c.judgments.end()) {
        c.judgments.push_back({id, 4 + static_cast<int>(rng.below(2)), 1});
      } else {
        it->relevance = 4 + static_cast<int>(rng.below(2));
      }
    }
  }
  std::sort(c.judgments.begin(), c.judgments.end(), [](const auto& a, const auto& b) { return a.title_id < b.title_id; });
  for (auto& j : c.judgments) j.centrality = j.relevance > 3 ? 1 : 0;
  rng.shuffle(std::span<std::string>(ids));
  ids.resize(1 + rng.below(ids.size()));
  c.ranking = ids;
  return c;
}

}  // namespace support
