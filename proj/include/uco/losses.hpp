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

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "uco/encoder.hpp"
#include "uco/error.hpp"

namespace uco {

// An (anchor, title) pair inside a batch; label is the centrality Y.
struct Link {
  Eigen::Index title = 0;
  int label = 0;
};

// Anchors (queries) and titles are unit rows; links[a] lists anchor a's titles.
// Label-1 links form the anchor's positives, label-0 links its negatives.
template <typename Scalar>
struct LossBatch {
  RowMatrix<Scalar> anchors;
  RowMatrix<Scalar> titles;
  std::vector<std::vector<Link>> links;
  Scalar margin = Scalar(0.5);
};

enum class LossKind { kMnrl, kOcl, kDual };

LossKind parse_loss_kind(std::string_view name);
std::string_view loss_kind_name(LossKind kind);

struct LossOptions {
  // Hinge form as written (default) or the cited softmax ranking form.
  bool mnrl_softmax = false;
  double softmax_scale = 20.0;
  // OCL positive term D (default) or D^2.
  bool ocl_squared_positive = false;
};

struct MinedPair {
  Eigen::Index anchor = 0;
  std::size_t link = 0;

  bool operator==(const MinedPair&) const = default;
};

template <typename Scalar>
struct LossResult {
  Scalar loss = 0;
  RowMatrix<Scalar> grad_anchors;
  RowMatrix<Scalar> grad_titles;
  std::vector<Scalar> per_anchor;  // MNRL contribution per anchor
  std::vector<MinedPair> mined;    // OCL pairs that received loss
  bool ocl_single_class = false;   // mining undefined, OCL returned zero
};

// Cosine distance 1 - cos(u, v), in [0, 2].
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar distance(const Eigen::MatrixBase<DerivedA>& u, const Eigen::MatrixBase<DerivedB>& v) {
  return typename DerivedA::Scalar(1) - cosine(u, v);
}

// Contrastive term for one pair: Y*D (or Y*D^2) + (1-Y)*max(margin - D, 0)^2.
template <typename Scalar>
Scalar ocl_term(int label, Scalar d, Scalar margin, bool squared_positive = false) {
  if (label == 1) return squared_positive ? d * d : d;
  const Scalar h = std::max(margin - d, Scalar(0));
  return h * h;
}

namespace detail {

template <typename Scalar>
Scalar pair_distance(const LossBatch<Scalar>& b, Eigen::Index a, Eigen::Index t) {
  return Scalar(1) - b.anchors.row(a).dot(b.titles.row(t));
}

// dD/d(anchor) = -title, dD/d(title) = -anchor, scaled by coeff.
template <typename Scalar>
void add_distance_grad(const LossBatch<Scalar>& b, LossResult<Scalar>& r, Eigen::Index a, Eigen::Index t, Scalar coeff) {
  r.grad_anchors.row(a) -= coeff * b.titles.row(t);
  r.grad_titles.row(t) -= coeff * b.anchors.row(a);
}

template <typename Scalar>
LossResult<Scalar> zero_result(const LossBatch<Scalar>& b) {
  LossResult<Scalar> r;
  r.grad_anchors = RowMatrix<Scalar>::Zero(b.anchors.rows(), b.anchors.cols());
  r.grad_titles = RowMatrix<Scalar>::Zero(b.titles.rows(), b.titles.cols());
  r.per_anchor.assign(static_cast<std::size_t>(b.anchors.rows()), Scalar(0));
  return r;
}

template <typename Scalar>
void check_batch(const LossBatch<Scalar>& b) {
  if (b.anchors.cols() != b.titles.cols()) throw ValidationError("loss batch: anchor/title dimension mismatch");
  if (static_cast<Eigen::Index>(b.links.size()) != b.anchors.rows()) {
    throw ValidationError("loss batch: links must be given for every anchor");
  }
  if (!(b.margin > 0)) throw ValidationError("loss batch: margin must be positive");
  for (const auto& links : b.links) {
    for (const auto& l : links) {
      if (l.title < 0 || l.title >= b.titles.rows()) throw ValidationError("loss batch: title index out of range");
      if (l.label != 0 && l.label != 1) throw ValidationError("loss batch: labels must be 0 or 1");
    }
  }
}

}  // namespace detail

// Sum over anchors, positives i and negatives j of max(0, d(q,p_i) - d(q,n_j) + margin).
template <typename Scalar>
LossResult<Scalar> mnrl(const LossBatch<Scalar>& b, const LossOptions& opt = {}) {
  detail::check_batch(b);
  auto r = detail::zero_result(b);
  std::vector<Eigen::Index> pos;
  std::vector<Eigen::Index> neg;
  for (Eigen::Index a = 0; a < b.anchors.rows(); ++a) {
    pos.clear();
    neg.clear();
    for (const auto& l : b.links[static_cast<std::size_t>(a)]) (l.label == 1 ? pos : neg).push_back(l.title);
    if (pos.empty() || neg.empty()) throw ValidationError("MNRL needs at least one positive and one negative per anchor");
    Scalar anchor_loss = 0;
    if (!opt.mnrl_softmax) {
      for (Eigen::Index p : pos) {
        const Scalar dp = detail::pair_distance(b, a, p);
        for (Eigen::Index n : neg) {
          const Scalar arg = dp - detail::pair_distance(b, a, n) + b.margin;
          if (arg <= 0) continue;
          anchor_loss += arg;
          detail::add_distance_grad(b, r, a, p, Scalar(1));
          detail::add_distance_grad(b, r, a, n, Scalar(-1));
        }
      }
    } else {
      // -log softmax of the positive's scaled cosine against all negatives, per positive.
      const auto s = static_cast<Scalar>(opt.softmax_scale);
      std::vector<Scalar> neg_logits;
      for (Eigen::Index n : neg) neg_logits.push_back(s * b.anchors.row(a).dot(b.titles.row(n)));
      for (Eigen::Index p : pos) {
        const Scalar lp = s * b.anchors.row(a).dot(b.titles.row(p));
        Scalar mx = lp;
        for (Scalar l : neg_logits) mx = std::max(mx, l);
        Scalar z = std::exp(lp - mx);
        for (Scalar l : neg_logits) z += std::exp(l - mx);
        anchor_loss += std::log(z) + mx - lp;
        // dL/dlogit = softmax - onehot; dlogit/dcos = s; dcos = -dD.
        const Scalar wp = std::exp(lp - mx) / z - Scalar(1);
        detail::add_distance_grad(b, r, a, p, -s * wp);
        for (std::size_t j = 0; j < neg.size(); ++j) {
          const Scalar wn = std::exp(neg_logits[j] - mx) / z;
          detail::add_distance_grad(b, r, a, neg[j], -s * wn);
        }
      }
    }
    r.per_anchor[static_cast<std::size_t>(a)] = anchor_loss;
    r.loss += anchor_loss;
  }
  return r;
}

// Online contrastive loss. Mining over the whole batch keeps positive pairs farther than
// the closest negative pair and negative pairs closer than the farthest positive pair.
template <typename Scalar>
LossResult<Scalar> ocl(const LossBatch<Scalar>& b, const LossOptions& opt = {}) {
  detail::check_batch(b);
  auto r = detail::zero_result(b);
  Scalar min_neg = std::numeric_limits<Scalar>::infinity();
  Scalar max_pos = -std::numeric_limits<Scalar>::infinity();
  bool any_pos = false;
  bool any_neg = false;
  for (Eigen::Index a = 0; a < b.anchors.rows(); ++a) {
    for (const auto& l : b.links[static_cast<std::size_t>(a)]) {
      const Scalar d = detail::pair_distance(b, a, l.title);
      if (l.label == 1) {
        any_pos = true;
        max_pos = std::max(max_pos, d);
      } else {
        any_neg = true;
        min_neg = std::min(min_neg, d);
      }
    }
  }
  if (!any_pos || !any_neg) {
    r.ocl_single_class = true;
    return r;
  }
  for (Eigen::Index a = 0; a < b.anchors.rows(); ++a) {
    const auto& links = b.links[static_cast<std::size_t>(a)];
    for (std::size_t k = 0; k < links.size(); ++k) {
      const auto& l = links[k];
      const Scalar d = detail::pair_distance(b, a, l.title);
      const bool hard = l.label == 1 ? d > min_neg : d < max_pos;
      if (!hard) continue;
      r.mined.push_back({a, k});
      r.loss += ocl_term(l.label, d, b.margin, opt.ocl_squared_positive);
      Scalar coeff;
      if (l.label == 1) {
        coeff = opt.ocl_squared_positive ? Scalar(2) * d : Scalar(1);
      } else {
        coeff = Scalar(-2) * std::max(b.margin - d, Scalar(0));
      }
      if (coeff != 0) detail::add_distance_grad(b, r, a, l.title, coeff);
    }
  }
  return r;
}

// MNRL + OCL, unweighted.
template <typename Scalar>
LossResult<Scalar> dual_loss(const LossBatch<Scalar>& b, const LossOptions& opt = {}) {
  auto r = mnrl(b, opt);
  auto o = ocl(b, opt);
  r.loss += o.loss;
  r.grad_anchors += o.grad_anchors;
  r.grad_titles += o.grad_titles;
  r.mined = std::move(o.mined);
  r.ocl_single_class = o.ocl_single_class;
  return r;
}

template <typename Scalar>
LossResult<Scalar> compute_loss(const LossBatch<Scalar>& b, LossKind kind, const LossOptions& opt = {}) {
  switch (kind) {
    case LossKind::kMnrl:
      return mnrl(b, opt);
    case LossKind::kOcl:
      return ocl(b, opt);
    case LossKind::kDual:
      return dual_loss(b, opt);
  }
  throw ValidationError("unknown loss kind");
}

// Smallest distance from any piecewise boundary of the hinge loss (MNRL hinge arguments,
// the OCL negative margin, OCL mining thresholds). Finite-difference checks skip points
// closer than their step to a kink.
template <typename Scalar>
Scalar distance_to_kinks(const LossBatch<Scalar>& b) {
  Scalar best = std::numeric_limits<Scalar>::infinity();
  Scalar min_neg = std::numeric_limits<Scalar>::infinity();
  Scalar max_pos = -std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> pos_d;
  std::vector<Scalar> neg_d;
  for (Eigen::Index a = 0; a < b.anchors.rows(); ++a) {
    std::vector<Scalar> p;
    std::vector<Scalar> n;
    for (const auto& l : b.links[static_cast<std::size_t>(a)]) {
      (l.label == 1 ? p : n).push_back(detail::pair_distance(b, a, l.title));
    }
    for (Scalar dp : p) {
      for (Scalar dn : n) best = std::min(best, std::abs(dp - dn + b.margin));
    }
    for (Scalar dn : n) best = std::min(best, std::abs(b.margin - dn));
    for (Scalar d : p) max_pos = std::max(max_pos, d);
    for (Scalar d : n) min_neg = std::min(min_neg, d);
    pos_d.insert(pos_d.end(), p.begin(), p.end());
    neg_d.insert(neg_d.end(), n.begin(), n.end());
  }
  for (Scalar d : pos_d) best = std::min(best, std::abs(d - min_neg));
  for (Scalar d : neg_d) best = std::min(best, std::abs(d - max_pos));
  return best;
}

}  // namespace uco
