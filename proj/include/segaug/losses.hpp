/*
 * Copyright 2026 The segaug Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file losses.hpp
 * @brief Ranking losses over a single similar set: positive-class Smooth-AP
 *        and a hinge triplet loss, with analytic gradients, an exact AP
 *        reference and a central-difference gradient checker.
 */

#ifndef SEGAUG_LOSSES_HPP
#define SEGAUG_LOSSES_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace segaug {

enum class LossErrorKind { kInvalidBatch, kTiedScores, kNonFinite };

class LossError : public std::runtime_error {
 public:
  LossError(LossErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  LossErrorKind kind() const noexcept { return kind_; }

 private:
  LossErrorKind kind_;
};

inline constexpr double kDefaultTau = 0.01;
inline constexpr double kDefaultMargin = 0.2;

/// Similarity of each batch item to the query; label 1 marks the similar
/// set, 0 the dissimilar filler.
struct ScoreBatch {
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;

  std::size_t size() const noexcept { return scores.size(); }
  std::size_t positives() const noexcept {
    return static_cast<std::size_t>(
        std::count(labels.begin(), labels.end(), std::uint8_t{1}));
  }

  void validate() const {
    if (scores.size() != labels.size()) {
      throw LossError(LossErrorKind::kInvalidBatch,
                      "scores and labels differ in length");
    }
    for (std::uint8_t l : labels) {
      if (l > 1) {
        throw LossError(LossErrorKind::kInvalidBatch, "labels must be 0 or 1");
      }
    }
    if (positives() == 0) {
      throw LossError(LossErrorKind::kInvalidBatch,
                      "batch needs at least one positive");
    }
    for (double s : scores) {
      if (!std::isfinite(s)) {
        throw LossError(LossErrorKind::kNonFinite, "non-finite score");
      }
    }
  }
};

struct SmoothApParams {
  double tau = kDefaultTau;
};

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;
};

/// Average precision of the positives under a descending sort of the
/// scores. Ties make the ranking ambiguous and are rejected.
inline double exact_ap(const ScoreBatch& batch) {
  batch.validate();
  std::vector<std::size_t> order(batch.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return batch.scores[a] > batch.scores[b];
  });
  for (std::size_t r = 1; r < order.size(); ++r) {
    if (batch.scores[order[r]] == batch.scores[order[r - 1]]) {
      throw LossError(LossErrorKind::kTiedScores,
                      "tied scores make average precision ambiguous");
    }
  }
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (batch.labels[order[r]] == 1) {
      ++hits;
      sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
  }
  return sum / static_cast<double>(hits);
}

namespace detail {

// Logistic function and its complement without overflow.
inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace detail

/// 1 - smoothed AP of the positive class. With D_ij = s_j - s_i and
/// G(x) = sigmoid(x / tau), each positive i contributes
///   [1 + sum_{j pos, j != i} G(D_ij)] / [1 + sum_{j != i} G(D_ij)]
/// and the smoothed AP is the mean over positives. The gradient is exact.
inline LossGradient smooth_ap_loss(const ScoreBatch& batch,
                                   SmoothApParams params = {}) {
  batch.validate();
  if (!(params.tau > 0.0) || !std::isfinite(params.tau)) {
    throw LossError(LossErrorKind::kInvalidBatch, "tau must be positive");
  }
  const std::size_t n = batch.size();
  const double inv_tau = 1.0 / params.tau;
  const double num_pos = static_cast<double>(batch.positives());

  LossGradient out;
  out.grad.assign(n, 0.0);
  std::vector<double> g(n), dg(n);
  double ap = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    if (batch.labels[i] != 1) continue;
    double pos_sum = 0.0;
    double neg_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double x = (batch.scores[j] - batch.scores[i]) * inv_tau;
      g[j] = detail::sigmoid(x);
      dg[j] = g[j] * detail::sigmoid(-x) * inv_tau;
      (batch.labels[j] == 1 ? pos_sum : neg_sum) += g[j];
    }
    const double num = 1.0 + pos_sum;
    const double den = num + neg_sum;
    ap += num / den;

    // d(num/den)/ds_j = dg_j * ([j pos] * den - num) / den^2 for j != i;
    // the i-th partial is minus their sum (only differences enter).
    const double inv_den2 = 1.0 / (den * den);
    double self = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double pos_j = batch.labels[j] == 1 ? 1.0 : 0.0;
      const double d = dg[j] * (pos_j * den - num) * inv_den2;
      out.grad[j] -= d / num_pos;
      self += d;
    }
    out.grad[i] += self / num_pos;
  }
  out.loss = 1.0 - ap / num_pos;

  if (!std::isfinite(out.loss) ||
      !std::all_of(out.grad.begin(), out.grad.end(),
                   [](double v) { return std::isfinite(v); })) {
    throw LossError(LossErrorKind::kNonFinite,
                    "non-finite value in smooth AP evaluation");
  }
  return out;
}

struct TripletBatch {
  double d_ap = 0.0;
  double d_an = 0.0;
  double margin = kDefaultMargin;
};

struct TripletResult {
  double loss = 0.0;
  double grad_d_ap = 0.0;
  double grad_d_an = 0.0;
};

/// max(0, d_ap - d_an + margin). The subgradient at the kink is (0, 0).
inline TripletResult triplet_loss(const TripletBatch& t) {
  if (!std::isfinite(t.d_ap) || !std::isfinite(t.d_an) || t.d_ap < 0 ||
      t.d_an < 0 || !(t.margin >= 0)) {
    throw LossError(LossErrorKind::kInvalidBatch,
                    "triplet distances and margin must be finite and >= 0");
  }
  const double arg = t.d_ap - t.d_an + t.margin;
  if (arg > 0) return {arg, 1.0, -1.0};
  return {0.0, 0.0, 0.0};
}

struct BatchTripletResult {
  double loss = 0.0;
  std::size_t triplets = 0;
  std::size_t active = 0;
  /// d loss / d distance(a, b), row-major B x B.
  std::vector<double> grad;
};

/// Mean hinge over every (anchor, positive, negative) triplet whose anchor
/// and positive are labelled similar. `distances` is a row-major B x B
/// matrix; only the anchor rows are read.
inline BatchTripletResult batch_triplet_loss(
    std::span<const double> distances, std::span<const std::uint8_t> labels,
    double margin = kDefaultMargin) {
  const std::size_t b = labels.size();
  if (distances.size() != b * b) {
    throw LossError(LossErrorKind::kInvalidBatch,
                    "distance matrix must be B x B");
  }
  BatchTripletResult out;
  out.grad.assign(b * b, 0.0);
  for (std::size_t a = 0; a < b; ++a) {
    if (labels[a] != 1) continue;
    for (std::size_t p = 0; p < b; ++p) {
      if (p == a || labels[p] != 1) continue;
      for (std::size_t q = 0; q < b; ++q) {
        if (labels[q] != 0) continue;
        const TripletResult r = triplet_loss(
            {distances[a * b + p], distances[a * b + q], margin});
        ++out.triplets;
        if (r.loss > 0) ++out.active;
        out.loss += r.loss;
        out.grad[a * b + p] += r.grad_d_ap;
        out.grad[a * b + q] += r.grad_d_an;
      }
    }
  }
  if (out.triplets > 0) {
    const double inv = 1.0 / static_cast<double>(out.triplets);
    out.loss *= inv;
    for (double& g : out.grad) g *= inv;
  }
  return out;
}

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t worst_index = 0;
  std::vector<double> numeric;
};

/// Central differences of `f` at `x0` against `analytic`; relative error per
/// coordinate is |a - n| / max(1e-12, |a| + |n|).
template <typename F>
GradCheckReport grad_check(F&& f, std::span<const double> analytic,
                           std::span<const double> x0, double h = 1e-5) {
  if (analytic.size() != x0.size()) {
    throw std::invalid_argument("gradient and point differ in dimension");
  }
  GradCheckReport report;
  report.numeric.resize(x0.size());
  std::vector<double> x(x0.begin(), x0.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double plus = f(std::span<const double>(x));
    x[i] = saved - h;
    const double minus = f(std::span<const double>(x));
    x[i] = saved;
    if (!std::isfinite(plus) || !std::isfinite(minus)) {
      throw LossError(LossErrorKind::kNonFinite,
                      "non-finite function value during gradient check");
    }
    const double numeric = (plus - minus) / (2.0 * h);
    report.numeric[i] = numeric;
    const double err = std::abs(analytic[i] - numeric) /
                       std::max(1e-12, std::abs(analytic[i]) + std::abs(numeric));
    if (err > report.max_rel_error) {
      report.max_rel_error = err;
      report.worst_index = i;
    }
  }
  return report;
}

/// Gradient check of smooth_ap_loss with respect to the scores.
inline GradCheckReport smooth_ap_grad_check(const ScoreBatch& batch,
                                            SmoothApParams params,
                                            double h = 1e-5) {
  const LossGradient analytic = smooth_ap_loss(batch, params);
  ScoreBatch probe = batch;
  return grad_check(
      [&](std::span<const double> s) {
        probe.scores.assign(s.begin(), s.end());
        return smooth_ap_loss(probe, params).loss;
      },
      analytic.grad, batch.scores, h);
}

}  // namespace segaug

#endif  // SEGAUG_LOSSES_HPP
