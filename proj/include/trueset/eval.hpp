#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "trueset/error.hpp"
#include "trueset/numeric.hpp"
#include "trueset/raster.hpp"

namespace trueset {

// Pixel tallies with crack as the positive class.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const noexcept { return tp + fp + fn + tn; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) noexcept {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    tn += o.tn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

struct MetricReport {
  double threshold = 0.5;
  double g = 0.0;     // global accuracy
  double c = 0.0;     // class-average accuracy
  double miou = 0.0;  // mean of crack and background IoU
  double p = 0.0;
  double r = 0.0;
  double f = 0.0;
  ConfusionCounts counts;
};

// Pixel is 1 iff its probability is strictly greater than t.
inline BinaryMask binarize(const ProbabilityMap& map, double t) {
  BinaryMask out(map.width, map.height);
  for (std::size_t i = 0; i < map.size(); ++i) out.data[i] = map.data[i] > t ? 1 : 0;
  return out;
}

inline ConfusionCounts confusion(const BinaryMask& pred, const BinaryMask& gt) {
  if (!pred.same_shape(gt))
    throw DimensionMismatch("prediction is " + std::to_string(pred.width) + "x" +
                            std::to_string(pred.height) + ", ground truth is " +
                            std::to_string(gt.width) + "x" + std::to_string(gt.height));
  ConfusionCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred.data[i] != 0;
    const bool g = gt.data[i] != 0;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return c;
}

namespace detail {

// num/den, with 0/0 resolved to 1 when the class is absent from both
// prediction and ground truth and to 0 otherwise.
inline double ratio(std::uint64_t num, std::uint64_t den, bool class_absent) {
  if (den == 0) return class_absent ? 1.0 : 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace detail

inline MetricReport metrics(const ConfusionCounts& k, double threshold = 0.5) {
  if (k.total() == 0) throw Error("metrics need at least one pixel");
  const bool crack_absent = k.tp + k.fp + k.fn == 0;
  const bool background_absent = k.tn + k.fp + k.fn == 0;

  MetricReport m;
  m.threshold = threshold;
  m.counts = k;
  m.g = static_cast<double>(k.tp + k.tn) / static_cast<double>(k.total());
  const double crack_acc = detail::ratio(k.tp, k.tp + k.fn, crack_absent);
  const double background_acc = detail::ratio(k.tn, k.tn + k.fp, background_absent);
  m.c = 0.5 * (crack_acc + background_acc);
  const double crack_iou = detail::ratio(k.tp, k.tp + k.fp + k.fn, crack_absent);
  const double background_iou = detail::ratio(k.tn, k.tn + k.fn + k.fp, background_absent);
  m.miou = 0.5 * (crack_iou + background_iou);
  m.p = detail::ratio(k.tp, k.tp + k.fp, crack_absent);
  m.r = detail::ratio(k.tp, k.tp + k.fn, crack_absent);
  if (m.p + m.r > 0.0)
    m.f = 2.0 * m.p * m.r / (m.p + m.r);
  else
    m.f = crack_absent ? 1.0 : 0.0;
  return m;
}

struct ScoredPair {
  ProbabilityMap prediction;
  BinaryMask ground_truth;
  std::string id;
};

inline ConfusionCounts pooled_confusion(const std::vector<ScoredPair>& pairs, double t) {
  if (pairs.empty()) throw Error("evaluation needs at least one pair");
  ConfusionCounts total;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    if (!pair.prediction.same_shape(pair.ground_truth))
      throw DimensionMismatch("pair " +
                              (pair.id.empty() ? std::to_string(i) : "'" + pair.id + "'") +
                              ": prediction and ground truth differ in size");
    total += confusion(binarize(pair.prediction, t), pair.ground_truth);
  }
  return total;
}

// Micro-averaged: counts are summed over all pairs before taking ratios.
inline MetricReport evaluate_set(const std::vector<ScoredPair>& pairs, double t) {
  return metrics(pooled_confusion(pairs, t), t);
}

// The 100 thresholds 0.00, 0.01, ..., 0.99.
inline std::vector<double> threshold_grid() {
  std::vector<double> g(100);
  for (int i = 0; i < 100; ++i) g[i] = i / 100.0;
  return g;
}

// Threshold with the highest F over the grid; the smallest wins ties.
inline MetricReport grid_search_threshold(const std::vector<ScoredPair>& pairs) {
  MetricReport best;
  bool first = true;
  for (double t : threshold_grid()) {
    MetricReport m = evaluate_set(pairs, t);
    if (first || m.f > best.f) {
      best = m;
      first = false;
    }
  }
  return best;
}

enum class CurveKind { roc, pr };

struct CurvePoint {
  double threshold = 0.0;
  double x = 0.0;  // roc: FPR, pr: precision
  double y = 0.0;  // roc: TPR, pr: recall
};

inline std::vector<CurvePoint> curve_points(const std::vector<ScoredPair>& pairs, CurveKind kind) {
  std::vector<CurvePoint> out;
  for (double t : threshold_grid()) {
    const MetricReport m = evaluate_set(pairs, t);
    if (kind == CurveKind::roc) {
      const auto& k = m.counts;
      const double fpr = k.fp + k.tn == 0 ? 0.0 : double(k.fp) / double(k.fp + k.tn);
      out.push_back({t, fpr, m.r});
    } else {
      out.push_back({t, m.p, m.r});
    }
  }
  return out;
}

inline void write_curve(const std::vector<CurvePoint>& points, CurveKind kind, std::ostream& out) {
  out << (kind == CurveKind::roc ? "T,FPR,TPR\n" : "T,P,R\n");
  for (const auto& p : points)
    out << format_real(p.threshold) << ',' << format_real(p.x) << ',' << format_real(p.y) << '\n';
}

inline void write_metric_header(std::ostream& out) { out << "dataset,T,G,C,mIoU,P,R,F\n"; }

inline void write_metric_row(const std::string& dataset, const MetricReport& m, std::ostream& out) {
  out << dataset << ',' << format_real(m.threshold) << ',' << format_real(m.g) << ','
      << format_real(m.c) << ',' << format_real(m.miou) << ',' << format_real(m.p) << ','
      << format_real(m.r) << ',' << format_real(m.f) << '\n';
}

struct LossParams {
  double alpha = 0.5;
  double gamma = 3.33;
  double beta = 1.0;
  double eps = 1e-7;
};

struct LossValue {
  double focal = 0.0;  // mean binary focal term
  double dice = 0.0;   // 1 - soft F_beta
  double total = 0.0;
};

// Binary focal loss (pixel mean) plus dice loss on soft counts. Predictions
// are clipped to [eps, 1 - eps]. The prediction mass counts as empty when
// every clipped value sits at eps; with an empty ground truth as well,
// precision and recall are both 1.
inline LossValue focal_dice_loss(const BinaryMask& gt, const ProbabilityMap& pred,
                                 const LossParams& params = {}) {
  if (!gt.same_shape(pred)) throw DimensionMismatch("loss inputs differ in size");
  if (gt.empty()) throw Error("loss needs at least one pixel");
  const double a = params.alpha;
  const double gamma = params.gamma;
  double focal = 0.0;
  double tp = 0.0, fp = 0.0, fn = 0.0;
  bool pred_empty = true;
  bool gt_empty = true;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double p = std::clamp(pred.data[i], params.eps, 1.0 - params.eps);
    const bool g = gt.data[i] != 0;
    if (g) {
      focal += -a * std::pow(1.0 - p, gamma) * std::log(p);
      tp += p;
      fn += 1.0 - p;
      gt_empty = false;
    } else {
      focal += -a * std::pow(p, gamma) * std::log(1.0 - p);
      fp += p;
    }
    if (p > params.eps) pred_empty = false;
  }
  LossValue out;
  out.focal = focal / static_cast<double>(gt.size());

  double precision, recall;
  if (pred_empty && gt_empty) {
    precision = recall = 1.0;
  } else {
    precision = tp + fp > 0.0 ? tp / (tp + fp) : 0.0;
    recall = tp + fn > 0.0 ? tp / (tp + fn) : 0.0;
  }
  const double b2 = params.beta * params.beta;
  const double den = b2 * precision + recall;
  out.dice = den > 0.0 ? 1.0 - (1.0 + b2) * precision * recall / den : 1.0;
  out.total = out.focal + out.dice;
  return out;
}

}  // namespace trueset
