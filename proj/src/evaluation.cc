/* Copyright 2026 The Forest Calibration Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "forest/evaluation.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "forest/parallel.h"
#include "forest/status.h"

namespace forest {
namespace {

// Detections and ground truths of one class, bucketed by image.
struct ClassBuckets {
  std::map<std::string, std::vector<size_t>> dets;
  std::map<std::string, std::vector<size_t>> gts;
  int n_gt = 0;
};

ClassEval EvaluateClass(int class_id, const ClassBuckets& buckets,
                        std::span<const Detection> dets,
                        std::span<const GroundTruth> gts, const EvalConfig& cfg) {
  ClassEval out;
  out.class_id = class_id;
  out.n_gt = buckets.n_gt;

  // Sweep order: images by id, detections by descending score within an
  // image, then a stable sort over the concatenation.
  struct Swept {
    double score;
    std::array<bool, kNumIouThresholds> tp;
  };
  std::vector<Swept> swept;
  for (const auto& [image_id, det_idx] : buckets.dets) {
    std::vector<size_t> order = det_idx;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return dets[a].score > dets[b].score;
    });
    if (static_cast<int>(order.size()) > cfg.max_dets) order.resize(cfg.max_dets);

    static const std::vector<size_t> kNone;
    auto git = buckets.gts.find(image_id);
    const std::vector<size_t>& gt_idx = git == buckets.gts.end() ? kNone : git->second;
    std::vector<std::vector<double>> ious(order.size(),
                                          std::vector<double>(gt_idx.size()));
    for (size_t d = 0; d < order.size(); ++d) {
      for (size_t g = 0; g < gt_idx.size(); ++g) {
        ious[d][g] = PairIoU(dets[order[d]], gts[gt_idx[g]], cfg.iou_type);
      }
    }
    const size_t base = swept.size();
    for (size_t d : order) swept.push_back({dets[d].score, {}});
    for (int t = 0; t < kNumIouThresholds; ++t) {
      const std::vector<int> match = MatchDetections(ious, IouThreshold(t));
      for (size_t d = 0; d < order.size(); ++d) swept[base + d].tp[t] = match[d] >= 0;
    }
  }
  std::stable_sort(swept.begin(), swept.end(),
                   [](const Swept& a, const Swept& b) { return a.score > b.score; });

  std::vector<bool> flags(swept.size());
  for (int t = 0; t < kNumIouThresholds; ++t) {
    for (size_t i = 0; i < swept.size(); ++i) flags[i] = swept[i].tp[t];
    out.curves[t] = MakePrCurve(flags, out.n_gt);
    out.ap[t] = AveragePrecision(out.curves[t]);
  }
  return out;
}

double Mean(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

}  // namespace

std::string_view IouTypeName(IouType t) {
  return t == IouType::kMask ? "segm" : "bbox";
}

double IouThreshold(int index) { return (50 + 5 * index) / 100.0; }

double PairIoU(const Detection& det, const GroundTruth& gt, IouType iou_type) {
  if (iou_type == IouType::kMask && det.mask && gt.mask) {
    return MaskIoU(*det.mask, *gt.mask);
  }
  return IoU(det.box, gt.box);
}

std::vector<int> MatchDetections(const std::vector<std::vector<double>>& ious,
                                 double iou_thr) {
  std::vector<int> match(ious.size(), -1);
  std::vector<char> taken;
  for (size_t d = 0; d < ious.size(); ++d) {
    const std::vector<double>& row = ious[d];
    if (taken.size() < row.size()) taken.resize(row.size(), 0);
    int best = -1;
    double best_iou = iou_thr;
    for (size_t g = 0; g < row.size(); ++g) {
      if (taken[g] || row[g] < iou_thr) continue;
      if (best < 0 || row[g] > best_iou) {
        best = static_cast<int>(g);
        best_iou = row[g];
      }
    }
    if (best >= 0) {
      taken[best] = 1;
      match[d] = best;
    }
  }
  return match;
}

PrCurve MakePrCurve(const std::vector<bool>& tp_in_score_order, int n_gt) {
  PrCurve curve;
  curve.n_gt = n_gt;
  if (n_gt < 0) ThrowValidation("negative ground-truth count");
  if (n_gt == 0) {
    curve.excluded = true;
    return curve;
  }
  curve.points.reserve(tp_in_score_order.size());
  int64_t tp = 0, fp = 0;
  for (bool is_tp : tp_in_score_order) {
    is_tp ? ++tp : ++fp;
    curve.points.push_back({static_cast<double>(tp) / n_gt,
                            static_cast<double>(tp) / static_cast<double>(tp + fp)});
  }
  for (size_t i = curve.points.size(); i-- > 1;) {
    curve.points[i - 1].precision =
        std::max(curve.points[i - 1].precision, curve.points[i].precision);
  }
  return curve;
}

double AveragePrecision(const PrCurve& curve) {
  if (curve.excluded || curve.points.empty()) return 0.0;
  double sum = 0.0;
  size_t i = 0;
  for (int k = 0; k < kNumRecallPoints; ++k) {
    const double r = k / 100.0;
    while (i < curve.points.size() && curve.points[i].recall < r) ++i;
    if (i == curve.points.size()) break;
    sum += curve.points[i].precision;
  }
  return sum / kNumRecallPoints;
}

double ClassEval::mean_ap() const { return Mean(ap); }

std::optional<double> EvalReport::group_ap(Group g) const {
  switch (g) {
    case Group::kRare:
      return ap_r;
    case Group::kCommon:
      return ap_c;
    case Group::kFrequent:
      return ap_f;
  }
  return std::nullopt;
}

EvalReport Evaluate(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                    const CategorySet& categories, const EvalConfig& cfg) {
  if (gts.empty()) ThrowValidation("no ground truth to evaluate against");
  if (cfg.max_dets < 1) ThrowValidation("max_dets must be positive");
  const int n = categories.size();
  std::vector<ClassBuckets> buckets(n);
  for (size_t i = 0; i < gts.size(); ++i) {
    const int c = gts[i].class_id;
    if (c < 0 || c >= n) ThrowValidation("ground truth ", i, " has class ", c, " outside [0, ", n, ")");
    buckets[c].gts[gts[i].image_id].push_back(i);
    ++buckets[c].n_gt;
  }
  for (size_t i = 0; i < dets.size(); ++i) {
    const int c = dets[i].class_id;
    if (c < 0 || c >= n) ThrowValidation("detection ", i, " has class ", c, " outside [0, ", n, ")");
    if (!std::isfinite(dets[i].score)) ThrowValidation("detection ", i, " has a non-finite score");
    buckets[c].dets[dets[i].image_id].push_back(i);
  }

  std::vector<int> present;
  for (int c = 0; c < n; ++c) {
    if (buckets[c].n_gt > 0) present.push_back(c);
  }

  EvalReport report;
  report.iou_type = cfg.iou_type;
  report.num_detections = static_cast<int>(dets.size());
  report.num_ground_truths = static_cast<int>(gts.size());
  report.per_class.resize(present.size());
  ParallelFor(present.size(), cfg.threads, [&](size_t k) {
    report.per_class[k] = EvaluateClass(present[k], buckets[present[k]], dets, gts, cfg);
  });

  std::vector<double> all, at50, at75;
  std::array<std::vector<double>, 3> by_group;
  for (const ClassEval& ce : report.per_class) {
    all.push_back(ce.mean_ap());
    at50.push_back(ce.ap[0]);
    at75.push_back(ce.ap[5]);
    by_group[static_cast<int>(categories[ce.class_id].group)].push_back(ce.mean_ap());
  }
  report.ap = Mean(all);
  report.ap50 = Mean(at50);
  report.ap75 = Mean(at75);
  auto group_mean = [&](Group g) -> std::optional<double> {
    const auto& v = by_group[static_cast<int>(g)];
    if (v.empty()) return std::nullopt;
    return Mean(v);
  };
  report.ap_r = group_mean(Group::kRare);
  report.ap_c = group_mean(Group::kCommon);
  report.ap_f = group_mean(Group::kFrequent);
  return report;
}

}  // namespace forest
