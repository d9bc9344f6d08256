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
#ifndef FOREST_EVALUATION_H_
#define FOREST_EVALUATION_H_

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forest/mask.h"
#include "forest/nms.h"
#include "forest/taxonomy.h"

namespace forest {

struct Detection {
  std::string image_id;
  Box box;
  int class_id = 0;
  double score = 0.0;
  std::optional<RleMask> mask;

  bool operator==(const Detection&) const = default;
};

struct GroundTruth {
  std::string image_id;
  Box box;
  int class_id = 0;
  std::optional<RleMask> mask;

  bool operator==(const GroundTruth&) const = default;
};

enum class IouType { kBox, kMask };

std::string_view IouTypeName(IouType t);

inline constexpr int kNumIouThresholds = 10;
inline constexpr int kNumRecallPoints = 101;
inline constexpr int kDefaultMaxDets = 300;

// 0.50, 0.55, ..., 0.95.
double IouThreshold(int index);

// Mask IoU when both sides carry masks and iou_type is kMask, else box IoU.
double PairIoU(const Detection& det, const GroundTruth& gt, IouType iou_type);

// Greedy matching for one (image, class). `ious[d][g]` is the IoU of the
// d-th detection (by descending score) with gt g. Each detection takes the
// still-unmatched gt with the highest IoU >= iou_thr (ties to the lower gt
// index). Returns the matched gt per detection, -1 for a false positive.
std::vector<int> MatchDetections(const std::vector<std::vector<double>>& ious,
                                 double iou_thr);

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;

  bool operator==(const PrPoint&) const = default;
};

struct PrCurve {
  std::vector<PrPoint> points;
  int n_gt = 0;
  bool excluded = false;  // n_gt == 0

  bool operator==(const PrCurve&) const = default;
};

// One point per detection in sweep order (descending score). Precision is
// replaced by its right-to-left running max.
PrCurve MakePrCurve(const std::vector<bool>& tp_in_score_order, int n_gt);

// Mean over recall r in {0, 0.01, ..., 1} of the curve precision at the
// first point whose recall reaches r (0 if none).
double AveragePrecision(const PrCurve& curve);

struct EvalConfig {
  IouType iou_type = IouType::kBox;
  // Per image and class, like the COCO default.
  int max_dets = kDefaultMaxDets;
  int threads = 1;
};

struct ClassEval {
  int class_id = 0;
  int n_gt = 0;
  std::array<double, kNumIouThresholds> ap{};
  std::array<PrCurve, kNumIouThresholds> curves{};

  double mean_ap() const;
  bool operator==(const ClassEval&) const = default;
};

struct EvalReport {
  IouType iou_type = IouType::kBox;
  double ap = 0.0;
  double ap50 = 0.0;
  double ap75 = 0.0;
  // Unset when the group has no class with ground truth.
  std::optional<double> ap_r, ap_c, ap_f;
  std::vector<ClassEval> per_class;  // classes with n_gt > 0, by id
  int num_detections = 0;
  int num_ground_truths = 0;

  std::optional<double> group_ap(Group g) const;
  bool operator==(const EvalReport&) const = default;
};

// Throws ValidationError when there is no ground truth or a class id falls
// outside the category set.
EvalReport Evaluate(std::span<const Detection> dets, std::span<const GroundTruth> gts,
                    const CategorySet& categories, const EvalConfig& cfg = {});

}  // namespace forest

#endif  // FOREST_EVALUATION_H_
