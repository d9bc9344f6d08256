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
#ifndef FOREST_NMS_H_
#define FOREST_NMS_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "forest/taxonomy.h"

namespace forest {

inline constexpr int kBackground = -1;

// Axis-aligned box in pixels; area is (x2 - x1) * (y2 - y1), no +1.
struct Box {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;

  double area() const { return (x2 - x1) * (y2 - y1); }
  bool valid() const { return x2 >= x1 && y2 >= y1; }
  bool operator==(const Box&) const = default;
};

// Intersection over union; 0 when the union is empty.
double IoU(const Box& a, const Box& b);

struct Proposal {
  Box box;
  double score = 0.0;
  int class_id = kBackground;

  bool operator==(const Proposal&) const = default;
};

enum class ThresholdScheme { kDiscrete, kLinear, kFixed };

std::string_view SchemeName(ThresholdScheme scheme);
ThresholdScheme ParseScheme(std::string_view name);

struct ResamplingConfig {
  ThresholdScheme scheme = ThresholdScheme::kDiscrete;
  double alpha_f = 0.7;
  double alpha_c = 0.8;
  double alpha_r = 0.9;
  double beta = 0.0;
  double background_threshold = 0.7;
  double fixed_threshold = 0.7;
  // Linear scheme only: swap the frequent and rare bases
  // (frequent -> alpha_r, rare -> alpha_f), the usual printed form.
  bool as_printed = false;

  // (0.7, 0.8, 0.9).
  static ResamplingConfig DiscreteDefaults();
  // (0.65, 0.75, 0.85), beta 0.1.
  static ResamplingConfig LinearDefaults();
  static ResamplingConfig Fixed(double threshold);

  // Throws ValidationError on violated ordering or ranges.
  void Validate() const;
};

double ThresholdDiscrete(Group group, const ResamplingConfig& cfg);

// base(group) + beta * (cf_max - cf) / (cf_max - cf_min) with
// base(frequent) = alpha_f, base(common) = alpha_c, base(rare) = alpha_r.
// A singleton-range group gets its base. cf must lie in the group's range.
double ThresholdLinear(int64_t cf, Group group, const GroupFrequencyRange& range,
                       const ResamplingConfig& cfg);

// Threshold for every class id under cfg.scheme.
std::vector<double> ClassThresholds(const CategorySet& categories,
                                    const ResamplingConfig& cfg);

struct ScoredBox {
  Box box;
  double score = 0.0;
};

struct GroundTruthBox {
  Box box;
  int class_id = 0;
};

inline constexpr double kDefaultForegroundIoU = 0.5;

// Labels each box with its max-IoU ground truth's class when that IoU is at
// least fg_iou, else background. IoU ties go to the lower gt index.
std::vector<Proposal> MatchProposalsToGt(std::span<const ScoredBox> boxes,
                                         std::span<const GroundTruthBox> gts,
                                         double fg_iou = kDefaultForegroundIoU);

// Greedy class-aware NMS. Proposals are visited by descending score (ties by
// input order); each kept proposal suppresses every later one whose IoU with
// it exceeds the kept proposal's threshold: thresholds[class_id] for
// foreground, background_threshold for background. Returns input indices in
// keep order.
std::vector<size_t> ClassAwareNmsIndices(std::span<const Proposal> proposals,
                                         std::span<const double> thresholds,
                                         double background_threshold);

std::vector<Proposal> ClassAwareNms(std::span<const Proposal> proposals,
                                    std::span<const double> thresholds,
                                    double background_threshold);

}  // namespace forest

#endif  // FOREST_NMS_H_
