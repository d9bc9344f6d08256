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
#include "forest/nms.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "forest/status.h"

namespace forest {

double IoU(const Box& a, const Box& b) {
  const double iw = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double ih = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  const double inter = (iw > 0 && ih > 0) ? iw * ih : 0.0;
  const double uni = a.area() + b.area() - inter;
  return uni > 0 ? inter / uni : 0.0;
}

std::string_view SchemeName(ThresholdScheme scheme) {
  switch (scheme) {
    case ThresholdScheme::kDiscrete:
      return "discrete";
    case ThresholdScheme::kLinear:
      return "linear";
    case ThresholdScheme::kFixed:
      return "fixed";
  }
  return "unknown";
}

ThresholdScheme ParseScheme(std::string_view name) {
  if (name == "discrete") return ThresholdScheme::kDiscrete;
  if (name == "linear") return ThresholdScheme::kLinear;
  if (name == "fixed") return ThresholdScheme::kFixed;
  ThrowValidation("unknown threshold scheme '", name, "'");
}

ResamplingConfig ResamplingConfig::DiscreteDefaults() { return ResamplingConfig{}; }

ResamplingConfig ResamplingConfig::LinearDefaults() {
  ResamplingConfig cfg;
  cfg.scheme = ThresholdScheme::kLinear;
  cfg.alpha_f = 0.65;
  cfg.alpha_c = 0.75;
  cfg.alpha_r = 0.85;
  cfg.beta = 0.1;
  return cfg;
}

ResamplingConfig ResamplingConfig::Fixed(double threshold) {
  ResamplingConfig cfg;
  cfg.scheme = ThresholdScheme::kFixed;
  cfg.fixed_threshold = threshold;
  return cfg;
}

void ResamplingConfig::Validate() const {
  auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
  if (!(background_threshold >= 0.0 && background_threshold <= 1.0)) {
    ThrowValidation("background threshold ", background_threshold,
                    " outside [0, 1]");
  }
  if (scheme == ThresholdScheme::kFixed) {
    if (!(fixed_threshold >= 0.0 && fixed_threshold <= 1.0)) {
      ThrowValidation("fixed threshold ", fixed_threshold, " outside [0, 1]");
    }
    return;
  }
  if (!in_unit(alpha_f) || !in_unit(alpha_c) || !in_unit(alpha_r)) {
    ThrowValidation("alphas must lie in (0, 1)");
  }
  if (!(alpha_f < alpha_c && alpha_c < alpha_r)) {
    ThrowValidation("alphas must satisfy alpha_f < alpha_c < alpha_r, got ", alpha_f,
                    ", ", alpha_c, ", ", alpha_r);
  }
  if (scheme == ThresholdScheme::kLinear) {
    if (!(beta >= 0.0)) ThrowValidation("beta must be non-negative");
    if (alpha_r + beta > 1.0 + 1e-12) {
      ThrowValidation("alpha_r + beta = ", alpha_r + beta, " exceeds 1");
    }
  }
}

double ThresholdDiscrete(Group group, const ResamplingConfig& cfg) {
  switch (group) {
    case Group::kFrequent:
      return cfg.alpha_f;
    case Group::kCommon:
      return cfg.alpha_c;
    case Group::kRare:
      return cfg.alpha_r;
  }
  return cfg.alpha_c;
}

double ThresholdLinear(int64_t cf, Group group, const GroupFrequencyRange& range,
                       const ResamplingConfig& cfg) {
  if (range.count == 0 || cf < range.cf_min || cf > range.cf_max) {
    ThrowValidation("cf=", cf, " outside the ", GroupName(group), " range [",
                    range.cf_min, ", ", range.cf_max, "]");
  }
  double base = ThresholdDiscrete(group, cfg);
  if (cfg.as_printed) {
    if (group == Group::kFrequent) base = cfg.alpha_r;
    if (group == Group::kRare) base = cfg.alpha_f;
  }
  if (range.cf_max == range.cf_min) return base;
  const double fraction = static_cast<double>(range.cf_max - cf) /
                          static_cast<double>(range.cf_max - range.cf_min);
  return base + cfg.beta * fraction;
}

std::vector<double> ClassThresholds(const CategorySet& categories,
                                    const ResamplingConfig& cfg) {
  cfg.Validate();
  std::vector<double> thresholds(categories.size());
  for (const Category& c : categories.categories()) {
    switch (cfg.scheme) {
      case ThresholdScheme::kDiscrete:
        thresholds[c.id] = ThresholdDiscrete(c.group, cfg);
        break;
      case ThresholdScheme::kLinear:
        thresholds[c.id] = ThresholdLinear(c.cf, c.group, categories.range(c.group), cfg);
        break;
      case ThresholdScheme::kFixed:
        thresholds[c.id] = cfg.fixed_threshold;
        break;
    }
  }
  return thresholds;
}

std::vector<Proposal> MatchProposalsToGt(std::span<const ScoredBox> boxes,
                                         std::span<const GroundTruthBox> gts,
                                         double fg_iou) {
  if (!(fg_iou > 0.0 && fg_iou < 1.0)) {
    ThrowValidation("foreground IoU ", fg_iou, " outside (0, 1)");
  }
  std::vector<Proposal> out;
  out.reserve(boxes.size());
  for (const ScoredBox& b : boxes) {
    Proposal p{b.box, b.score, kBackground};
    double best = -1.0;
    int best_gt = -1;
    for (size_t g = 0; g < gts.size(); ++g) {
      const double v = IoU(b.box, gts[g].box);
      if (v > best) {
        best = v;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0 && best >= fg_iou) p.class_id = gts[best_gt].class_id;
    out.push_back(p);
  }
  return out;
}

std::vector<size_t> ClassAwareNmsIndices(std::span<const Proposal> proposals,
                                         std::span<const double> thresholds,
                                         double background_threshold) {
  const size_t n = proposals.size();
  std::vector<double> thr(n);
  for (size_t i = 0; i < n; ++i) {
    const Proposal& p = proposals[i];
    if (!std::isfinite(p.score)) ThrowValidation("proposal ", i, " has a non-finite score");
    if (p.class_id == kBackground) {
      thr[i] = background_threshold;
    } else if (p.class_id < 0 || static_cast<size_t>(p.class_id) >= thresholds.size()) {
      ThrowValidation("no NMS threshold for class ", p.class_id);
    } else {
      thr[i] = thresholds[p.class_id];
    }
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return proposals[a].score > proposals[b].score;
  });

  std::vector<char> suppressed(n, 0);
  std::vector<size_t> keep;
  for (size_t oi = 0; oi < n; ++oi) {
    const size_t i = order[oi];
    if (suppressed[i]) continue;
    keep.push_back(i);
    const Box& bi = proposals[i].box;
    for (size_t oj = oi + 1; oj < n; ++oj) {
      const size_t j = order[oj];
      if (!suppressed[j] && IoU(bi, proposals[j].box) > thr[i]) suppressed[j] = 1;
    }
  }
  return keep;
}

std::vector<Proposal> ClassAwareNms(std::span<const Proposal> proposals,
                                    std::span<const double> thresholds,
                                    double background_threshold) {
  std::vector<Proposal> kept;
  for (size_t i : ClassAwareNmsIndices(proposals, thresholds, background_threshold)) {
    kept.push_back(proposals[i]);
  }
  return kept;
}

}  // namespace forest
