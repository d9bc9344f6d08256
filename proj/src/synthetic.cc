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
#include "forest/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "forest/status.h"

namespace forest::synthetic {

double Rng::Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

int Rng::UniformInt(int n) {
  return std::min(n - 1, static_cast<int>(Uniform() * n));
}

double Rng::Normal() {
  double u1 = Uniform();
  while (u1 <= 0.0) u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ClassificationTree RandomTree(std::string tree_id, int num_leaves, int num_parents,
                              bool shuffle, Rng& rng) {
  if (num_parents < 1 || num_parents > num_leaves) {
    ThrowValidation("need 1 <= M <= N, got M=", num_parents, ", N=", num_leaves);
  }
  std::vector<int> order(num_leaves);
  for (int i = 0; i < num_leaves; ++i) order[i] = i;
  if (shuffle) {
    for (int i = num_leaves - 1; i > 0; --i) std::swap(order[i], order[rng.UniformInt(i + 1)]);
  }
  ClassificationTree tree;
  tree.tree_id = std::move(tree_id);
  tree.num_parents = num_parents;
  for (int p = 0; p < num_parents; ++p) {
    tree.parent_names.push_back(tree.tree_id + "_" + std::to_string(p));
  }
  tree.leaf_parent.assign(num_leaves, 0);
  for (int pos = 0; pos < num_leaves; ++pos) {
    tree.leaf_parent[order[pos]] =
        static_cast<int>(static_cast<int64_t>(pos) * num_parents / num_leaves);
  }
  return tree;
}

std::vector<LogitRecord> MakeLogitRecords(const Forest& forest,
                                          const LogitSuiteConfig& cfg, Rng& rng) {
  const int n = forest.num_leaves();
  std::vector<LogitRecord> records;
  records.reserve(cfg.num_objects);
  for (int o = 0; o < cfg.num_objects; ++o) {
    LogitRecord rec;
    rec.object_id = "obj" + std::to_string(o);
    const int gt = rng.UniformInt(n);
    rec.gt_class = gt;
    rec.fine_logits.resize(n);
    for (double& z : rec.fine_logits) z = cfg.fine_noise * rng.Normal();
    rec.fine_logits[gt] += cfg.fine_signal;
    for (const ClassificationTree& tree : forest.trees()) {
      std::vector<double> zu(tree.num_parents);
      for (double& z : zu) z = cfg.parent_noise * rng.Normal();
      zu[tree.leaf_parent[gt]] += cfg.parent_signal;
      rec.parent_logits[tree.tree_id] = std::move(zu);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

LogitSuite MakeLogitSuite(const LogitSuiteConfig& cfg) {
  Rng rng(cfg.seed);
  std::vector<ClassificationTree> trees;
  for (int t = 0; t < cfg.num_trees; ++t) {
    trees.push_back(RandomTree("tree" + std::to_string(t), cfg.num_classes,
                               cfg.num_parents, /*shuffle=*/t > 0, rng));
  }
  LogitSuite suite{Forest(std::move(trees)), {}};
  suite.records = MakeLogitRecords(suite.forest, cfg, rng);
  return suite;
}

CategorySet MakeLongTailCategories(int rare, int common, int frequent, Rng& rng) {
  std::vector<Category> cats;
  auto add = [&](int count, int64_t lo, int64_t hi, const char* prefix) {
    for (int i = 0; i < count; ++i) {
      Category c;
      c.id = static_cast<int>(cats.size());
      c.name = std::string(prefix) + "_" + std::to_string(i);
      c.cf = lo + static_cast<int64_t>(rng.Uniform() * static_cast<double>(hi - lo + 1));
      c.cf = std::min(c.cf, hi);
      c.group = AssignGroup(c.cf);
      cats.push_back(std::move(c));
    }
  };
  add(rare, 1, 10, "rare");
  add(common, 11, 100, "common");
  add(frequent, 101, 1000, "frequent");
  return CategorySet(std::move(cats));
}

Box ShiftForIoU(const Box& box, double iou) {
  // Same-size boxes offset by dx along x: IoU = (w - dx) / (w + dx).
  const double w = box.x2 - box.x1;
  const double dx = w * (1.0 - iou) / (1.0 + iou);
  return Box{box.x1 + dx, box.y1, box.x2 + dx, box.y2};
}

std::vector<ProposalImage> MakeLongTailProposals(const CategorySet& categories,
                                                 const std::vector<double>& cluster_ious,
                                                 int num_images, Rng& rng) {
  // Instances of class c across the fixture: ceil(cf / 10).
  std::vector<int> remaining(categories.size());
  for (const Category& c : categories.categories()) {
    remaining[c.id] = static_cast<int>((c.cf + 9) / 10);
  }
  std::vector<ProposalImage> images(num_images);
  for (int i = 0; i < num_images; ++i) images[i].image_id = "img" + std::to_string(i);

  constexpr double kCell = 200.0;
  constexpr double kSize = 100.0;
  std::vector<int> slots(num_images, 0);
  int next_image = 0;
  for (const Category& c : categories.categories()) {
    for (int k = 0; k < remaining[c.id]; ++k) {
      ProposalImage& img = images[next_image];
      const int slot = slots[next_image]++;
      next_image = (next_image + 1) % num_images;
      // Grid cells are far enough apart that instances never overlap.
      const double x = (slot % 20) * kCell + rng.Uniform(0.0, 20.0);
      const double y = (slot / 20) * kCell + rng.Uniform(0.0, 20.0);
      const Box gt{x, y, x + kSize, y + kSize};
      img.gts.push_back({gt, c.id});
      const double top = rng.Uniform(0.8, 1.0);
      img.raw.push_back({gt, top});
      for (size_t j = 0; j < cluster_ious.size(); ++j) {
        img.raw.push_back({ShiftForIoU(gt, cluster_ious[j]),
                           top * (1.0 - 0.05 * static_cast<double>(j + 1))});
      }
    }
  }
  return images;
}

DetectionFixture MakeDetectionFixture(const CategorySet& categories, int num_images,
                                      bool with_masks, Rng& rng) {
  constexpr int kGrid = 64;
  auto mask_for = [&](const Box& b) {
    std::vector<uint8_t> bits(kGrid * kGrid, 0);
    for (int r = 0; r < kGrid; ++r) {
      for (int c = 0; c < kGrid; ++c) {
        const double px = c * 8.0 + 4.0, py = r * 8.0 + 4.0;
        if (px >= b.x1 && px < b.x2 && py >= b.y1 && py < b.y2) bits[r * kGrid + c] = 1;
      }
    }
    return RleMask::FromDense(kGrid, kGrid, bits);
  };
  DetectionFixture fx;
  for (int i = 0; i < num_images; ++i) {
    const std::string image_id = "img" + std::to_string(i);
    const int objects = 1 + rng.UniformInt(4);
    for (int o = 0; o < objects; ++o) {
      const int cls = rng.UniformInt(categories.size());
      const double x = o * 120.0 + rng.Uniform(0.0, 10.0);
      const double y = rng.Uniform(0.0, 300.0);
      const Box box{x, y, x + rng.Uniform(40.0, 100.0), y + rng.Uniform(40.0, 100.0)};
      GroundTruth gt{image_id, box, cls, std::nullopt};
      if (with_masks) gt.mask = mask_for(box);
      fx.gts.push_back(gt);
      const double u = rng.Uniform();
      if (u < 0.15) continue;  // missed
      const double jitter = u < 0.6 ? 2.0 : 15.0;
      Box d{box.x1 + rng.Uniform(-jitter, jitter), box.y1 + rng.Uniform(-jitter, jitter),
            box.x2 + rng.Uniform(-jitter, jitter), box.y2 + rng.Uniform(-jitter, jitter)};
      if (d.x2 < d.x1) std::swap(d.x1, d.x2);
      if (d.y2 < d.y1) std::swap(d.y1, d.y2);
      const int det_cls = rng.Uniform() < 0.85 ? cls : rng.UniformInt(categories.size());
      Detection det{image_id, d, det_cls, rng.Uniform(0.3, 1.0), std::nullopt};
      if (with_masks) det.mask = mask_for(d);
      fx.dets.push_back(det);
    }
    const int spurious = rng.UniformInt(2);
    for (int s = 0; s < spurious; ++s) {
      const double x = rng.Uniform(0.0, 400.0), y = rng.Uniform(0.0, 400.0);
      const Box d{x, y, x + 50.0, y + 50.0};
      Detection det{image_id, d, rng.UniformInt(categories.size()), rng.Uniform(0.0, 0.6),
                    std::nullopt};
      if (with_masks) det.mask = mask_for(d);
      fx.dets.push_back(det);
    }
  }
  return fx;
}

}  // namespace forest::synthetic
