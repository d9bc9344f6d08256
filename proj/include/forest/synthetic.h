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
#ifndef FOREST_SYNTHETIC_H_
#define FOREST_SYNTHETIC_H_

// Seeded generators for demo data and tests. Every generator is a pure
// function of its arguments on every platform (no std distributions).

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "forest/evaluation.h"
#include "forest/nms.h"
#include "forest/scoring.h"
#include "forest/taxonomy.h"

namespace forest::synthetic {

class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}
  double Uniform();                       // [0, 1)
  double Uniform(double lo, double hi);   // [lo, hi)
  int UniformInt(int n);                  // [0, n)
  double Normal();                        // Box-Muller
  uint64_t Raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Balanced partition of `num_leaves` leaves into `num_parents` parents.
// With shuffle == false leaf i goes to parent i * M / N.
ClassificationTree RandomTree(std::string tree_id, int num_leaves, int num_parents,
                              bool shuffle, Rng& rng);

struct LogitSuiteConfig {
  int num_classes = 100;
  int num_parents = 10;
  int num_trees = 3;
  int num_objects = 600;
  double fine_signal = 3.0;     // added to the gt fine logit
  double fine_noise = 1.5;      // stddev of additive fine-logit noise
  double parent_signal = 3.0;   // added to the true parent's logit
  double parent_noise = 1.0;    // stddev of parent-logit noise
  uint64_t seed = 0;
};

struct LogitSuite {
  Forest forest;
  std::vector<LogitRecord> records;
};

// Fine logits: noise everywhere plus a bump on the ground truth. Parent
// logits of every tree: noise plus a bump on the ground truth's parent.
// Tree 0 groups contiguous ids; the others are shuffled partitions.
LogitSuite MakeLogitSuite(const LogitSuiteConfig& cfg);

// Records for an existing forest; cfg's class/parent/tree counts are ignored.
std::vector<LogitRecord> MakeLogitRecords(const Forest& forest,
                                          const LogitSuiteConfig& cfg, Rng& rng);

// Category set with `rare`, `common`, `frequent` classes (in that id order)
// whose cf values are spread over each group's range.
CategorySet MakeLongTailCategories(int rare, int common, int frequent, Rng& rng);

struct ProposalImage {
  std::string image_id;
  std::vector<GroundTruthBox> gts;
  std::vector<ScoredBox> raw;
};

// Box shifted horizontally so that its IoU with `box` equals `iou`.
Box ShiftForIoU(const Box& box, double iou);

// Per ground-truth instance: one exact box plus one box at each IoU in
// `cluster_ious`, scores descending with IoU. Instances never overlap. The
// number of instances of class c is proportional to its cf.
std::vector<ProposalImage> MakeLongTailProposals(const CategorySet& categories,
                                                 const std::vector<double>& cluster_ious,
                                                 int num_images, Rng& rng);

struct DetectionFixture {
  std::vector<GroundTruth> gts;
  std::vector<Detection> dets;
};

// Jittered true positives, missed objects and false positives over
// `num_images` images; with `with_masks`, every box carries a filled mask.
DetectionFixture MakeDetectionFixture(const CategorySet& categories, int num_images,
                                      bool with_masks, Rng& rng);

}  // namespace forest::synthetic

#endif  // FOREST_SYNTHETIC_H_
