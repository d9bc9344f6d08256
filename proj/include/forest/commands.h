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
#ifndef FOREST_COMMANDS_H_
#define FOREST_COMMANDS_H_

// File-to-file entry points behind each CLI subcommand. Every command is
// deterministic in (inputs, options).

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "forest/analysis.h"
#include "forest/evaluation.h"
#include "forest/io.h"
#include "forest/nms.h"
#include "forest/scoring.h"
#include "forest/taxonomy.h"
#include "forest/tree_builder.h"

namespace forest {

Forest LoadForest(const std::vector<std::string>& tree_paths, int num_classes);

// ---------------------------------------------------------------- build-tree

enum class TreeKind { kLexical, kVisual, kGeometric };
TreeKind ParseTreeKind(const std::string& name);

struct BuildTreeOptions {
  TreeKind kind = TreeKind::kLexical;
  std::string categories_path;  // required for lexical, optional otherwise
  std::string input_path;       // hierarchy, feature table or mask fixture
  std::string out_path;
  KMeansConfig kmeans{.k = 0};  // k <= 0 selects 25 (visual) / 50 (geometric)
  int grid_h = kDefaultMaskGrid;
  int grid_w = kDefaultMaskGrid;
};

struct BuildTreeSummary {
  ClassificationTree tree;
  std::vector<int> cluster_sizes;
};

BuildTreeSummary CmdBuildTree(const BuildTreeOptions& opts);

// --------------------------------------------------------------------- score

struct ScoreOptions {
  std::string categories_path;
  std::vector<std::string> tree_paths;
  std::string records_path;
  std::string out_path;
  ScoreMode mode = ScoreMode::kForestScore;
  std::string tree_id;  // kTree / kPreliminary; default is the first tree
  int threads = 1;
  size_t chunk = 1024;  // records in flight
};

struct ScoreSummary {
  int64_t records = 0;
  ScoreMode mode = ScoreMode::kBaseline;
};

ScoreSummary CmdScore(const ScoreOptions& opts);

// ----------------------------------------------------------------------- nms

struct NmsOptions {
  std::string categories_path;
  // Either class-labeled proposals...
  std::string proposals_path;
  // ...or unlabeled boxes plus ground truth to label them by max IoU.
  std::string raw_path;
  std::string gt_path;
  double fg_iou = kDefaultForegroundIoU;
  ResamplingConfig resampling;
  std::string out_path;
  std::string stats_path;  // optional JSON
  int threads = 1;
};

struct Survival {
  int64_t input = 0;
  int64_t kept = 0;
  double ratio() const { return input ? static_cast<double>(kept) / input : 0.0; }
};

struct NmsSummary {
  int64_t images = 0;
  // rare, common, frequent, background
  std::array<Survival, 4> by_group{};
  std::vector<double> thresholds;  // per class id

  const Survival& group(Group g) const { return by_group[static_cast<int>(g)]; }
  const Survival& background() const { return by_group[3]; }
};

io::Json NmsSummaryToJson(const NmsSummary& s, const ResamplingConfig& cfg);

NmsSummary CmdNms(const NmsOptions& opts);

// ------------------------------------------------------------------- analyze

struct AnalyzeOptions {
  std::string categories_path;
  std::vector<std::string> tree_paths;
  // Exactly one of these.
  std::string records_path;
  std::string scores_path;
  NoisyLogitConfig noisy;
  HistogramSpec histogram;
  // Histogram modes when reading records; empty selects baseline plus
  // forest_score when trees are loaded.
  std::vector<ScoreMode> modes;
  std::string out_dir;
  int threads = 1;
  size_t chunk = 1024;
};

struct DensityPair {
  std::string mode;
  Histogram correct;
  Histogram incorrect;
};

struct AnalyzeSummary {
  std::vector<io::NoisyReport> reports;
  std::vector<DensityPair> densities;
};

// Writes <out_dir>/noisy_report.jsonl and
// <out_dir>/density_<mode>_{correct,incorrect}.csv.
AnalyzeSummary CmdAnalyze(const AnalyzeOptions& opts);

// ---------------------------------------------------------------------- eval

struct EvalOptions {
  std::string categories_path;
  std::string detections_path;
  std::string gt_path;
  std::string out_dir;
  int max_dets = kDefaultMaxDets;
  int threads = 1;
};

struct EvalSummary {
  EvalReport box;
  std::optional<EvalReport> mask;  // when ground truth carries masks
  bool no_detections = false;
};

// Writes <out_dir>/eval_bbox.json and eval_bbox_per_class.csv, plus the
// eval_segm.* pair when ground truth carries masks.
EvalSummary CmdEval(const EvalOptions& opts);

// ------------------------------------------------------------------ pipeline

struct PipelineOptions {
  std::string categories_path;
  std::vector<std::string> tree_paths;
  std::string records_path;
  std::string detections_path;
  std::string gt_path;
  ScoreMode mode = ScoreMode::kForestScore;
  NoisyLogitConfig noisy;
  HistogramSpec histogram;
  std::string out_dir;
  int max_dets = kDefaultMaxDets;
  int threads = 1;
};

struct PipelineSummary {
  ScoreSummary score;
  AnalyzeSummary analyze;
  EvalSummary eval;
};

// score -> analyze -> eval, all outputs under out_dir.
PipelineSummary CmdPipeline(const PipelineOptions& opts);

// ------------------------------------------------------------------ make-demo

struct DemoPaths {
  std::string categories, hierarchy, features, masks;
  std::string lexical_tree, visual_tree, geometric_tree;
  std::string records, proposals, raw_proposals, proposal_gt;
  std::string detections, ground_truth;

  std::vector<std::string> trees() const {
    return {lexical_tree, visual_tree, geometric_tree};
  }
};

DemoPaths DemoLayout(const std::string& dir);

// Writes a small long-tailed dataset (60 classes) with every input format,
// and builds its three trees with the default parent counts.
DemoPaths MakeDemo(const std::string& dir, uint64_t seed);

}  // namespace forest

#endif  // FOREST_COMMANDS_H_
