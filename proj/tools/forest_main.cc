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
// forest: build trees, score logits, resample proposals, analyze, evaluate.
//
//   forest build-tree --kind visual --input features.txt --out visual.json
//   forest score --categories c.jsonl --tree t.json --records r.jsonl --out s.jsonl
//   forest nms --categories c.jsonl --proposals p.jsonl --scheme linear --out kept.jsonl
//   forest analyze --categories c.jsonl --tree t.json --records r.jsonl --out-dir out/
//   forest eval --categories c.jsonl --detections d.jsonl --gt g.jsonl --out-dir out/
//   forest pipeline ... --out-dir out/
//   forest make-demo --out-dir demo/
//
// Every flag can also come from --config FILE (key = value lines, with
// [subcommand] sections). Exit codes: 0 ok, 1 validation error, 2 I/O error.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "forest/commands.h"
#include "forest/status.h"

namespace {

using namespace forest;

void PrintGroupLine(const char* name, const Survival& s) {
  std::printf("  %-10s input=%lld kept=%lld ratio=%.4f\n", name,
              static_cast<long long>(s.input), static_cast<long long>(s.kept), s.ratio());
}

void PrintEval(const EvalReport& r) {
  auto opt = [](const std::optional<double>& v) {
    return v ? std::to_string(*v) : std::string("null");
  };
  std::printf("%s: AP=%.4f AP50=%.4f AP75=%.4f APr=%s APc=%s APf=%s\n",
              std::string(IouTypeName(r.iou_type)).c_str(), r.ap, r.ap50, r.ap75,
              opt(r.ap_r).c_str(), opt(r.ap_c).c_str(), opt(r.ap_f).c_str());
}

void PrintAnalyze(const AnalyzeSummary& s) {
  for (const io::NoisyReport& r : s.reports) {
    std::printf("noisy %-16s mean=%.4f objects=%lld\n", r.source.c_str(), r.mean_noisy,
                static_cast<long long>(r.n_objects));
  }
  for (const DensityPair& d : s.densities) {
    std::printf("density %s: correct=%lld incorrect=%lld\n", d.mode.c_str(),
                static_cast<long long>(d.correct.count),
                static_cast<long long>(d.incorrect.count));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Forest calibration toolkit"};
  app.set_config("--config", "", "Key-value config file; flags override it");
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  // build-tree
  BuildTreeOptions bt;
  std::string kind = "lexical";
  int grid = kDefaultMaskGrid;
  auto* build = app.add_subcommand("build-tree", "Build a classification tree");
  build->add_option("--kind", kind, "lexical | visual | geometric")->required();
  build->add_option("--categories", bt.categories_path, "Category file");
  build->add_option("--input", bt.input_path,
                    "Hierarchy JSON, feature table or mask fixture")->required();
  build->add_option("--out", bt.out_path, "Output tree file")->required();
  build->add_option("--k", bt.kmeans.k, "Parents; 0 = 25 visual / 50 geometric");
  build->add_option("--seed", bt.kmeans.seed, "K-means seed");
  build->add_option("--max-iter", bt.kmeans.max_iter, "K-means iteration cap");
  build->add_option("--grid", grid, "Mask resize grid side");

  // score
  ScoreOptions so;
  std::string score_mode = "forest_score";
  auto* score = app.add_subcommand("score", "Score logit records");
  score->add_option("--categories", so.categories_path)->required();
  score->add_option("--tree", so.tree_paths, "Tree file, repeatable");
  score->add_option("--records", so.records_path)->required();
  score->add_option("--out", so.out_path)->required();
  score->add_option("--mode", score_mode,
                    "baseline | preliminary | tree | forest_score | forest_vote");
  score->add_option("--tree-id", so.tree_id, "Tree for tree/preliminary modes");
  score->add_option("--chunk", so.chunk, "Records in flight");

  // nms
  NmsOptions no;
  std::string scheme = "discrete";
  double alpha_f = 0, alpha_c = 0, alpha_r = 0, beta = 0, bg = 0.7, fixed = 0.7;
  bool as_printed = false;
  auto* nms = app.add_subcommand("nms", "Class-aware NMS resampling");
  nms->add_option("--categories", no.categories_path)->required();
  auto* proposals_opt = nms->add_option("--proposals", no.proposals_path, "Labeled proposals");
  auto* raw_opt = nms->add_option("--raw", no.raw_path, "Unlabeled boxes");
  nms->add_option("--gt", no.gt_path, "Ground truth for --raw");
  proposals_opt->excludes(raw_opt);
  nms->add_option("--fg-iou", no.fg_iou, "IoU for labeling raw boxes");
  nms->add_option("--scheme", scheme, "discrete | linear | fixed");
  auto* af = nms->add_option("--alpha-f", alpha_f);
  auto* ac = nms->add_option("--alpha-c", alpha_c);
  auto* ar = nms->add_option("--alpha-r", alpha_r);
  auto* ab = nms->add_option("--beta", beta);
  nms->add_option("--bg-threshold", bg, "Background threshold");
  nms->add_option("--fixed-threshold", fixed, "Threshold for the fixed scheme");
  nms->add_flag("--as-printed", as_printed, "Linear scheme in its literal printed form");
  nms->add_option("--out", no.out_path)->required();
  nms->add_option("--stats", no.stats_path, "Survival stats JSON");

  // analyze
  AnalyzeOptions ao;
  std::vector<std::string> analyze_modes;
  auto* analyze = app.add_subcommand("analyze", "Noisy logits and score densities");
  analyze->add_option("--categories", ao.categories_path)->required();
  analyze->add_option("--tree", ao.tree_paths, "Tree file, repeatable");
  auto* rec_opt = analyze->add_option("--records", ao.records_path);
  auto* sc_opt = analyze->add_option("--scores", ao.scores_path);
  rec_opt->excludes(sc_opt);
  analyze->add_option("--eps-gt", ao.noisy.eps_gt);
  analyze->add_option("--eps-neg", ao.noisy.eps_neg);
  analyze->add_option("--bins", ao.histogram.bin_count)->check(CLI::PositiveNumber);
  analyze->add_option("--mode", analyze_modes, "Histogram mode, repeatable");
  analyze->add_option("--out-dir", ao.out_dir)->required();

  // eval
  EvalOptions eo;
  auto* eval = app.add_subcommand("eval", "Box and mask AP");
  eval->add_option("--categories", eo.categories_path)->required();
  eval->add_option("--detections", eo.detections_path)->required();
  eval->add_option("--gt", eo.gt_path)->required();
  eval->add_option("--out-dir", eo.out_dir)->required();
  eval->add_option("--max-dets", eo.max_dets)->check(CLI::PositiveNumber);

  // pipeline
  PipelineOptions po;
  std::string pipeline_mode = "forest_score";
  auto* pipeline = app.add_subcommand("pipeline", "score, analyze and eval in sequence");
  pipeline->add_option("--categories", po.categories_path)->required();
  pipeline->add_option("--tree", po.tree_paths, "Tree file, repeatable");
  pipeline->add_option("--records", po.records_path)->required();
  pipeline->add_option("--detections", po.detections_path)->required();
  pipeline->add_option("--gt", po.gt_path)->required();
  pipeline->add_option("--mode", pipeline_mode);
  pipeline->add_option("--eps-gt", po.noisy.eps_gt);
  pipeline->add_option("--eps-neg", po.noisy.eps_neg);
  pipeline->add_option("--max-dets", po.max_dets)->check(CLI::PositiveNumber);
  pipeline->add_option("--out-dir", po.out_dir)->required();

  // make-demo
  std::string demo_dir;
  uint64_t demo_seed = 0;
  auto* demo = app.add_subcommand("make-demo", "Write a small synthetic dataset");
  demo->add_option("--out-dir", demo_dir)->required();
  demo->add_option("--seed", demo_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*build) {
      bt.kind = ParseTreeKind(kind);
      bt.grid_h = bt.grid_w = grid;
      const BuildTreeSummary s = CmdBuildTree(bt);
      std::printf("tree %s: M=%d\n", s.tree.tree_id.c_str(), s.tree.num_parents);
      std::printf("cluster sizes:");
      for (int n : s.cluster_sizes) std::printf(" %d", n);
      std::printf("\n");
    } else if (*score) {
      so.mode = ParseScoreMode(score_mode);
      so.threads = threads;
      const ScoreSummary s = CmdScore(so);
      std::printf("scored %lld records, mode %s\n", static_cast<long long>(s.records),
                  std::string(ScoreModeName(s.mode)).c_str());
    } else if (*nms) {
      const ThresholdScheme ts = ParseScheme(scheme);
      no.resampling = ts == ThresholdScheme::kLinear ? ResamplingConfig::LinearDefaults()
                      : ts == ThresholdScheme::kFixed ? ResamplingConfig::Fixed(fixed)
                                                      : ResamplingConfig::DiscreteDefaults();
      if (af->count()) no.resampling.alpha_f = alpha_f;
      if (ac->count()) no.resampling.alpha_c = alpha_c;
      if (ar->count()) no.resampling.alpha_r = alpha_r;
      if (ab->count()) no.resampling.beta = beta;
      no.resampling.background_threshold = bg;
      no.resampling.as_printed = as_printed;
      no.resampling.Validate();
      no.threads = threads;
      const NmsSummary s = CmdNms(no);
      std::printf("nms over %lld images, scheme %s\n", static_cast<long long>(s.images),
                  std::string(SchemeName(no.resampling.scheme)).c_str());
      for (Group g : kAllGroups) PrintGroupLine(std::string(GroupName(g)).c_str(), s.group(g));
      PrintGroupLine("background", s.background());
    } else if (*analyze) {
      for (const std::string& m : analyze_modes) ao.modes.push_back(ParseScoreMode(m));
      ao.threads = threads;
      PrintAnalyze(CmdAnalyze(ao));
    } else if (*eval) {
      eo.threads = threads;
      const EvalSummary s = CmdEval(eo);
      if (s.no_detections) std::fprintf(stderr, "warning: no detections\n");
      PrintEval(s.box);
      if (s.mask) PrintEval(*s.mask);
    } else if (*pipeline) {
      po.mode = ParseScoreMode(pipeline_mode);
      po.threads = threads;
      const PipelineSummary s = CmdPipeline(po);
      std::printf("scored %lld records, mode %s\n", static_cast<long long>(s.score.records),
                  std::string(ScoreModeName(s.score.mode)).c_str());
      PrintAnalyze(s.analyze);
      if (s.eval.no_detections) std::fprintf(stderr, "warning: no detections\n");
      PrintEval(s.eval.box);
      if (s.eval.mask) PrintEval(*s.eval.mask);
    } else if (*demo) {
      const DemoPaths p = MakeDemo(demo_dir, demo_seed);
      std::printf("demo written to %s\n", demo_dir.c_str());
      std::printf("  categories %s\n  records %s\n  detections %s\n", p.categories.c_str(),
                  p.records.c_str(), p.detections.c_str());
    }
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const IoError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
