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
#include "forest/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <unordered_set>

#include "forest/parallel.h"
#include "forest/status.h"
#include "forest/synthetic.h"

namespace forest {
namespace {

namespace fs = std::filesystem;
using io::Json;

void EnsureDir(const std::string& dir) {
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void EnsureParentDir(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) EnsureDir(parent.string());
}

std::string JoinPath(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

bool NeedsTree(ScoreMode mode) { return mode != ScoreMode::kBaseline; }

const ClassificationTree* ResolveTree(const Forest& forest, ScoreMode mode,
                                      const std::string& tree_id) {
  if (mode != ScoreMode::kTree && mode != ScoreMode::kPreliminary) return nullptr;
  if (tree_id.empty()) return &forest[0];
  const ClassificationTree* t = forest.Find(tree_id);
  if (t == nullptr) ThrowValidation("no loaded tree named '", tree_id, "'");
  return t;
}

// Reads up to `limit` records, validating each against N and the forest.
std::vector<LogitRecord> ReadRecordChunk(io::JsonLinesReader& reader, size_t limit,
                                         int num_classes, const Forest& forest) {
  std::vector<LogitRecord> chunk;
  Json j;
  while (chunk.size() < limit && reader.Next(j)) {
    chunk.push_back(io::WithLineContext(reader, [&] {
      LogitRecord rec = io::RecordFromJson(j);
      ValidateRecord(rec, num_classes, forest.size() ? &forest : nullptr);
      return rec;
    }));
  }
  return chunk;
}

}  // namespace

Forest LoadForest(const std::vector<std::string>& tree_paths, int num_classes) {
  std::vector<ClassificationTree> trees;
  for (const std::string& path : tree_paths) {
    ClassificationTree t = io::ReadTree(path);
    std::vector<std::string> errors = TreeViolations(t, num_classes);
    if (!errors.empty()) {
      std::string msg = path + ": invalid tree '" + t.tree_id + "':";
      for (const std::string& e : errors) msg += " " + e + ";";
      throw ValidationError(msg);
    }
    trees.push_back(std::move(t));
  }
  if (trees.empty()) return Forest();
  return Forest(std::move(trees));
}

// ---------------------------------------------------------------- build-tree

TreeKind ParseTreeKind(const std::string& name) {
  if (name == "lexical") return TreeKind::kLexical;
  if (name == "visual") return TreeKind::kVisual;
  if (name == "geometric") return TreeKind::kGeometric;
  ThrowValidation("unknown tree kind '", name, "' (lexical|visual|geometric)");
}

BuildTreeSummary CmdBuildTree(const BuildTreeOptions& opts) {
  std::optional<CategorySet> categories;
  if (!opts.categories_path.empty()) categories = io::ReadCategories(opts.categories_path);
  KMeansConfig km = opts.kmeans;

  BuildTreeSummary out;
  switch (opts.kind) {
    case TreeKind::kLexical: {
      if (!categories) ThrowValidation("lexical trees need a category file");
      const Hierarchy h = io::ReadHierarchy(opts.input_path);
      try {
        out.tree = BuildLexicalTree(h, *categories);
      } catch (const ValidationError& e) {
        throw ValidationError(opts.input_path + ": " + e.what());
      }
      break;
    }
    case TreeKind::kVisual: {
      if (km.k <= 0) km.k = kDefaultVisualParents;
      const FeatureTable table = io::ReadFeatureTable(opts.input_path);
      if (categories && table.rows() != categories->size()) {
        ThrowValidation(opts.input_path, ": feature table has ", table.rows(),
                        " rows but there are ", categories->size(), " categories");
      }
      out.tree = BuildVisualTree(table, km);
      break;
    }
    case TreeKind::kGeometric: {
      if (km.k <= 0) km.k = kDefaultGeometricParents;
      int n = categories ? categories->size() : 0;
      if (n == 0) {
        // Class count from the fixture itself: one past the largest class id.
        io::JsonLinesReader reader(opts.input_path);
        Json j;
        while (reader.Next(j)) {
          n = std::max(n, io::WithLineContext(reader, [&] {
                            return j.at("class_id").get<int>() + 1;
                          }));
        }
      }
      const auto masks = io::ReadMaskFixture(opts.input_path, n);
      out.tree = BuildGeometricTree(masks, opts.grid_h, opts.grid_w, km);
      break;
    }
  }
  out.cluster_sizes = out.tree.ParentSizes();
  if (!opts.out_path.empty()) {
    EnsureParentDir(opts.out_path);
    io::WriteTree(opts.out_path, out.tree);
  }
  return out;
}

// --------------------------------------------------------------------- score

ScoreSummary CmdScore(const ScoreOptions& opts) {
  const CategorySet categories = io::ReadCategories(opts.categories_path);
  const Forest forest = LoadForest(opts.tree_paths, categories.size());
  if (NeedsTree(opts.mode) && forest.size() == 0) {
    ThrowValidation("mode '", ScoreModeName(opts.mode), "' needs at least one tree");
  }
  const ClassificationTree* tree = ResolveTree(forest, opts.mode, opts.tree_id);

  io::JsonLinesReader reader(opts.records_path);
  EnsureParentDir(opts.out_path);
  io::JsonLinesWriter writer(opts.out_path);
  ScoreSummary summary;
  summary.mode = opts.mode;
  for (;;) {
    std::vector<LogitRecord> chunk =
        ReadRecordChunk(reader, std::max<size_t>(opts.chunk, 1), categories.size(), forest);
    if (chunk.empty()) break;
    std::vector<io::ScoreLine> lines(chunk.size());
    ParallelFor(chunk.size(), opts.threads, [&](size_t i) {
      lines[i].object_id = chunk[i].object_id;
      lines[i].gt_class = chunk[i].gt_class;
      lines[i].result = Score(chunk[i], opts.mode, forest,
                              tree ? std::string_view(tree->tree_id) : std::string_view());
    });
    for (const io::ScoreLine& line : lines) writer.Write(io::ScoreLineToJson(line));
    summary.records += static_cast<int64_t>(chunk.size());
  }
  writer.Close();
  return summary;
}

// ----------------------------------------------------------------------- nms

Json NmsSummaryToJson(const NmsSummary& s, const ResamplingConfig& cfg) {
  Json groups = Json::object();
  auto entry = [](const Survival& v) {
    return Json{{"input", v.input}, {"kept", v.kept}, {"ratio", v.ratio()}};
  };
  for (Group g : kAllGroups) groups[std::string(GroupName(g))] = entry(s.group(g));
  groups["background"] = entry(s.background());
  return Json{{"scheme", std::string(SchemeName(cfg.scheme))},
              {"as_printed", cfg.as_printed},
              {"alpha_f", cfg.alpha_f},
              {"alpha_c", cfg.alpha_c},
              {"alpha_r", cfg.alpha_r},
              {"beta", cfg.beta},
              {"background_threshold", cfg.background_threshold},
              {"images", s.images},
              {"groups", groups},
              {"thresholds", s.thresholds}};
}

NmsSummary CmdNms(const NmsOptions& opts) {
  const CategorySet categories = io::ReadCategories(opts.categories_path);
  const bool raw_mode = opts.proposals_path.empty();
  if (raw_mode && (opts.raw_path.empty() || opts.gt_path.empty())) {
    ThrowValidation("nms needs either a proposal file or raw boxes plus ground truth");
  }
  NmsSummary summary;
  summary.thresholds = ClassThresholds(categories, opts.resampling);
  const int n = categories.size();

  std::map<std::string, std::vector<GroundTruthBox>> gts_by_image;
  if (raw_mode) {
    for (const GroundTruth& g : io::ReadGroundTruth(opts.gt_path)) {
      if (g.class_id >= n) {
        ThrowValidation(opts.gt_path, ": unknown class id ", g.class_id);
      }
      gts_by_image[g.image_id].push_back({g.box, g.class_id});
    }
  }

  struct ImageBatch {
    std::string image_id;
    std::vector<Proposal> proposals;
    std::vector<size_t> keep;
  };

  io::JsonLinesReader reader(raw_mode ? opts.raw_path : opts.proposals_path);
  EnsureParentDir(opts.out_path);
  io::JsonLinesWriter writer(opts.out_path);
  std::unordered_set<std::string> finished;

  auto flush = [&](std::vector<ImageBatch>& batch) {
    ParallelFor(batch.size(), opts.threads, [&](size_t b) {
      ImageBatch& img = batch[b];
      if (raw_mode) {
        std::vector<ScoredBox> boxes;
        boxes.reserve(img.proposals.size());
        for (const Proposal& p : img.proposals) boxes.push_back({p.box, p.score});
        static const std::vector<GroundTruthBox> kNone;
        auto it = gts_by_image.find(img.image_id);
        img.proposals = MatchProposalsToGt(
            boxes, it == gts_by_image.end() ? kNone : it->second, opts.fg_iou);
      }
      img.keep = ClassAwareNmsIndices(img.proposals, summary.thresholds,
                                      opts.resampling.background_threshold);
    });
    for (const ImageBatch& img : batch) {
      auto slot = [&](int class_id) -> Survival& {
        return class_id == kBackground
                   ? summary.by_group[3]
                   : summary.by_group[static_cast<int>(categories[class_id].group)];
      };
      for (const Proposal& p : img.proposals) ++slot(p.class_id).input;
      for (size_t rank = 0; rank < img.keep.size(); ++rank) {
        const Proposal& p = img.proposals[img.keep[rank]];
        ++slot(p.class_id).kept;
        writer.Write(io::ProposalToJson({img.image_id, p, static_cast<int>(rank)}));
      }
      ++summary.images;
    }
    batch.clear();
  };

  constexpr size_t kImagesInFlight = 64;
  std::vector<ImageBatch> batch;
  Json j;
  while (reader.Next(j)) {
    io::ImageProposal p = io::WithLineContext(reader, [&] {
      io::ImageProposal ip = io::ProposalFromJson(j);
      if (!raw_mode && ip.proposal.class_id >= n) {
        ThrowValidation("unknown class id ", ip.proposal.class_id);
      }
      if (batch.empty() || batch.back().image_id != ip.image_id) {
        if (finished.count(ip.image_id)) {
          ThrowValidation("proposals of image '", ip.image_id,
                          "' are not contiguous in the file");
        }
      }
      return ip;
    });
    if (batch.empty() || batch.back().image_id != p.image_id) {
      if (!batch.empty()) finished.insert(batch.back().image_id);
      if (batch.size() >= kImagesInFlight) flush(batch);
      batch.push_back({p.image_id, {}, {}});
    }
    batch.back().proposals.push_back(p.proposal);
  }
  flush(batch);
  writer.Close();

  if (!opts.stats_path.empty()) {
    EnsureParentDir(opts.stats_path);
    io::WriteTextFile(opts.stats_path, NmsSummaryToJson(summary, opts.resampling).dump(2) + "\n");
  }
  return summary;
}

// ------------------------------------------------------------------- analyze

AnalyzeSummary CmdAnalyze(const AnalyzeOptions& opts) {
  opts.noisy.Validate();
  const bool from_records = !opts.records_path.empty();
  if (from_records == !opts.scores_path.empty()) {
    ThrowValidation("analyze needs exactly one of a logit record file or a score file");
  }
  const CategorySet categories = io::ReadCategories(opts.categories_path);
  const Forest forest = LoadForest(opts.tree_paths, categories.size());

  std::vector<LogitSource> sources;
  std::vector<ScoreMode> modes = opts.modes;
  if (from_records) {
    sources.push_back(LogitSource::RawFine());
    for (const ClassificationTree& t : forest.trees()) {
      sources.push_back(LogitSource::Tree(t.tree_id));
    }
    if (forest.size() > 0) sources.push_back(LogitSource::ForestMean());
    if (modes.empty()) {
      modes.push_back(ScoreMode::kBaseline);
      if (forest.size() > 0) modes.push_back(ScoreMode::kForestScore);
    }
    for (ScoreMode m : modes) {
      if (NeedsTree(m) && forest.size() == 0) {
        ThrowValidation("histogram mode '", ScoreModeName(m), "' needs trees");
      }
    }
  }

  // Per source: total noisy count. Per mode: correct / incorrect histograms.
  std::vector<int64_t> noisy_totals(from_records ? sources.size() : 1, 0);
  std::vector<HistogramAccumulator> correct, incorrect;
  std::vector<std::string> mode_names;
  int64_t objects = 0;
  std::string score_mode_name;

  auto init_modes = [&](const std::vector<std::string>& names) {
    mode_names = names;
    correct.assign(names.size(), HistogramAccumulator(opts.histogram));
    incorrect.assign(names.size(), HistogramAccumulator(opts.histogram));
  };

  if (from_records) {
    std::vector<std::string> names;
    for (ScoreMode m : modes) names.emplace_back(ScoreModeName(m));
    init_modes(names);
    io::JsonLinesReader reader(opts.records_path);
    for (;;) {
      std::vector<LogitRecord> chunk = ReadRecordChunk(
          reader, std::max<size_t>(opts.chunk, 1), categories.size(), forest);
      if (chunk.empty()) break;
      for (const LogitRecord& rec : chunk) {
        if (!rec.gt_class) {
          ThrowValidation(opts.records_path, ": record '", rec.object_id,
                          "' has no gt_class");
        }
      }
      struct PerRecord {
        std::vector<int> noisy;
        std::vector<ScoreResult> results;
      };
      std::vector<PerRecord> per(chunk.size());
      ParallelFor(chunk.size(), opts.threads, [&](size_t i) {
        for (const LogitSource& s : sources) {
          per[i].noisy.push_back(CountNoisyForRecord(chunk[i], s, forest, opts.noisy).total());
        }
        for (ScoreMode m : modes) per[i].results.push_back(Score(chunk[i], m, forest));
      });
      for (size_t i = 0; i < chunk.size(); ++i) {
        for (size_t s = 0; s < sources.size(); ++s) noisy_totals[s] += per[i].noisy[s];
        for (size_t m = 0; m < modes.size(); ++m) {
          const ScoreResult& r = per[i].results[m];
          (r.label == *chunk[i].gt_class ? correct[m] : incorrect[m]).Add(r.max_score());
        }
      }
      objects += static_cast<int64_t>(chunk.size());
    }
  } else {
    io::JsonLinesReader reader(opts.scores_path);
    Json j;
    while (reader.Next(j)) {
      io::WithLineContext(reader, [&] {
        const io::ScoreLine line = io::ScoreLineFromJson(j);
        if (!line.gt_class) ThrowValidation("score line '", line.object_id, "' has no gt_class");
        if (static_cast<int>(line.result.scores.size()) != categories.size()) {
          ThrowValidation("score line has ", line.result.scores.size(),
                          " scores, expected N=", categories.size());
        }
        std::string name(ScoreModeName(line.result.mode));
        if (!line.result.tree_id.empty()) name += ":" + line.result.tree_id;
        if (mode_names.empty()) {
          init_modes({name});
          score_mode_name = name;
        } else if (name != score_mode_name) {
          ThrowValidation("score file mixes modes '", score_mode_name, "' and '", name, "'");
        }
        noisy_totals[0] +=
            CountNoisyLogits(line.result.scores, *line.gt_class, opts.noisy).total();
        (line.result.label == *line.gt_class ? correct[0] : incorrect[0])
            .Add(std::clamp(line.result.max_score(), 0.0, 1.0));
        ++objects;
      });
    }
  }

  AnalyzeSummary summary;
  for (size_t s = 0; s < noisy_totals.size(); ++s) {
    io::NoisyReport r;
    r.source = from_records ? sources[s].name() : "scores:" + score_mode_name;
    r.eps_gt = opts.noisy.eps_gt;
    r.eps_neg = opts.noisy.eps_neg;
    r.n_objects = objects;
    r.mean_noisy = objects ? static_cast<double>(noisy_totals[s]) / objects : 0.0;
    summary.reports.push_back(r);
  }
  for (size_t m = 0; m < mode_names.size(); ++m) {
    summary.densities.push_back({mode_names[m], correct[m].Finish(), incorrect[m].Finish()});
  }

  if (!opts.out_dir.empty()) {
    EnsureDir(opts.out_dir);
    io::JsonLinesWriter w(JoinPath(opts.out_dir, "noisy_report.jsonl"));
    for (const io::NoisyReport& r : summary.reports) w.Write(io::NoisyReportToJson(r));
    w.Close();
    for (const DensityPair& d : summary.densities) {
      std::string stem = "density_" + d.mode;
      std::replace(stem.begin(), stem.end(), ':', '_');
      io::WriteTextFile(JoinPath(opts.out_dir, stem + "_correct.csv"),
                        io::HistogramCsv(d.correct));
      io::WriteTextFile(JoinPath(opts.out_dir, stem + "_incorrect.csv"),
                        io::HistogramCsv(d.incorrect));
    }
  }
  return summary;
}

// ---------------------------------------------------------------------- eval

EvalSummary CmdEval(const EvalOptions& opts) {
  const CategorySet categories = io::ReadCategories(opts.categories_path);
  const std::vector<Detection> dets = io::ReadDetections(opts.detections_path);
  const std::vector<GroundTruth> gts = io::ReadGroundTruth(opts.gt_path);
  if (gts.empty()) ThrowValidation(opts.gt_path, ": no ground truth");

  EvalConfig cfg;
  cfg.max_dets = opts.max_dets;
  cfg.threads = opts.threads;

  EvalSummary summary;
  summary.no_detections = dets.empty();
  cfg.iou_type = IouType::kBox;
  summary.box = Evaluate(dets, gts, categories, cfg);
  const bool has_masks =
      std::any_of(gts.begin(), gts.end(), [](const GroundTruth& g) { return g.mask.has_value(); });
  if (has_masks) {
    cfg.iou_type = IouType::kMask;
    summary.mask = Evaluate(dets, gts, categories, cfg);
  }

  if (!opts.out_dir.empty()) {
    EnsureDir(opts.out_dir);
    auto write = [&](const EvalReport& r) {
      const std::string stem = "eval_" + std::string(IouTypeName(r.iou_type));
      io::WriteTextFile(JoinPath(opts.out_dir, stem + ".json"),
                        io::EvalReportToJson(r).dump(2) + "\n");
      io::WriteTextFile(JoinPath(opts.out_dir, stem + "_per_class.csv"),
                        io::PerClassCsv(r, categories));
    };
    write(summary.box);
    if (summary.mask) write(*summary.mask);
  }
  return summary;
}

// ------------------------------------------------------------------ pipeline

PipelineSummary CmdPipeline(const PipelineOptions& opts) {
  EnsureDir(opts.out_dir);
  PipelineSummary out;

  ScoreOptions so;
  so.categories_path = opts.categories_path;
  so.tree_paths = opts.tree_paths;
  so.records_path = opts.records_path;
  so.out_path = JoinPath(opts.out_dir, "scores.jsonl");
  so.mode = opts.mode;
  so.threads = opts.threads;
  out.score = CmdScore(so);

  AnalyzeOptions ao;
  ao.categories_path = opts.categories_path;
  ao.tree_paths = opts.tree_paths;
  ao.records_path = opts.records_path;
  ao.noisy = opts.noisy;
  ao.histogram = opts.histogram;
  ao.modes = {ScoreMode::kBaseline};
  if (opts.mode != ScoreMode::kBaseline) ao.modes.push_back(opts.mode);
  ao.out_dir = opts.out_dir;
  ao.threads = opts.threads;
  out.analyze = CmdAnalyze(ao);

  EvalOptions eo;
  eo.categories_path = opts.categories_path;
  eo.detections_path = opts.detections_path;
  eo.gt_path = opts.gt_path;
  eo.out_dir = opts.out_dir;
  eo.max_dets = opts.max_dets;
  eo.threads = opts.threads;
  out.eval = CmdEval(eo);
  return out;
}

// ------------------------------------------------------------------ make-demo

DemoPaths DemoLayout(const std::string& dir) {
  DemoPaths p;
  p.categories = JoinPath(dir, "categories.jsonl");
  p.hierarchy = JoinPath(dir, "hierarchy.json");
  p.features = JoinPath(dir, "features.txt");
  p.masks = JoinPath(dir, "masks.jsonl");
  p.lexical_tree = JoinPath(dir, "trees/lexical.json");
  p.visual_tree = JoinPath(dir, "trees/visual.json");
  p.geometric_tree = JoinPath(dir, "trees/geometric.json");
  p.records = JoinPath(dir, "records.jsonl");
  p.proposals = JoinPath(dir, "proposals.jsonl");
  p.raw_proposals = JoinPath(dir, "raw_proposals.jsonl");
  p.proposal_gt = JoinPath(dir, "proposal_gt.jsonl");
  p.detections = JoinPath(dir, "detections.jsonl");
  p.ground_truth = JoinPath(dir, "ground_truth.jsonl");
  return p;
}

DemoPaths MakeDemo(const std::string& dir, uint64_t seed) {
  using synthetic::Rng;
  EnsureDir(dir);
  EnsureDir(JoinPath(dir, "trees"));
  const DemoPaths paths = DemoLayout(dir);
  Rng rng(seed);

  const CategorySet categories = synthetic::MakeLongTailCategories(15, 25, 20, rng);
  const int n = categories.size();
  io::WriteCategories(paths.categories, categories);

  constexpr int kLexicalParents = 12;
  Hierarchy hierarchy;
  for (const Category& c : categories.categories()) {
    hierarchy.emplace_back(c.name, "lex_" + std::to_string(rng.UniformInt(kLexicalParents)));
  }
  // Every parent keeps at least one child.
  for (int p = 0; p < kLexicalParents && p < n; ++p) {
    hierarchy[p * (n / kLexicalParents)].second = "lex_" + std::to_string(p);
  }
  io::WriteHierarchy(paths.hierarchy, hierarchy);

  constexpr int kDim = 16;
  constexpr int kLatent = 8;
  std::vector<double> centers(kLatent * kDim);
  for (double& v : centers) v = rng.Uniform(-5.0, 5.0);
  std::vector<double> features;
  for (int c = 0; c < n; ++c) {
    const int k = rng.UniformInt(kLatent);
    for (int d = 0; d < kDim; ++d) features.push_back(centers[k * kDim + d] + rng.Normal());
  }
  io::WriteFeatureTable(paths.features, FeatureTable(n, kDim, std::move(features)));

  constexpr int kMaskSide = 32;
  std::vector<std::vector<RleMask>> masks(n);
  for (int c = 0; c < n; ++c) {
    const double cx = rng.Uniform(8.0, 24.0), cy = rng.Uniform(8.0, 24.0);
    const double rx = rng.Uniform(3.0, 14.0), ry = rng.Uniform(3.0, 14.0);
    const bool box_shape = rng.Uniform() < 0.5;
    for (int m = 0; m < 3; ++m) {
      const double jx = rng.Uniform(-1.5, 1.5), jy = rng.Uniform(-1.5, 1.5);
      std::vector<uint8_t> bits(kMaskSide * kMaskSide, 0);
      for (int r = 0; r < kMaskSide; ++r) {
        for (int col = 0; col < kMaskSide; ++col) {
          const double dx = (col + 0.5 - cx - jx) / rx, dy = (r + 0.5 - cy - jy) / ry;
          const bool inside = box_shape ? (std::abs(dx) <= 1.0 && std::abs(dy) <= 1.0)
                                        : (dx * dx + dy * dy <= 1.0);
          bits[r * kMaskSide + col] = inside ? 1 : 0;
        }
      }
      masks[c].push_back(RleMask::FromDense(kMaskSide, kMaskSide, bits));
    }
  }
  io::WriteMaskFixture(paths.masks, masks);

  BuildTreeOptions bt;
  bt.categories_path = paths.categories;
  bt.kmeans.seed = seed;
  bt.kind = TreeKind::kLexical;
  bt.input_path = paths.hierarchy;
  bt.out_path = paths.lexical_tree;
  CmdBuildTree(bt);
  bt.kind = TreeKind::kVisual;
  bt.input_path = paths.features;
  bt.out_path = paths.visual_tree;
  CmdBuildTree(bt);
  bt.kind = TreeKind::kGeometric;
  bt.input_path = paths.masks;
  bt.out_path = paths.geometric_tree;
  CmdBuildTree(bt);

  const Forest forest = LoadForest(paths.trees(), n);
  synthetic::LogitSuiteConfig lc;
  lc.num_objects = 400;
  {
    io::JsonLinesWriter w(paths.records);
    for (const LogitRecord& rec : synthetic::MakeLogitRecords(forest, lc, rng)) {
      w.Write(io::RecordToJson(rec));
    }
    w.Close();
  }

  const auto images = synthetic::MakeLongTailProposals(
      categories, {0.95, 0.85, 0.75, 0.6, 0.3}, 20, rng);
  {
    io::JsonLinesWriter raw(paths.raw_proposals);
    io::JsonLinesWriter labeled(paths.proposals);
    io::JsonLinesWriter gt(paths.proposal_gt);
    for (const auto& img : images) {
      for (const ScoredBox& b : img.raw) {
        raw.Write(io::ProposalToJson({img.image_id, {b.box, b.score, kBackground}, {}}));
      }
      for (const Proposal& p : MatchProposalsToGt(img.raw, img.gts)) {
        labeled.Write(io::ProposalToJson({img.image_id, p, {}}));
      }
      for (const GroundTruthBox& g : img.gts) {
        gt.Write(io::GroundTruthToJson({img.image_id, g.box, g.class_id, std::nullopt}));
      }
    }
    raw.Close();
    labeled.Close();
    gt.Close();
  }

  const synthetic::DetectionFixture fx =
      synthetic::MakeDetectionFixture(categories, 40, /*with_masks=*/true, rng);
  {
    io::JsonLinesWriter w(paths.detections);
    for (const Detection& d : fx.dets) w.Write(io::DetectionToJson(d));
    w.Close();
    io::JsonLinesWriter g(paths.ground_truth);
    for (const GroundTruth& gt : fx.gts) g.Write(io::GroundTruthToJson(gt));
    g.Close();
  }
  return paths;
}

}  // namespace forest
