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
#include "forest/analysis.h"

#include <cmath>

#include "forest/status.h"

namespace forest {
namespace {

NoisyCount CountShares(std::span<const double> shares, int gt_class,
                       const NoisyLogitConfig& cfg) {
  NoisyCount n;
  for (int i = 0; i < static_cast<int>(shares.size()); ++i) {
    if (i == gt_class) {
      n.gt_noisy = shares[i] < 1.0 - cfg.eps_gt ? 1 : 0;
    } else if (shares[i] > cfg.eps_neg) {
      ++n.neg_noisy;
    }
  }
  return n;
}

void RequireGt(int gt_class, size_t n) {
  if (gt_class < 0 || static_cast<size_t>(gt_class) >= n) {
    ThrowValidation("gt_class ", gt_class, " out of range [0, ", n, ")");
  }
}

}  // namespace

void NoisyLogitConfig::Validate() const {
  if (!(eps_gt > 0.0 && eps_gt < 1.0) || !(eps_neg > 0.0 && eps_neg < 1.0)) {
    ThrowValidation("eps_gt and eps_neg must lie in (0, 1), got ", eps_gt, ", ",
                    eps_neg);
  }
}

NoisyCount CountNoisyLogits(std::span<const double> values, int gt_class,
                            const NoisyLogitConfig& cfg) {
  RequireGt(gt_class, values.size());
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      ThrowValidation("node values must be finite and non-negative");
    }
    sum += v;
  }
  if (sum <= 0.0) ThrowValidation("node values are all zero");
  std::vector<double> shares(values.begin(), values.end());
  for (double& s : shares) s /= sum;
  return CountShares(shares, gt_class, cfg);
}

NoisyCount CountNoisyLogitsLog(std::span<const double> log_values, int gt_class,
                               const NoisyLogitConfig& cfg) {
  RequireGt(gt_class, log_values.size());
  return CountShares(Softmax(log_values), gt_class, cfg);
}

std::string LogitSource::name() const {
  switch (kind) {
    case Kind::kRawFine:
      return "raw_fine";
    case Kind::kTree:
      return "tree:" + tree_id;
    case Kind::kForest:
      return "forest";
  }
  return "unknown";
}

LogitSource LogitSource::Parse(const std::string& name) {
  if (name == "raw_fine" || name == "raw") return RawFine();
  if (name == "forest") return ForestMean();
  if (name.rfind("tree:", 0) == 0 && name.size() > 5) return Tree(name.substr(5));
  ThrowValidation("unknown logit source '", name, "'");
}

std::vector<double> SourceLogValues(const LogitRecord& rec, const LogitSource& source,
                                    const Forest& forest) {
  switch (source.kind) {
    case LogitSource::Kind::kRawFine:
      return rec.fine_logits;
    case LogitSource::Kind::kTree: {
      const ClassificationTree* tree = forest.Find(source.tree_id);
      if (tree == nullptr) ThrowValidation("no tree named '", source.tree_id, "'");
      return CalibrateTree(rec, *tree);
    }
    case LogitSource::Kind::kForest:
      return ForestLogValues(rec, forest);
  }
  ThrowValidation("unhandled logit source");
}

NoisyCount CountNoisyForRecord(const LogitRecord& rec, const LogitSource& source,
                               const Forest& forest, const NoisyLogitConfig& cfg) {
  if (!rec.gt_class) {
    ThrowValidation("record '", rec.object_id, "' has no gt_class");
  }
  return CountNoisyLogitsLog(SourceLogValues(rec, source, forest), *rec.gt_class, cfg);
}

double MeanNoisyPerObject(std::span<const LogitRecord> records,
                          const LogitSource& source, const Forest& forest,
                          const NoisyLogitConfig& cfg) {
  cfg.Validate();
  if (records.empty()) return 0.0;
  int64_t total = 0;
  for (const LogitRecord& rec : records) {
    total += CountNoisyForRecord(rec, source, forest, cfg).total();
  }
  return static_cast<double>(total) / static_cast<double>(records.size());
}

int HistogramBin(double value, int bin_count) {
  if (!(value >= 0.0 && value <= 1.0)) {
    ThrowValidation("histogram value ", value, " outside [0, 1]");
  }
  const int b = static_cast<int>(value * bin_count);
  return b >= bin_count ? bin_count - 1 : b;
}

HistogramAccumulator::HistogramAccumulator(HistogramSpec spec) {
  if (spec.bin_count < 1) ThrowValidation("bin_count must be positive");
  counts_.assign(spec.bin_count, 0);
}

void HistogramAccumulator::Add(double value) {
  ++counts_[HistogramBin(value, static_cast<int>(counts_.size()))];
  ++total_;
}

void HistogramAccumulator::Merge(const HistogramAccumulator& other) {
  if (other.counts_.size() != counts_.size()) {
    ThrowValidation("merging histograms with different bin counts");
  }
  for (size_t b = 0; b < counts_.size(); ++b) counts_[b] += other.counts_[b];
  total_ += other.total_;
}

Histogram HistogramAccumulator::Finish() const {
  Histogram h;
  h.mass.assign(counts_.size(), 0.0);
  h.count = total_;
  h.empty = total_ == 0;
  if (h.empty) return h;
  for (size_t b = 0; b < counts_.size(); ++b) {
    h.mass[b] = static_cast<double>(counts_[b]) / static_cast<double>(total_);
  }
  return h;
}

Histogram ScoreDensity(std::span<const ScoredObject> objects, Correctness split,
                       const HistogramSpec& spec) {
  HistogramAccumulator acc(spec);
  for (const ScoredObject& o : objects) {
    const bool correct = o.result.label == o.gt_class;
    if (correct == (split == Correctness::kCorrect)) acc.Add(o.result.max_score());
  }
  return acc.Finish();
}

}  // namespace forest
