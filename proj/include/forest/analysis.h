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
#ifndef FOREST_ANALYSIS_H_
#define FOREST_ANALYSIS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "forest/scoring.h"
#include "forest/taxonomy.h"

namespace forest {

struct NoisyLogitConfig {
  double eps_gt = 0.1;
  double eps_neg = 0.1;

  void Validate() const;
};

struct NoisyCount {
  int gt_noisy = 0;   // 0 or 1
  int neg_noisy = 0;  // in [0, N-1]

  int total() const { return gt_noisy + neg_noisy; }
  bool operator==(const NoisyCount&) const = default;
};

// Counts noisy logits among non-negative node values (f, f' or f^). A value
// is noisy when its share of the total falls below 1 - eps_gt for the
// ground truth, or rises above eps_neg for a negative class.
NoisyCount CountNoisyLogits(std::span<const double> values, int gt_class,
                            const NoisyLogitConfig& cfg);

// Same count from log node values, which avoids overflowing exp().
NoisyCount CountNoisyLogitsLog(std::span<const double> log_values, int gt_class,
                               const NoisyLogitConfig& cfg);

// Which node values a noisy-logit statistic is measured on.
struct LogitSource {
  enum class Kind { kRawFine, kTree, kForest };
  Kind kind = Kind::kRawFine;
  std::string tree_id;  // kTree only

  static LogitSource RawFine() { return {Kind::kRawFine, {}}; }
  static LogitSource Tree(std::string id) { return {Kind::kTree, std::move(id)}; }
  static LogitSource ForestMean() { return {Kind::kForest, {}}; }

  // "raw_fine", "tree:<id>", "forest".
  std::string name() const;
  static LogitSource Parse(const std::string& name);
};

// log f, log f'^t, or log f^ for `rec`.
std::vector<double> SourceLogValues(const LogitRecord& rec, const LogitSource& source,
                                    const Forest& forest);

NoisyCount CountNoisyForRecord(const LogitRecord& rec, const LogitSource& source,
                               const Forest& forest, const NoisyLogitConfig& cfg);

// Mean of gt_noisy + neg_noisy over records; every record needs gt_class.
double MeanNoisyPerObject(std::span<const LogitRecord> records,
                          const LogitSource& source, const Forest& forest,
                          const NoisyLogitConfig& cfg);

inline constexpr int kDefaultHistogramBins = 50;

struct HistogramSpec {
  int bin_count = kDefaultHistogramBins;
};

// Equal-width bins over [0, 1]; 1.0 falls in the last bin.
struct Histogram {
  std::vector<double> mass;  // sums to 1 unless empty
  int64_t count = 0;
  bool empty = true;

  int bins() const { return static_cast<int>(mass.size()); }
  double bin_lo(int b) const { return static_cast<double>(b) / bins(); }
  double bin_hi(int b) const { return static_cast<double>(b + 1) / bins(); }
};

int HistogramBin(double value, int bin_count);

// Streaming counterpart of ScoreDensity.
class HistogramAccumulator {
 public:
  explicit HistogramAccumulator(HistogramSpec spec);
  void Add(double value);
  void Merge(const HistogramAccumulator& other);
  Histogram Finish() const;

 private:
  std::vector<int64_t> counts_;
  int64_t total_ = 0;
};

enum class Correctness { kCorrect, kIncorrect };

struct ScoredObject {
  ScoreResult result;
  int gt_class = 0;
};

// Histogram of max scores over objects whose label equals (kCorrect) or
// differs from (kIncorrect) the ground truth.
Histogram ScoreDensity(std::span<const ScoredObject> objects, Correctness split,
                       const HistogramSpec& spec);

}  // namespace forest

#endif  // FOREST_ANALYSIS_H_
