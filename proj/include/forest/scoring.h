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
#ifndef FOREST_SCORING_H_
#define FOREST_SCORING_H_

#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "forest/taxonomy.h"

namespace forest {

// Floor applied to log-probabilities read from files; exp(-745) is the
// smallest positive double.
inline constexpr double kLogProbFloor = -745.0;

// One object's classifier outputs. Logits are pre-exponential: the node
// value of class i is exp(fine_logits[i]).
struct LogitRecord {
  std::string object_id;
  std::optional<int> gt_class;
  std::vector<double> fine_logits;
  // tree_id -> M_t parent logits.
  std::map<std::string, std::vector<double>> parent_logits;
  // tree_id -> M_t pre-normalized parent probabilities, consulted only for
  // trees without parent logits. Must sum to 1 within 1e-6.
  std::map<std::string, std::vector<double>> parent_probs;

  bool operator==(const LogitRecord&) const = default;
};

// Throws ValidationError when logits are non-finite, N mismatches, or the
// record lacks parent outputs of the right length for any tree in `forest`.
void ValidateRecord(const LogitRecord& rec, int num_classes, const Forest* forest);

enum class ScoreMode { kBaseline, kPreliminary, kTree, kForestScore, kForestVote };

std::string_view ScoreModeName(ScoreMode mode);
ScoreMode ParseScoreMode(std::string_view name);

struct ScoreResult {
  std::vector<double> scores;
  int label = 0;
  ScoreMode mode = ScoreMode::kBaseline;
  std::string tree_id;  // set for kPreliminary and kTree

  double max_score() const { return scores.empty() ? 0.0 : scores[label]; }
  bool operator==(const ScoreResult&) const = default;
};

// A positive quantity carried as its logarithm.
struct LogValue {
  double log = 0.0;
  double value() const { return std::exp(log); }
};

double LogSumExp(std::span<const double> values);
std::vector<double> LogSoftmax(std::span<const double> logits);
// p_i = exp(z_i - max z) / sum_a exp(z_a - max z). Throws on empty input.
std::vector<double> Softmax(std::span<const double> logits);
// First index of the maximum.
int ArgMax(std::span<const double> values);

// log p(u) for every parent of `tree`.
std::vector<double> ParentLogProbs(const LogitRecord& rec,
                                   const ClassificationTree& tree);

ScoreResult ScoreBaseline(const LogitRecord& rec);

// s_i = p(x_i) * p(u_parent(i)); not normalized.
ScoreResult ScorePreliminary(const LogitRecord& rec, const ClassificationTree& tree);

// log f'_i = z_i + log p(u_parent(i)).
std::vector<double> CalibrateTree(const LogitRecord& rec,
                                  const ClassificationTree& tree);

ScoreResult ScoreTree(const LogitRecord& rec, const ClassificationTree& tree);

// exp(z_leaf + z_parent(leaf)), the product of node values on the path.
// Records carrying only parent probabilities use log p(u) as the parent
// logit, which shifts every path by the same constant.
LogValue PathScore(const LogitRecord& rec, const ClassificationTree& tree, int leaf);

// argmax_i of the path score. Always equals ScoreTree(rec, tree).label.
int InferLabelTree(const LogitRecord& rec, const ClassificationTree& tree);

// log f^_i = log((1/T) sum_t f'^t_i).
std::vector<double> ForestLogValues(const LogitRecord& rec, const Forest& forest);

// Scores normalized from the mean calibrated value; label is their argmax.
ScoreResult ScoreForest(const LogitRecord& rec, const Forest& forest);

// argmax_i sum_t exp(z_i + z^t_parent_t(i)). Not equivalent to the
// ScoreForest label in general: each tree's parent softmax has its own
// denominator.
int InferLabelForestVote(const LogitRecord& rec, const Forest& forest);

// Forest-vote result: the vote label with ScoreForest's scores attached.
ScoreResult ScoreForestVote(const LogitRecord& rec, const Forest& forest);

// Dispatches on `mode`; `tree` selects the tree for kPreliminary / kTree.
ScoreResult Score(const LogitRecord& rec, ScoreMode mode, const Forest& forest,
                  std::string_view tree_id = {});

}  // namespace forest

#endif  // FOREST_SCORING_H_
