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
#include "forest/scoring.h"

#include <algorithm>
#include <limits>

#include "forest/status.h"

namespace forest {
namespace {

constexpr double kProbSumTolerance = 1e-6;

const std::vector<double>* FindBranch(
    const std::map<std::string, std::vector<double>>& m, const std::string& key) {
  auto it = m.find(key);
  return it == m.end() ? nullptr : &it->second;
}

// Parent logits for path scores: raw logits when present, else log p(u).
std::vector<double> ParentPathLogits(const LogitRecord& rec,
                                     const ClassificationTree& tree) {
  if (const auto* z = FindBranch(rec.parent_logits, tree.tree_id)) return *z;
  return ParentLogProbs(rec, tree);
}

// p(u) from parent logits, or verbatim supplied probabilities.
std::vector<double> ParentProbs(const LogitRecord& rec,
                                const ClassificationTree& tree) {
  if (const auto* z = FindBranch(rec.parent_logits, tree.tree_id)) return Softmax(*z);
  if (const auto* p = FindBranch(rec.parent_probs, tree.tree_id)) return *p;
  ThrowValidation("record '", rec.object_id, "' has no parent outputs for tree '",
                  tree.tree_id, "'");
}

void RequireLeafCount(const LogitRecord& rec, const ClassificationTree& tree) {
  if (static_cast<int>(rec.fine_logits.size()) != tree.num_leaves()) {
    ThrowValidation("record '", rec.object_id, "' has ", rec.fine_logits.size(),
                    " fine logits but tree '", tree.tree_id, "' has ",
                    tree.num_leaves(), " leaves");
  }
}

// `log_values` orders the classes; softmax can round distinct values to a tie.
ScoreResult MakeResult(std::vector<double> scores, ScoreMode mode,
                       std::span<const double> log_values, std::string tree_id = {}) {
  ScoreResult r;
  r.label = ArgMax(log_values);
  r.scores = std::move(scores);
  r.mode = mode;
  r.tree_id = std::move(tree_id);
  return r;
}

}  // namespace

void ValidateRecord(const LogitRecord& rec, int num_classes, const Forest* forest) {
  if (static_cast<int>(rec.fine_logits.size()) != num_classes) {
    ThrowValidation("record '", rec.object_id, "' has ", rec.fine_logits.size(),
                    " fine logits, expected N=", num_classes);
  }
  for (double z : rec.fine_logits) {
    if (!std::isfinite(z)) {
      ThrowValidation("record '", rec.object_id, "' has a non-finite fine logit");
    }
  }
  if (rec.gt_class && (*rec.gt_class < 0 || *rec.gt_class >= num_classes)) {
    ThrowValidation("record '", rec.object_id, "' gt_class ", *rec.gt_class,
                    " out of range");
  }
  for (const auto& [tree_id, z] : rec.parent_logits) {
    for (double v : z) {
      if (!std::isfinite(v)) {
        ThrowValidation("record '", rec.object_id,
                        "' has a non-finite parent logit for tree '", tree_id, "'");
      }
    }
  }
  for (const auto& [tree_id, p] : rec.parent_probs) {
    double sum = 0.0;
    for (double v : p) {
      if (!(v >= 0.0 && v <= 1.0)) {
        ThrowValidation("record '", rec.object_id,
                        "' has a parent probability outside [0,1] for tree '",
                        tree_id, "'");
      }
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbSumTolerance) {
      ThrowValidation("record '", rec.object_id, "' parent probabilities for tree '",
                      tree_id, "' sum to ", sum, ", not 1");
    }
  }
  if (forest == nullptr) return;
  for (const ClassificationTree& tree : forest->trees()) {
    const auto* z = FindBranch(rec.parent_logits, tree.tree_id);
    const auto* p = FindBranch(rec.parent_probs, tree.tree_id);
    if (z == nullptr && p == nullptr) {
      ThrowValidation("record '", rec.object_id,
                      "' is missing parent logits for tree '", tree.tree_id, "'");
    }
    for (const auto* v : {z, p}) {
      if (v != nullptr && static_cast<int>(v->size()) != tree.num_parents) {
        ThrowValidation("record '", rec.object_id, "' has ", v->size(),
                        " parent values for tree '", tree.tree_id, "', expected M=",
                        tree.num_parents);
      }
    }
  }
}

std::string_view ScoreModeName(ScoreMode mode) {
  switch (mode) {
    case ScoreMode::kBaseline:
      return "baseline";
    case ScoreMode::kPreliminary:
      return "preliminary";
    case ScoreMode::kTree:
      return "tree";
    case ScoreMode::kForestScore:
      return "forest_score";
    case ScoreMode::kForestVote:
      return "forest_vote";
  }
  return "unknown";
}

ScoreMode ParseScoreMode(std::string_view name) {
  for (ScoreMode m : {ScoreMode::kBaseline, ScoreMode::kPreliminary, ScoreMode::kTree,
                      ScoreMode::kForestScore, ScoreMode::kForestVote}) {
    if (ScoreModeName(m) == name) return m;
  }
  if (name == "forest") return ScoreMode::kForestScore;
  ThrowValidation("unknown score mode '", name, "'");
}

double LogSumExp(std::span<const double> values) {
  if (values.empty()) ThrowValidation("log-sum-exp of an empty vector");
  const double m = *std::max_element(values.begin(), values.end());
  if (m == -std::numeric_limits<double>::infinity()) return m;
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

std::vector<double> LogSoftmax(std::span<const double> logits) {
  const double lse = LogSumExp(logits);
  std::vector<double> out(logits.begin(), logits.end());
  for (double& v : out) v -= lse;
  return out;
}

std::vector<double> Softmax(std::span<const double> logits) {
  if (logits.empty()) ThrowValidation("softmax of an empty vector");
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

int ArgMax(std::span<const double> values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

std::vector<double> ParentLogProbs(const LogitRecord& rec,
                                   const ClassificationTree& tree) {
  std::vector<double> logp;
  if (const auto* z = FindBranch(rec.parent_logits, tree.tree_id)) {
    logp = LogSoftmax(*z);
  } else if (const auto* p = FindBranch(rec.parent_probs, tree.tree_id)) {
    logp.reserve(p->size());
    for (double v : *p) logp.push_back(v > 0.0 ? std::log(v) : kLogProbFloor);
  } else {
    ThrowValidation("record '", rec.object_id, "' has no parent outputs for tree '",
                    tree.tree_id, "'");
  }
  if (static_cast<int>(logp.size()) != tree.num_parents) {
    ThrowValidation("record '", rec.object_id, "' has ", logp.size(),
                    " parent values for tree '", tree.tree_id, "', expected M=",
                    tree.num_parents);
  }
  for (double& v : logp) v = std::max(v, kLogProbFloor);
  return logp;
}

ScoreResult ScoreBaseline(const LogitRecord& rec) {
  return MakeResult(Softmax(rec.fine_logits), ScoreMode::kBaseline, rec.fine_logits);
}

ScoreResult ScorePreliminary(const LogitRecord& rec, const ClassificationTree& tree) {
  RequireLeafCount(rec, tree);
  std::vector<double> scores = Softmax(rec.fine_logits);
  const std::vector<double> parent = ParentProbs(rec, tree);
  if (static_cast<int>(parent.size()) != tree.num_parents) {
    ThrowValidation("record '", rec.object_id, "' has ", parent.size(),
                    " parent values for tree '", tree.tree_id, "', expected M=",
                    tree.num_parents);
  }
  for (size_t i = 0; i < scores.size(); ++i) scores[i] *= parent[tree.leaf_parent[i]];
  const std::vector<double> order = scores;
  return MakeResult(std::move(scores), ScoreMode::kPreliminary, order, tree.tree_id);
}

std::vector<double> CalibrateTree(const LogitRecord& rec,
                                  const ClassificationTree& tree) {
  RequireLeafCount(rec, tree);
  const std::vector<double> logp = ParentLogProbs(rec, tree);
  std::vector<double> out(rec.fine_logits);
  for (size_t i = 0; i < out.size(); ++i) out[i] += logp[tree.leaf_parent[i]];
  return out;
}

ScoreResult ScoreTree(const LogitRecord& rec, const ClassificationTree& tree) {
  const std::vector<double> calibrated = CalibrateTree(rec, tree);
  return MakeResult(Softmax(calibrated), ScoreMode::kTree, calibrated, tree.tree_id);
}

LogValue PathScore(const LogitRecord& rec, const ClassificationTree& tree, int leaf) {
  RequireLeafCount(rec, tree);
  if (leaf < 0 || leaf >= tree.num_leaves()) {
    ThrowValidation("leaf ", leaf, " out of range [0, ", tree.num_leaves(), ")");
  }
  const std::vector<double> zu = ParentPathLogits(rec, tree);
  return {rec.fine_logits[leaf] + zu[tree.leaf_parent[leaf]]};
}

int InferLabelTree(const LogitRecord& rec, const ClassificationTree& tree) {
  RequireLeafCount(rec, tree);
  const std::vector<double> zu = ParentPathLogits(rec, tree);
  std::vector<double> path(rec.fine_logits);
  for (size_t i = 0; i < path.size(); ++i) path[i] += zu[tree.leaf_parent[i]];
  return ArgMax(path);
}

std::vector<double> ForestLogValues(const LogitRecord& rec, const Forest& forest) {
  const int t_count = forest.size();
  if (t_count == 0) ThrowValidation("empty forest");
  std::vector<std::vector<double>> calibrated;
  calibrated.reserve(t_count);
  for (const ClassificationTree& tree : forest.trees()) {
    calibrated.push_back(CalibrateTree(rec, tree));
  }
  const double log_t = std::log(static_cast<double>(t_count));
  std::vector<double> out(rec.fine_logits.size());
  std::vector<double> column(t_count);
  for (size_t i = 0; i < out.size(); ++i) {
    for (int t = 0; t < t_count; ++t) column[t] = calibrated[t][i];
    out[i] = LogSumExp(column) - log_t;
  }
  return out;
}

ScoreResult ScoreForest(const LogitRecord& rec, const Forest& forest) {
  const std::vector<double> values = ForestLogValues(rec, forest);
  return MakeResult(Softmax(values), ScoreMode::kForestScore, values);
}

int InferLabelForestVote(const LogitRecord& rec, const Forest& forest) {
  const int t_count = forest.size();
  if (t_count == 0) ThrowValidation("empty forest");
  std::vector<std::vector<double>> parent_z;
  for (const ClassificationTree& tree : forest.trees()) {
    RequireLeafCount(rec, tree);
    parent_z.push_back(ParentPathLogits(rec, tree));
  }
  std::vector<double> votes(rec.fine_logits.size());
  std::vector<double> column(t_count);
  for (size_t i = 0; i < votes.size(); ++i) {
    for (int t = 0; t < t_count; ++t) {
      column[t] = rec.fine_logits[i] + parent_z[t][forest[t].leaf_parent[i]];
    }
    votes[i] = LogSumExp(column);
  }
  return ArgMax(votes);
}

ScoreResult ScoreForestVote(const LogitRecord& rec, const Forest& forest) {
  ScoreResult r = ScoreForest(rec, forest);
  r.label = InferLabelForestVote(rec, forest);
  r.mode = ScoreMode::kForestVote;
  return r;
}

ScoreResult Score(const LogitRecord& rec, ScoreMode mode, const Forest& forest,
                  std::string_view tree_id) {
  auto pick_tree = [&]() -> const ClassificationTree& {
    if (forest.size() == 0) ThrowValidation("mode needs a tree but none loaded");
    if (tree_id.empty()) return forest[0];
    const ClassificationTree* t = forest.Find(tree_id);
    if (t == nullptr) ThrowValidation("no tree named '", tree_id, "'");
    return *t;
  };
  switch (mode) {
    case ScoreMode::kBaseline:
      return ScoreBaseline(rec);
    case ScoreMode::kPreliminary:
      return ScorePreliminary(rec, pick_tree());
    case ScoreMode::kTree:
      return ScoreTree(rec, pick_tree());
    case ScoreMode::kForestScore:
      return ScoreForest(rec, forest);
    case ScoreMode::kForestVote:
      return ScoreForestVote(rec, forest);
  }
  ThrowValidation("unhandled score mode");
}

}  // namespace forest
