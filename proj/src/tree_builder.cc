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
#include "forest/tree_builder.h"

#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "forest/status.h"

namespace forest {
namespace {

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double d = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff;
  }
  return d;
}

// Uniform in [0, 1) from the top 53 bits; std::uniform_real_distribution is
// not reproducible across standard libraries.
double Uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class Lloyd {
 public:
  Lloyd(const FeatureTable& table, int k)
      : table_(table),
        k_(k),
        dim_(table.dim()),
        centroids_(static_cast<size_t>(k) * table.dim(), 0.0),
        assignments_(table.rows(), -1) {}

  std::span<const double> centroid(int c) const {
    return {centroids_.data() + static_cast<size_t>(c) * dim_,
            static_cast<size_t>(dim_)};
  }

  void SetCentroid(int c, std::span<const double> point) {
    std::copy(point.begin(), point.end(),
              centroids_.begin() + static_cast<ptrdiff_t>(c) * dim_);
  }

  void SeedPlusPlus(uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int n = table_.rows();
    std::vector<char> chosen(n, 0);
    int first = static_cast<int>(Uniform01(rng) * n);
    first = std::min(first, n - 1);
    SetCentroid(0, table_.row(first));
    chosen[first] = 1;
    std::vector<double> d2(n);
    for (int i = 0; i < n; ++i) d2[i] = SquaredDistance(table_.row(i), centroid(0));
    for (int c = 1; c < k_; ++c) {
      double total = 0.0;
      for (double v : d2) total += v;
      int pick = -1;
      if (total > 0.0) {
        const double target = Uniform01(rng) * total;
        double cum = 0.0;
        for (int i = 0; i < n; ++i) {
          cum += d2[i];
          if (d2[i] > 0.0 && cum > target) {
            pick = i;
            break;
          }
        }
        if (pick < 0) {
          for (int i = n - 1; i >= 0; --i) {
            if (d2[i] > 0.0) {
              pick = i;
              break;
            }
          }
        }
      } else {
        // Fewer distinct points than clusters.
        for (int i = 0; i < n && pick < 0; ++i) {
          if (!chosen[i]) pick = i;
        }
      }
      chosen[pick] = 1;
      SetCentroid(c, table_.row(pick));
      for (int i = 0; i < n; ++i) {
        d2[i] = std::min(d2[i], SquaredDistance(table_.row(i), centroid(c)));
      }
    }
  }

  // Nearest centroid per row; ties keep the current cluster, else lowest id.
  bool Assign() {
    bool changed = false;
    for (int i = 0; i < table_.rows(); ++i) {
      const int current = assignments_[i];
      int best = current;
      double best_d = current >= 0 ? SquaredDistance(table_.row(i), centroid(current))
                                   : std::numeric_limits<double>::infinity();
      for (int c = 0; c < k_; ++c) {
        const double d = SquaredDistance(table_.row(i), centroid(c));
        if (d < best_d || (d == best_d && best != current && c < best)) {
          best_d = d;
          best = c;
        }
      }
      if (best != current) {
        assignments_[i] = best;
        changed = true;
      }
    }
    return changed;
  }

  // Moves the point farthest from its centroid (taken from a cluster with
  // more than one member) into each empty cluster.
  bool RepairEmpty() {
    bool repaired = false;
    for (int c = 0; c < k_; ++c) {
      std::vector<int> sizes = Sizes();
      if (sizes[c] > 0) continue;
      int far = -1;
      double far_d = -1.0;
      for (int i = 0; i < table_.rows(); ++i) {
        const int a = assignments_[i];
        if (sizes[a] < 2) continue;
        const double d = SquaredDistance(table_.row(i), centroid(a));
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      const int donor = assignments_[far];
      assignments_[far] = c;
      SetCentroid(c, table_.row(far));
      UpdateCentroid(donor);
      repaired = true;
    }
    return repaired;
  }

  void UpdateCentroids() {
    for (int c = 0; c < k_; ++c) UpdateCentroid(c);
  }

  double Objective() const {
    double j = 0.0;
    for (int i = 0; i < table_.rows(); ++i) {
      j += SquaredDistance(table_.row(i), centroid(assignments_[i]));
    }
    return j;
  }

  std::vector<int> Sizes() const {
    std::vector<int> sizes(k_, 0);
    for (int a : assignments_) ++sizes[a];
    return sizes;
  }

  std::vector<int>& assignments() { return assignments_; }
  std::vector<double>& centroids() { return centroids_; }

 private:
  void UpdateCentroid(int c) {
    std::vector<double> sum(dim_, 0.0);
    int count = 0;
    for (int i = 0; i < table_.rows(); ++i) {
      if (assignments_[i] != c) continue;
      const auto r = table_.row(i);
      for (int d = 0; d < dim_; ++d) sum[d] += r[d];
      ++count;
    }
    if (count == 0) return;
    for (double& v : sum) v /= count;
    SetCentroid(c, sum);
  }

  const FeatureTable& table_;
  const int k_;
  const int dim_;
  std::vector<double> centroids_;
  std::vector<int> assignments_;
};

ClassificationTree TreeFromClusters(std::string tree_id, int k,
                                    std::vector<int> assignments) {
  ClassificationTree tree;
  tree.tree_id = std::move(tree_id);
  tree.num_parents = k;
  for (int c = 0; c < k; ++c) {
    tree.parent_names.push_back("cluster_" + std::to_string(c));
  }
  tree.leaf_parent = std::move(assignments);
  ValidateTree(tree, tree.num_leaves());
  return tree;
}

}  // namespace

FeatureTable::FeatureTable(int rows, int dim, std::vector<double> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
  if (rows_ < 1 || dim_ < 1) {
    ThrowValidation("feature table must be at least 1x1, got ", rows_, "x", dim_);
  }
  if (values_.size() != static_cast<size_t>(rows_) * dim_) {
    ThrowValidation("feature table has ", values_.size(), " values, expected ",
                    rows_, "x", dim_);
  }
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      ThrowValidation("non-finite feature at row ", i / dim_, ", column ",
                      i % dim_);
    }
  }
}

KMeansResult KMeans(const FeatureTable& table, const KMeansConfig& cfg) {
  const int n = table.rows();
  if (n < 1) ThrowValidation("k-means on an empty table");
  if (cfg.k < 1 || cfg.k > n) {
    ThrowValidation("k-means needs 1 <= K <= N, got K=", cfg.k, ", N=", n);
  }
  if (cfg.max_iter < 1) ThrowValidation("max_iter must be positive");
  if (!(cfg.tol >= 0.0)) ThrowValidation("tol must be non-negative");
  for (double v : table.values()) {
    if (!std::isfinite(v)) ThrowValidation("non-finite feature value");
  }

  Lloyd lloyd(table, cfg.k);
  lloyd.SeedPlusPlus(cfg.seed);
  lloyd.Assign();
  lloyd.RepairEmpty();
  lloyd.UpdateCentroids();

  KMeansResult result;
  result.objective_history.push_back(lloyd.Objective());
  result.iterations = 1;
  while (result.iterations < cfg.max_iter) {
    bool changed = lloyd.Assign();
    changed = lloyd.RepairEmpty() || changed;
    if (!changed) break;
    lloyd.UpdateCentroids();
    const double prev = result.objective_history.back();
    const double j = lloyd.Objective();
    result.objective_history.push_back(j);
    ++result.iterations;
    if (prev - j <= cfg.tol) break;
  }
  result.objective = result.objective_history.back();
  result.assignments = std::move(lloyd.assignments());
  result.centroids = std::move(lloyd.centroids());
  return result;
}

ClassificationTree BuildVisualTree(const FeatureTable& table,
                                   const KMeansConfig& cfg) {
  KMeansResult km = KMeans(table, cfg);
  return TreeFromClusters("visual", cfg.k, std::move(km.assignments));
}

std::vector<double> ShapeVector(std::span<const RleMask> masks, int grid_h,
                                int grid_w) {
  if (masks.empty()) ThrowValidation("no masks to build a shape vector from");
  if (grid_h < 1 || grid_w < 1) {
    ThrowValidation("mask grid must be positive, got ", grid_h, "x", grid_w);
  }
  std::vector<double> shape(static_cast<size_t>(grid_h) * grid_w, 0.0);
  for (const RleMask& m : masks) {
    if (m.height() < 1 || m.width() < 1) ThrowValidation("empty mask grid");
    const std::vector<uint8_t> bits = m.ToDense();
    for (int r = 0; r < grid_h; ++r) {
      const int sr = std::min(m.height() - 1,
                              static_cast<int>((r + 0.5) * m.height() / grid_h));
      for (int c = 0; c < grid_w; ++c) {
        const int sc = std::min(m.width() - 1,
                                static_cast<int>((c + 0.5) * m.width() / grid_w));
        shape[static_cast<size_t>(r) * grid_w + c] +=
            bits[static_cast<size_t>(sr) * m.width() + sc];
      }
    }
  }
  for (double& v : shape) v /= static_cast<double>(masks.size());
  return shape;
}

ClassificationTree BuildGeometricTree(const std::vector<std::vector<RleMask>>& masks,
                                      int grid_h, int grid_w,
                                      const KMeansConfig& cfg) {
  const int n = static_cast<int>(masks.size());
  std::vector<double> values;
  values.reserve(static_cast<size_t>(n) * grid_h * grid_w);
  for (int c = 0; c < n; ++c) {
    if (masks[c].empty()) ThrowValidation("class ", c, " has no masks");
    const std::vector<double> shape = ShapeVector(masks[c], grid_h, grid_w);
    values.insert(values.end(), shape.begin(), shape.end());
  }
  FeatureTable table(n, grid_h * grid_w, std::move(values));
  KMeansResult km = KMeans(table, cfg);
  return TreeFromClusters("geometric", cfg.k, std::move(km.assignments));
}

ClassificationTree BuildLexicalTree(const Hierarchy& hierarchy,
                                    const CategorySet& categories) {
  const int n = categories.size();
  std::unordered_map<std::string, int> class_of;
  for (const Category& c : categories.categories()) class_of.emplace(c.name, c.id);

  ClassificationTree tree;
  tree.tree_id = "lexical";
  tree.leaf_parent.assign(n, -1);
  std::unordered_map<std::string, int> parent_index;
  for (const auto& [name, parent] : hierarchy) {
    auto it = class_of.find(name);
    if (it == class_of.end()) continue;
    auto [pit, inserted] =
        parent_index.emplace(parent, static_cast<int>(tree.parent_names.size()));
    if (inserted) tree.parent_names.push_back(parent);
    int& slot = tree.leaf_parent[it->second];
    if (slot >= 0 && slot != pit->second) {
      ThrowValidation("category '", name, "' mapped to two parents '",
                      tree.parent_names[slot], "' and '", parent, "'");
    }
    slot = pit->second;
  }
  for (int i = 0; i < n; ++i) {
    if (tree.leaf_parent[i] < 0) {
      ThrowValidation("category '", categories[i].name,
                      "' missing from hierarchy file");
    }
  }
  tree.num_parents = static_cast<int>(tree.parent_names.size());
  ValidateTree(tree, n);
  return tree;
}

}  // namespace forest
