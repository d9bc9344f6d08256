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
#ifndef FOREST_TREE_BUILDER_H_
#define FOREST_TREE_BUILDER_H_

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "forest/mask.h"
#include "forest/taxonomy.h"

namespace forest {

inline constexpr int kDefaultVisualParents = 25;
inline constexpr int kDefaultGeometricParents = 50;
inline constexpr int kDefaultMaskGrid = 28;

// Row-major N x D matrix, one row per class id.
class FeatureTable {
 public:
  FeatureTable() = default;
  // Throws ValidationError on size mismatch or non-finite entries.
  FeatureTable(int rows, int dim, std::vector<double> values);

  int rows() const { return rows_; }
  int dim() const { return dim_; }
  std::span<const double> row(int i) const {
    return {values_.data() + static_cast<size_t>(i) * dim_,
            static_cast<size_t>(dim_)};
  }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const FeatureTable&) const = default;

 private:
  int rows_ = 0;
  int dim_ = 0;
  std::vector<double> values_;
};

struct KMeansConfig {
  int k = 1;
  uint64_t seed = 0;
  int max_iter = 300;
  // Stop once an iteration lowers the objective by no more than this.
  double tol = 0.0;
};

struct KMeansResult {
  std::vector<int> assignments;   // row -> cluster in [0, k)
  std::vector<double> centroids;  // k x dim, row-major
  double objective = 0.0;         // sum of squared distances to centroids
  // Objective after each Lloyd iteration; non-increasing.
  std::vector<double> objective_history;
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic in (table, cfg).
// Every cluster ends non-empty: an emptied cluster is re-seeded with the
// point farthest from its current centroid.
KMeansResult KMeans(const FeatureTable& table, const KMeansConfig& cfg);

ClassificationTree BuildVisualTree(const FeatureTable& table,
                                   const KMeansConfig& cfg);

// Averaged nearest-neighbour resampling of each class's masks onto a
// grid_h x grid_w grid, giving one shape vector in [0,1]^(grid_h*grid_w).
std::vector<double> ShapeVector(std::span<const RleMask> masks, int grid_h,
                                int grid_w);

// masks[c] holds the ground-truth masks of class c.
ClassificationTree BuildGeometricTree(const std::vector<std::vector<RleMask>>& masks,
                                      int grid_h, int grid_w,
                                      const KMeansConfig& cfg);

// (category name, parent name) in file order.
using Hierarchy = std::vector<std::pair<std::string, std::string>>;

// Parents are numbered by first appearance among entries naming a known
// category. Entries for unknown names are ignored.
ClassificationTree BuildLexicalTree(const Hierarchy& hierarchy,
                                    const CategorySet& categories);

}  // namespace forest

#endif  // FOREST_TREE_BUILDER_H_
