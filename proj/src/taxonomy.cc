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
#include "forest/taxonomy.h"

#include <algorithm>

#include "forest/status.h"

namespace forest {

std::string_view GroupName(Group g) {
  switch (g) {
    case Group::kRare:
      return "rare";
    case Group::kCommon:
      return "common";
    case Group::kFrequent:
      return "frequent";
  }
  return "unknown";
}

Group ParseGroup(std::string_view name) {
  if (name == "rare") return Group::kRare;
  if (name == "common") return Group::kCommon;
  if (name == "frequent") return Group::kFrequent;
  ThrowValidation("unknown group '", name, "'");
}

Group AssignGroup(int64_t cf) {
  if (cf <= 0) {
    ThrowValidation("unseen category: cf=", cf, " has no frequency group");
  }
  if (cf <= 10) return Group::kRare;
  if (cf <= 100) return Group::kCommon;
  return Group::kFrequent;
}

CategorySet::CategorySet(std::vector<Category> categories)
    : categories_(std::move(categories)) {
  if (categories_.empty()) ThrowValidation("category set is empty");
  std::sort(categories_.begin(), categories_.end(),
            [](const Category& a, const Category& b) { return a.id < b.id; });
  for (int i = 0; i < size(); ++i) {
    if (categories_[i].id != i) {
      ThrowValidation("category ids must be exactly 0..", size() - 1,
                      "; id ", i, " is missing or duplicated");
    }
    if (categories_[i].cf < 0) {
      ThrowValidation("category ", i, " has negative cf ", categories_[i].cf);
    }
  }
  for (const Category& c : categories_) {
    GroupFrequencyRange& r = ranges_[static_cast<int>(c.group)];
    if (r.count == 0) {
      r.cf_min = r.cf_max = c.cf;
    } else {
      r.cf_min = std::min(r.cf_min, c.cf);
      r.cf_max = std::max(r.cf_max, c.cf);
    }
    ++r.count;
  }
}

std::optional<int> CategorySet::Find(std::string_view name) const {
  for (const Category& c : categories_) {
    if (c.name == name) return c.id;
  }
  return std::nullopt;
}

std::vector<int> ClassificationTree::ParentSizes() const {
  std::vector<int> sizes(std::max(num_parents, 0), 0);
  for (int p : leaf_parent) {
    if (p >= 0 && p < num_parents) ++sizes[p];
  }
  return sizes;
}

std::vector<std::string> TreeViolations(const ClassificationTree& tree,
                                        int num_leaves) {
  using internal::StrCat;
  std::vector<std::string> errors;
  if (tree.num_parents < 1) {
    errors.push_back(StrCat("M=", tree.num_parents, " must be >= 1"));
  }
  if (tree.num_parents > num_leaves) {
    errors.push_back(
        StrCat("M=", tree.num_parents, " exceeds leaf count N=", num_leaves));
  }
  if (static_cast<int>(tree.parent_names.size()) != tree.num_parents) {
    errors.push_back(StrCat("parent_names has ", tree.parent_names.size(),
                            " entries, expected M=", tree.num_parents));
  }
  for (int leaf = 0; leaf < tree.num_leaves(); ++leaf) {
    const int p = tree.leaf_parent[leaf];
    if (leaf >= num_leaves) {
      errors.push_back(StrCat("leaf ", leaf, " out of range [0, ", num_leaves, ")"));
    } else if (p < 0 || p >= tree.num_parents) {
      errors.push_back(StrCat("leaf ", leaf, " parent index ", p,
                              " out of range [0, ", tree.num_parents, ")"));
    }
  }
  for (int leaf = tree.num_leaves(); leaf < num_leaves; ++leaf) {
    errors.push_back(StrCat("leaf ", leaf, " unassigned"));
  }
  const std::vector<int> sizes = tree.ParentSizes();
  for (int p = 0; p < static_cast<int>(sizes.size()); ++p) {
    if (sizes[p] == 0) errors.push_back(StrCat("parent ", p, " empty"));
  }
  return errors;
}

const ClassificationTree& ValidateTree(const ClassificationTree& tree,
                                       int num_leaves) {
  std::vector<std::string> errors = TreeViolations(tree, num_leaves);
  if (!errors.empty()) {
    std::string msg = "invalid tree '" + tree.tree_id + "':";
    for (const std::string& e : errors) msg += " " + e + ";";
    throw ValidationError(msg);
  }
  return tree;
}

Forest::Forest(std::vector<ClassificationTree> trees) : trees_(std::move(trees)) {
  if (trees_.empty()) ThrowValidation("forest needs at least one tree");
  const int n = trees_[0].num_leaves();
  for (size_t t = 0; t < trees_.size(); ++t) {
    ValidateTree(trees_[t], n);
    for (size_t u = 0; u < t; ++u) {
      if (trees_[u].tree_id == trees_[t].tree_id) {
        ThrowValidation("duplicate tree_id '", trees_[t].tree_id, "' in forest");
      }
    }
  }
}

const ClassificationTree* Forest::Find(std::string_view tree_id) const {
  for (const ClassificationTree& t : trees_) {
    if (t.tree_id == tree_id) return &t;
  }
  return nullptr;
}

int GeoMaskChannel(int class_id, const ClassificationTree& geo_tree) {
  if (class_id < 0 || class_id >= geo_tree.num_leaves()) {
    ThrowValidation("class id ", class_id, " out of range [0, ",
                    geo_tree.num_leaves(), ")");
  }
  return geo_tree.leaf_parent[class_id];
}

}  // namespace forest
