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
#ifndef FOREST_TAXONOMY_H_
#define FOREST_TAXONOMY_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace forest {

// Frequency groups, ordered head-last: kRare < kCommon < kFrequent.
enum class Group : int { kRare = 0, kCommon = 1, kFrequent = 2 };

inline constexpr std::array<Group, 3> kAllGroups = {Group::kRare, Group::kCommon,
                                                    Group::kFrequent};

std::string_view GroupName(Group g);
// Throws ValidationError on anything other than "rare", "common", "frequent".
Group ParseGroup(std::string_view name);

// Image-count grouping: rare 1..10, common 11..100, frequent > 100.
// cf == 0 is an unseen category and has no group; throws ValidationError.
Group AssignGroup(int64_t cf);

struct Category {
  int id = 0;
  std::string name;
  int64_t cf = 0;
  Group group = Group::kRare;

  bool operator==(const Category&) const = default;
};

struct GroupFrequencyRange {
  int64_t cf_min = 0;
  int64_t cf_max = 0;
  int count = 0;  // number of classes in the group; range is meaningless at 0
};

// The N fine-grained classes. Ids are dense: categories()[i].id == i.
class CategorySet {
 public:
  CategorySet() = default;
  // Validates density/uniqueness of ids and sorts by id.
  explicit CategorySet(std::vector<Category> categories);

  int size() const { return static_cast<int>(categories_.size()); }
  const Category& operator[](int id) const { return categories_[id]; }
  const std::vector<Category>& categories() const { return categories_; }

  // Returns the id of `name`, or nullopt.
  std::optional<int> Find(std::string_view name) const;

  const GroupFrequencyRange& range(Group g) const {
    return ranges_[static_cast<int>(g)];
  }

  bool operator==(const CategorySet& other) const {
    return categories_ == other.categories_;
  }

 private:
  std::vector<Category> categories_;
  std::array<GroupFrequencyRange, 3> ranges_{};
};

// Three-level tree: root -> M parent classes -> N shared leaves.
struct ClassificationTree {
  std::string tree_id;
  int num_parents = 0;
  std::vector<std::string> parent_names;
  std::vector<int> leaf_parent;  // leaf id -> parent index

  int num_leaves() const { return static_cast<int>(leaf_parent.size()); }
  // Leaf count of every parent.
  std::vector<int> ParentSizes() const;

  bool operator==(const ClassificationTree&) const = default;
};

// Returns every structural violation of `tree` against a leaf set of size
// `num_leaves`; empty when the tree is valid. Never repairs anything.
std::vector<std::string> TreeViolations(const ClassificationTree& tree,
                                        int num_leaves);

// Returns `tree` unchanged when valid; otherwise throws ValidationError
// listing all violations.
const ClassificationTree& ValidateTree(const ClassificationTree& tree,
                                       int num_leaves);

// T trees over one leaf set.
class Forest {
 public:
  Forest() = default;
  explicit Forest(std::vector<ClassificationTree> trees);

  int size() const { return static_cast<int>(trees_.size()); }
  int num_leaves() const { return trees_.empty() ? 0 : trees_[0].num_leaves(); }
  const ClassificationTree& operator[](int t) const { return trees_[t]; }
  const std::vector<ClassificationTree>& trees() const { return trees_; }
  const ClassificationTree* Find(std::string_view tree_id) const;

 private:
  std::vector<ClassificationTree> trees_;
};

// Mask-head channel for `class_id`: the class's parent in the geometric tree.
int GeoMaskChannel(int class_id, const ClassificationTree& geo_tree);

}  // namespace forest

#endif  // FOREST_TAXONOMY_H_
