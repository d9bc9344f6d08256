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

#include <gtest/gtest.h>

#include "forest/status.h"

namespace forest {
namespace {

TEST(AssignGroupTest, Boundaries) {
  EXPECT_EQ(AssignGroup(1), Group::kRare);
  EXPECT_EQ(AssignGroup(5), Group::kRare);
  EXPECT_EQ(AssignGroup(10), Group::kRare);
  EXPECT_EQ(AssignGroup(11), Group::kCommon);
  EXPECT_EQ(AssignGroup(100), Group::kCommon);
  EXPECT_EQ(AssignGroup(101), Group::kFrequent);
  EXPECT_EQ(AssignGroup(1'000'000), Group::kFrequent);
}

TEST(AssignGroupTest, UnseenCategoryIsAnError) {
  EXPECT_THROW(AssignGroup(0), ValidationError);
  EXPECT_THROW(AssignGroup(-3), ValidationError);
}

TEST(AssignGroupTest, MonotoneInFrequency) {
  for (int64_t a = 1; a < 300; ++a) {
    EXPECT_LE(static_cast<int>(AssignGroup(a)), static_cast<int>(AssignGroup(a + 1)));
  }
}

TEST(GroupNameTest, RoundTrip) {
  for (Group g : kAllGroups) EXPECT_EQ(ParseGroup(GroupName(g)), g);
  EXPECT_THROW(ParseGroup("medium"), ValidationError);
}

CategorySet ThreeGroups() {
  return CategorySet({{0, "a", 3, Group::kRare},
                      {1, "b", 7, Group::kRare},
                      {2, "c", 50, Group::kCommon},
                      {3, "d", 500, Group::kFrequent}});
}

TEST(CategorySetTest, RangesAndLookup) {
  const CategorySet cs = ThreeGroups();
  EXPECT_EQ(cs.size(), 4);
  EXPECT_EQ(cs.range(Group::kRare).cf_min, 3);
  EXPECT_EQ(cs.range(Group::kRare).cf_max, 7);
  EXPECT_EQ(cs.range(Group::kRare).count, 2);
  EXPECT_EQ(cs.range(Group::kCommon).count, 1);
  EXPECT_EQ(cs.Find("c"), 2);
  EXPECT_FALSE(cs.Find("zzz").has_value());
}

TEST(CategorySetTest, RejectsSparseOrDuplicateIds) {
  EXPECT_THROW(CategorySet({{0, "a", 3, Group::kRare}, {2, "b", 3, Group::kRare}}),
               ValidationError);
  EXPECT_THROW(CategorySet({{0, "a", 3, Group::kRare}, {0, "b", 3, Group::kRare}}),
               ValidationError);
  EXPECT_THROW(CategorySet(std::vector<Category>{}), ValidationError);
}

TEST(ValidateTreeTest, SingleParentIsValid) {
  ClassificationTree t{"t", 1, {"all"}, {0, 0, 0, 0}};
  EXPECT_TRUE(TreeViolations(t, 4).empty());
  EXPECT_NO_THROW(ValidateTree(t, 4));
}

TEST(ValidateTreeTest, MissingLeaf) {
  ClassificationTree t{"t", 1, {"all"}, {0, 0, 0}};
  const auto v = TreeViolations(t, 4);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "leaf 3 unassigned");
}

TEST(ValidateTreeTest, EmptyParent) {
  ClassificationTree t{"t", 2, {"p0", "p1"}, {0, 0, 0}};
  const auto v = TreeViolations(t, 3);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "parent 1 empty");
}

TEST(ValidateTreeTest, ListsEveryViolation) {
  ClassificationTree t{"t", 3, {"p0", "p1", "p2"}, {0, 7}};
  const auto v = TreeViolations(t, 3);
  EXPECT_GE(v.size(), 3u);  // out of range leaf 1, leaf 2 missing, empty parents
  try {
    ValidateTree(t, 3);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("leaf 2 unassigned"), std::string::npos);
  }
}

TEST(ValidateTreeTest, MoreParentsThanLeaves) {
  ClassificationTree t{"t", 3, {"a", "b", "c"}, {0, 1}};
  EXPECT_FALSE(TreeViolations(t, 2).empty());
}

TEST(ForestTest, RejectsDuplicateIdsAndMismatchedLeaves) {
  ClassificationTree a{"x", 1, {"all"}, {0, 0}};
  ClassificationTree b{"x", 2, {"p", "q"}, {0, 1}};
  EXPECT_THROW(Forest({a, b}), ValidationError);
  ClassificationTree c{"y", 1, {"all"}, {0, 0, 0}};
  EXPECT_THROW(Forest({a, c}), ValidationError);
  const Forest f({a, ClassificationTree{"y", 2, {"p", "q"}, {1, 0}}});
  EXPECT_EQ(f.size(), 2);
  EXPECT_EQ(f.num_leaves(), 2);
  ASSERT_NE(f.Find("y"), nullptr);
  EXPECT_EQ(f.Find("y")->leaf_parent[0], 1);
  EXPECT_EQ(f.Find("z"), nullptr);
}

TEST(GeoMaskChannelTest, LooksUpParent) {
  ClassificationTree t{"geometric", 4, {"a", "b", "c", "d"}, {0, 1, 2, 3, 0, 1, 2, 3}};
  EXPECT_EQ(GeoMaskChannel(7, t), 3);
  ClassificationTree one{"geometric", 1, {"all"}, {0, 0, 0}};
  for (int c = 0; c < 3; ++c) EXPECT_EQ(GeoMaskChannel(c, one), 0);
  EXPECT_THROW(GeoMaskChannel(8, t), ValidationError);
  EXPECT_THROW(GeoMaskChannel(-1, t), ValidationError);
}

}  // namespace
}  // namespace forest
