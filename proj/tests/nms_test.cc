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
#include "forest/nms.h"

#include <gtest/gtest.h>

#include "forest/status.h"
#include "forest/synthetic.h"
#include "oracles.h"

namespace forest {
namespace {

using synthetic::Rng;

TEST(IoUTest, Examples) {
  const Box a{0, 0, 2, 2};
  EXPECT_EQ(IoU(a, a), 1.0);
  EXPECT_EQ(IoU(a, Box{5, 5, 6, 6}), 0.0);
  EXPECT_DOUBLE_EQ(IoU(a, Box{1, 0, 3, 2}), 1.0 / 3.0);
  EXPECT_EQ(IoU(Box{1, 1, 1, 1}, Box{1, 1, 1, 1}), 0.0);
}

TEST(IoUTest, SymmetricAndMatchesReference) {
  Rng rng(2);
  for (int i = 0; i < 500; ++i) {
    auto box = [&] {
      const double x = rng.Uniform(0, 10), y = rng.Uniform(0, 10);
      return Box{x, y, x + rng.Uniform(0, 5), y + rng.Uniform(0, 5)};
    };
    const Box a = box(), b = box();
    EXPECT_EQ(IoU(a, b), IoU(b, a));
    EXPECT_NEAR(IoU(a, b), oracle::IoUL(a, b), 1e-15);
  }
}

TEST(ThresholdDiscreteTest, Defaults) {
  const ResamplingConfig cfg = ResamplingConfig::DiscreteDefaults();
  EXPECT_EQ(ThresholdDiscrete(Group::kFrequent, cfg), 0.7);
  EXPECT_EQ(ThresholdDiscrete(Group::kCommon, cfg), 0.8);
  EXPECT_EQ(ThresholdDiscrete(Group::kRare, cfg), 0.9);
  ResamplingConfig alt = cfg;
  alt.alpha_f = 0.6;
  alt.alpha_c = 0.7;
  alt.alpha_r = 0.8;
  EXPECT_EQ(ThresholdDiscrete(Group::kCommon, alt), 0.7);
}

TEST(ThresholdDiscreteTest, TailGetsHigherThreshold) {
  const ResamplingConfig cfg = ResamplingConfig::DiscreteDefaults();
  for (int64_t cf = 1; cf < 300; ++cf) {
    EXPECT_GE(ThresholdDiscrete(AssignGroup(cf), cfg),
              ThresholdDiscrete(AssignGroup(cf + 1), cfg));
  }
}

TEST(ThresholdLinearTest, Endpoints) {
  const ResamplingConfig cfg = ResamplingConfig::LinearDefaults();
  const GroupFrequencyRange freq{101, 5000, 10};
  EXPECT_EQ(ThresholdLinear(5000, Group::kFrequent, freq, cfg), 0.65);
  const GroupFrequencyRange rare{1, 10, 4};
  EXPECT_EQ(ThresholdLinear(1, Group::kRare, rare, cfg), 0.85 + 0.1);
  EXPECT_EQ(ThresholdLinear(10, Group::kRare, rare, cfg), 0.85);
  const GroupFrequencyRange single{42, 42, 1};
  EXPECT_EQ(ThresholdLinear(42, Group::kCommon, single, cfg), 0.75);
  EXPECT_THROW(ThresholdLinear(11, Group::kRare, rare, cfg), ValidationError);
}

TEST(ThresholdLinearTest, AsPrintedSwapsHeadAndTailBase) {
  ResamplingConfig cfg = ResamplingConfig::LinearDefaults();
  cfg.as_printed = true;
  const GroupFrequencyRange freq{101, 5000, 10};
  EXPECT_EQ(ThresholdLinear(5000, Group::kFrequent, freq, cfg), 0.85);
  const GroupFrequencyRange rare{1, 10, 4};
  EXPECT_EQ(ThresholdLinear(10, Group::kRare, rare, cfg), 0.65);
}

TEST(ThresholdLinearTest, MonotoneAndBounded) {
  Rng rng(6);
  const CategorySet cats = synthetic::MakeLongTailCategories(30, 40, 50, rng);
  const ResamplingConfig cfg = ResamplingConfig::LinearDefaults();
  const std::vector<double> thr = ClassThresholds(cats, cfg);
  for (int i = 0; i < cats.size(); ++i) {
    const double base = ThresholdDiscrete(cats[i].group, ResamplingConfig{
        ThresholdScheme::kDiscrete, 0.65, 0.75, 0.85});
    EXPECT_GE(thr[i], base);
    EXPECT_LE(thr[i], base + 0.1 + 1e-15);
    for (int j = 0; j < cats.size(); ++j) {
      if (cats[i].group == cats[j].group && cats[i].cf <= cats[j].cf) {
        EXPECT_GE(thr[i], thr[j]);
      }
    }
  }
}

TEST(ResamplingConfigTest, Validation) {
  EXPECT_NO_THROW(ResamplingConfig::DiscreteDefaults().Validate());
  EXPECT_NO_THROW(ResamplingConfig::LinearDefaults().Validate());
  ResamplingConfig bad = ResamplingConfig::DiscreteDefaults();
  bad.alpha_c = 0.95;
  EXPECT_THROW(bad.Validate(), ValidationError);
  ResamplingConfig over = ResamplingConfig::LinearDefaults();
  over.beta = 0.3;
  EXPECT_THROW(over.Validate(), ValidationError);
  EXPECT_EQ(ParseScheme("linear"), ThresholdScheme::kLinear);
  EXPECT_THROW(ParseScheme("soft"), ValidationError);
}

TEST(MatchProposalsTest, Examples) {
  const std::vector<GroundTruthBox> gts = {{{0, 0, 10, 10}, 2}, {{0, 0, 10, 10}, 7},
                                           {{50, 50, 60, 60}, 5}};
  std::vector<ScoredBox> boxes = {{{50, 50, 60, 60}, 0.9}, {{200, 200, 210, 210}, 0.5}};
  auto out = MatchProposalsToGt(boxes, gts);
  EXPECT_EQ(out[0].class_id, 5);
  EXPECT_EQ(out[1].class_id, kBackground);
  // IoU 0.6 to class 2 and 0.55 to class 7.
  const Box base{0, 0, 10, 10};
  const std::vector<GroundTruthBox> two = {{synthetic::ShiftForIoU(base, 0.6), 2},
                                           {synthetic::ShiftForIoU(base, 0.55), 7}};
  const std::vector<ScoredBox> one = {{base, 1.0}};
  EXPECT_EQ(MatchProposalsToGt(one, two)[0].class_id, 2);
  // Equal IoU goes to the lower gt index.
  EXPECT_EQ(MatchProposalsToGt(std::vector<ScoredBox>{{base, 1.0}}, gts)[0].class_id, 2);
  EXPECT_EQ(MatchProposalsToGt(one, {})[0].class_id, kBackground);
}

TEST(ClassAwareNmsTest, Examples) {
  const std::vector<double> thr07 = {0.7}, thr08 = {0.8};
  const std::vector<Proposal> single = {{{0, 0, 1, 1}, 0.5, 0}};
  EXPECT_EQ(ClassAwareNms(single, thr07, 0.7).size(), 1u);

  const Box a{0, 0, 10, 10};
  const Box b = synthetic::ShiftForIoU(a, 0.75);
  ASSERT_NEAR(IoU(a, b), 0.75, 1e-12);
  const std::vector<Proposal> pair = {{a, 0.9, 0}, {b, 0.8, 0}};
  EXPECT_EQ(ClassAwareNms(pair, thr07, 0.7).size(), 1u);
  EXPECT_EQ(ClassAwareNms(pair, thr08, 0.7).size(), 2u);
}

TEST(ClassAwareNmsTest, KeptClassThresholdAppliesToEveryone) {
  const Box a{0, 0, 10, 10};
  const Box b = synthetic::ShiftForIoU(a, 0.75);
  const std::vector<double> thr = {0.9, 0.7};
  // Kept box of class 0 (thr 0.9) spares the class-1 box at IoU 0.75.
  EXPECT_EQ(ClassAwareNms(std::vector<Proposal>{{a, 0.9, 0}, {b, 0.8, 1}}, thr, 0.7).size(), 2u);
  // Reversed roles: the class-1 box (thr 0.7) removes the class-0 box.
  EXPECT_EQ(ClassAwareNms(std::vector<Proposal>{{a, 0.9, 1}, {b, 0.8, 0}}, thr, 0.7).size(), 1u);
  // Background uses the background threshold.
  EXPECT_EQ(ClassAwareNms(std::vector<Proposal>{{a, 0.9, kBackground}, {b, 0.8, 0}}, thr, 0.8)
                .size(),
            2u);
}

TEST(ClassAwareNmsTest, ScoreTiesKeepInputOrder) {
  const Box a{0, 0, 10, 10};
  const std::vector<Proposal> p = {{a, 0.5, 1}, {a, 0.5, 0}};
  const std::vector<double> thr = {0.5, 0.5};
  const auto kept = ClassAwareNms(p, thr, 0.7);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].class_id, 1);
}

TEST(ClassAwareNmsTest, MissingThresholdIsAnError) {
  const std::vector<Proposal> p = {{{0, 0, 1, 1}, 0.5, 3}};
  const std::vector<double> thr = {0.7};
  EXPECT_THROW(ClassAwareNms(p, thr, 0.7), ValidationError);
}

std::vector<Proposal> RandomProposals(Rng& rng, int n, int classes) {
  std::vector<Proposal> p(n);
  for (Proposal& q : p) {
    const double x = rng.Uniform(0, 20), y = rng.Uniform(0, 20);
    q.box = {x, y, x + rng.Uniform(1, 12), y + rng.Uniform(1, 12)};
    // Coarse scores so ties actually happen.
    q.score = rng.UniformInt(6) / 5.0;
    q.class_id = rng.UniformInt(classes + 1) - 1;
  }
  return p;
}

TEST(ClassAwareNmsTest, MatchesQuadraticReference) {
  Rng rng(17);
  for (int trial = 0; trial < 2000; ++trial) {
    const int classes = 1 + rng.UniformInt(4);
    const auto props = RandomProposals(rng, 1 + rng.UniformInt(12), classes);
    std::vector<double> thr(classes);
    for (double& t : thr) t = rng.Uniform(0.1, 0.95);
    const double bg = rng.Uniform(0.1, 0.95);
    EXPECT_EQ(ClassAwareNmsIndices(props, thr, bg), oracle::ReferenceNms(props, thr, bg));
  }
}

TEST(ClassAwareNmsTest, EqualThresholdsIsStandardNms) {
  Rng rng(18);
  for (int trial = 0; trial < 500; ++trial) {
    const double t = rng.Uniform(0.2, 0.9);
    const auto props = RandomProposals(rng, 1 + rng.UniformInt(12), 3);
    const std::vector<double> thr(3, t);
    // Same boxes with every label erased: single-threshold NMS.
    std::vector<Proposal> plain = props;
    for (Proposal& p : plain) p.class_id = kBackground;
    EXPECT_EQ(ClassAwareNmsIndices(props, thr, t), ClassAwareNmsIndices(plain, thr, t));
  }
}

TEST(ClassAwareNmsTest, RaisingThresholdNeverLosesThatClass) {
  Rng rng(19);
  for (int trial = 0; trial < 500; ++trial) {
    const auto props = RandomProposals(rng, 2 + rng.UniformInt(11), 2);
    std::vector<double> thr = {rng.Uniform(0.1, 0.8), rng.Uniform(0.1, 0.8)};
    auto count = [&](const std::vector<double>& t) {
      int c = 0;
      for (const Proposal& p : ClassAwareNms(props, t, 0.5)) c += p.class_id == 0;
      return c;
    };
    const int before = count(thr);
    thr[0] = std::min(1.0, thr[0] + rng.Uniform(0, 0.3));
    EXPECT_GE(count(thr), before);
  }
}

TEST(ClassAwareNmsTest, KeepOrderInvariants) {
  Rng rng(20);
  for (int trial = 0; trial < 300; ++trial) {
    const auto props = RandomProposals(rng, 1 + rng.UniformInt(12), 3);
    const std::vector<double> thr = {0.3, 0.5, 0.7};
    const auto kept = ClassAwareNms(props, thr, 0.6);
    for (size_t i = 1; i < kept.size(); ++i) EXPECT_GE(kept[i - 1].score, kept[i].score);
    for (size_t i = 0; i < kept.size(); ++i) {
      const double t = kept[i].class_id < 0 ? 0.6 : thr[kept[i].class_id];
      for (size_t j = i + 1; j < kept.size(); ++j) EXPECT_LE(IoU(kept[i].box, kept[j].box), t);
    }
  }
}

}  // namespace
}  // namespace forest
