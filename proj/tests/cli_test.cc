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
// Runs the forest binary end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <set>

#include "forest/commands.h"
#include "forest/io.h"

namespace forest {
namespace {

namespace fs = std::filesystem;
using io::Json;

struct CliRun {
  int code = -1;
  std::string out;  // stdout and stderr
};

CliRun Cli(const std::string& args) {
  const std::string cmd = std::string(FOREST_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  char buf[4096];
  while (size_t n = fread(buf, 1, sizeof(buf), pipe)) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class CliTest : public testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = (fs::path(testing::TempDir()) /
            ("forest_cli_test_" + std::to_string(getpid()))).string();
    fs::remove_all(dir_);
    const CliRun r = Cli("make-demo --out-dir " + dir_ + "/demo --seed 3");
    ASSERT_EQ(r.code, 0) << r.out;
    demo_ = DemoLayout(dir_ + "/demo");
  }
  static std::string P(const std::string& name) { return dir_ + "/" + name; }
  static std::string Cats() { return " --categories " + demo_.categories; }

  static std::string dir_;
  static DemoPaths demo_;
};

std::string CliTest::dir_;
DemoPaths CliTest::demo_;

std::vector<Json> ReadLines(const std::string& path) {
  std::vector<Json> out;
  io::JsonLinesReader r(path);
  Json j;
  while (r.Next(j)) out.push_back(j);
  return out;
}

TEST_F(CliTest, BuildTreeDefaults) {
  CliRun r = Cli("build-tree --kind visual --input " + demo_.features + " --out " + P("v.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("M=25"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("cluster sizes:"), std::string::npos);
  r = Cli("build-tree --kind geometric" + Cats() + " --input " + demo_.masks + " --out " +
          P("g.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("M=50"), std::string::npos) << r.out;
  r = Cli("build-tree --kind lexical" + Cats() + " --input " + demo_.hierarchy + " --out " +
          P("l.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::set<std::string> parents;
  for (const auto& [name, parent] : io::ReadHierarchy(demo_.hierarchy)) parents.insert(parent);
  EXPECT_EQ(io::ReadTree(P("l.json")).num_parents, static_cast<int>(parents.size()));
}

TEST_F(CliTest, ScoreBaselineMatchesLibrary) {
  const CliRun r = Cli("score --mode baseline" + Cats() + " --records " + demo_.records +
                    " --out " + P("base.jsonl") + " --threads 3 --chunk 7");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("scored 400 records, mode baseline"), std::string::npos) << r.out;
  const auto lines = ReadLines(P("base.jsonl"));
  io::JsonLinesReader rec(demo_.records);
  Json j;
  size_t i = 0;
  while (rec.Next(j)) {
    const LogitRecord record = io::RecordFromJson(j);
    const io::ScoreLine got = io::ScoreLineFromJson(lines.at(i++));
    EXPECT_EQ(got.object_id, record.object_id);
    EXPECT_EQ(got.result.scores, ScoreBaseline(record).scores);
  }
  EXPECT_EQ(i, lines.size());
}

TEST_F(CliTest, ForestWithOneTreeEqualsTreeMode) {
  const std::string common = Cats() + " --tree " + demo_.visual_tree + " --records " + demo_.records;
  ASSERT_EQ(Cli("score --mode forest" + common + " --out " + P("f1.jsonl")).code, 0);
  ASSERT_EQ(Cli("score --mode tree" + common + " --out " + P("t1.jsonl")).code, 0);
  const auto f = ReadLines(P("f1.jsonl")), t = ReadLines(P("t1.jsonl"));
  ASSERT_EQ(f.size(), t.size());
  for (size_t i = 0; i < f.size(); ++i) {
    EXPECT_EQ(f[i]["scores"], t[i]["scores"]);
    EXPECT_EQ(f[i]["label"], t[i]["label"]);
  }
}

TEST_F(CliTest, MissingParentLogitsNamesTreeAndLine) {
  io::WriteTextFile(P("one_tree.json"),
                    io::TreeToJson(ClassificationTree{"extra", 1, {"all"},
                                                      std::vector<int>(60, 0)})
                        .dump());
  const CliRun r = Cli("score" + Cats() + " --tree " + P("one_tree.json") + " --records " +
                    demo_.records + " --out " + P("x.jsonl"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("extra"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find(demo_.records + ":1:"), std::string::npos) << r.out;
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(Cli("score --mode baseline" + Cats() + " --records " + P("nope.jsonl") + " --out " + P("y")).code, 2);
  EXPECT_EQ(Cli("score --mode sideways" + Cats() + " --records " + demo_.records + " --out " +
                P("y"))
                .code,
            1);
  EXPECT_EQ(Cli("frobnicate").code, 1);
  EXPECT_EQ(Cli("--help").code, 0);
}

TEST_F(CliTest, NmsFixedEqualsStandardNms) {
  const CliRun r = Cli("nms --scheme fixed --fixed-threshold 0.7" + Cats() + " --proposals " +
                    demo_.proposals + " --out " + P("kept.jsonl"));
  ASSERT_EQ(r.code, 0) << r.out;
  // Standard NMS per image, all boxes treated alike.
  std::map<std::string, std::vector<Proposal>> by_image;
  std::vector<std::string> order;
  for (const Json& j : ReadLines(demo_.proposals)) {
    const io::ImageProposal p = io::ProposalFromJson(j);
    if (!by_image.count(p.image_id)) order.push_back(p.image_id);
    Proposal q = p.proposal;
    q.class_id = kBackground;
    by_image[p.image_id].push_back(q);
  }
  size_t expected = 0;
  for (const std::string& id : order) {
    expected += ClassAwareNms(by_image[id], std::vector<double>{}, 0.7).size();
  }
  EXPECT_EQ(ReadLines(P("kept.jsonl")).size(), expected);
}

TEST_F(CliTest, NmsLinearStatsAndSurvival) {
  const CliRun r = Cli("nms --scheme linear" + Cats() + " --raw " + demo_.raw_proposals +
                    " --gt " + demo_.proposal_gt + " --out " + P("kept_lin.jsonl") +
                    " --stats " + P("stats.json"));
  ASSERT_EQ(r.code, 0) << r.out;
  const Json stats = io::ReadJsonFile(P("stats.json"));
  for (double t : stats["thresholds"]) {
    EXPECT_GE(t, 0.65);
    EXPECT_LE(t, 0.95);
  }
  const CliRun d = Cli("nms" + Cats() + " --proposals " + demo_.proposals + " --out " +
                    P("kept_d.jsonl") + " --stats " + P("stats_d.json"));
  ASSERT_EQ(d.code, 0) << d.out;
  const Json s = io::ReadJsonFile(P("stats_d.json"));
  EXPECT_GE(s["groups"]["rare"]["ratio"].get<double>(),
            s["groups"]["frequent"]["ratio"].get<double>());
  const auto kept = ReadLines(P("kept_d.jsonl"));
  ASSERT_FALSE(kept.empty());
  EXPECT_EQ(kept[0]["kept_rank"], 0);
}

TEST_F(CliTest, NmsUnknownClassAndSplitImage) {
  io::WriteTextFile(P("badp.jsonl"),
                    "{\"image_id\":\"a\",\"box\":[0,0,1,1],\"score\":0.5,\"class_id\":999}\n");
  CliRun r = Cli("nms" + Cats() + " --proposals " + P("badp.jsonl") + " --out " + P("k.jsonl"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find(":1:"), std::string::npos) << r.out;
  io::WriteTextFile(P("split.jsonl"),
                    "{\"image_id\":\"a\",\"box\":[0,0,1,1],\"score\":0.5,\"class_id\":1}\n"
                    "{\"image_id\":\"b\",\"box\":[0,0,1,1],\"score\":0.5,\"class_id\":1}\n"
                    "{\"image_id\":\"a\",\"box\":[0,0,1,1],\"score\":0.5,\"class_id\":1}\n");
  r = Cli("nms" + Cats() + " --proposals " + P("split.jsonl") + " --out " + P("k.jsonl"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find(":3:"), std::string::npos) << r.out;
}

TEST_F(CliTest, AnalyzeOneHotAndUniform) {
  io::WriteTextFile(P("cats10.jsonl"), [] {
    std::string s;
    for (int i = 0; i < 10; ++i) {
      s += "{\"id\":" + std::to_string(i) + ",\"name\":\"c" + std::to_string(i) + "\",\"cf\":5}\n";
    }
    return s;
  }());
  std::vector<double> onehot(10, -1000.0);
  onehot[3] = 0.0;
  io::WriteTextFile(P("onehot.jsonl"),
                    Json{{"object_id", "a"}, {"gt_class", 3}, {"fine_logits", onehot}}.dump() + "\n");
  io::WriteTextFile(P("uniform.jsonl"),
                    Json{{"object_id", "a"}, {"gt_class", 3},
                         {"fine_logits", std::vector<double>(10, 0.0)}}
                            .dump() + "\n");
  CliRun r = Cli("analyze --categories " + P("cats10.jsonl") + " --records " + P("onehot.jsonl") +
              " --eps-gt 0.1 --eps-neg 0.05 --out-dir " + P("an1"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(io::NoisyReportFromJson(ReadLines(P("an1/noisy_report.jsonl"))[0]).mean_noisy, 0.0);
  r = Cli("analyze --categories " + P("cats10.jsonl") + " --records " + P("uniform.jsonl") +
          " --eps-gt 0.1 --eps-neg 0.05 --out-dir " + P("an2"));
  ASSERT_EQ(r.code, 0) << r.out;
  const io::NoisyReport rep = io::NoisyReportFromJson(ReadLines(P("an2/noisy_report.jsonl"))[0]);
  EXPECT_EQ(rep.mean_noisy, 10.0);
  EXPECT_EQ(rep.eps_neg, 0.05);
  EXPECT_EQ(rep.source, "raw_fine");
  EXPECT_TRUE(fs::exists(P("an2/density_baseline_correct.csv")));
}

TEST_F(CliTest, AnalyzeForestBelowRaw) {
  std::string trees;
  for (const std::string& t : demo_.trees()) trees += " --tree " + t;
  const CliRun r = Cli("analyze" + Cats() + trees + " --records " + demo_.records +
                    " --out-dir " + P("an3"));
  ASSERT_EQ(r.code, 0) << r.out;
  std::map<std::string, double> mean;
  for (const Json& j : ReadLines(P("an3/noisy_report.jsonl"))) {
    const io::NoisyReport rep = io::NoisyReportFromJson(j);
    mean[rep.source] = rep.mean_noisy;
  }
  EXPECT_LT(mean.at("forest"), mean.at("raw_fine"));
}

TEST_F(CliTest, AnalyzeFromScoreFile) {
  ASSERT_EQ(Cli("score --mode baseline" + Cats() + " --records " + demo_.records + " --out " +
                P("sc.jsonl"))
                .code,
            0);
  const CliRun r = Cli("analyze" + Cats() + " --scores " + P("sc.jsonl") + " --out-dir " + P("an4"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(fs::exists(P("an4/density_baseline_correct.csv")));
}

TEST_F(CliTest, EvalPerfectAndEmpty) {
  // Ground truth re-emitted as detections.
  std::string dets;
  for (const Json& j : ReadLines(demo_.ground_truth)) {
    const GroundTruth g = io::GroundTruthFromJson(j);
    dets += io::DetectionToJson({g.image_id, g.box, g.class_id, 1.0, g.mask}).dump() + "\n";
  }
  io::WriteTextFile(P("perfect.jsonl"), dets);
  CliRun r = Cli("eval" + Cats() + " --detections " + P("perfect.jsonl") + " --gt " +
              demo_.ground_truth + " --out-dir " + P("ev1"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(io::EvalReportFromJson(io::ReadJsonFile(P("ev1/eval_bbox.json"))).ap, 1.0);
  EXPECT_EQ(io::EvalReportFromJson(io::ReadJsonFile(P("ev1/eval_segm.json"))).ap, 1.0);
  io::WriteTextFile(P("empty.jsonl"), "");
  r = Cli("eval" + Cats() + " --detections " + P("empty.jsonl") + " --gt " + demo_.ground_truth +
          " --out-dir " + P("ev2"));
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("warning: no detections"), std::string::npos);
  EXPECT_EQ(io::EvalReportFromJson(io::ReadJsonFile(P("ev2/eval_bbox.json"))).ap, 0.0);
}

TEST_F(CliTest, ConfigFileWithOverride) {
  io::WriteTextFile(P("run.toml"),
                    "threads = 2\n[score]\nmode = \"baseline\"\ncategories = \"" +
                        demo_.categories + "\"\nrecords = \"" + demo_.records + "\"\nout = \"" +
                        P("cfg.jsonl") + "\"\n");
  CliRun r = Cli("--config " + P("run.toml") + " score");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("mode baseline"), std::string::npos) << r.out;
  r = Cli("--config " + P("run.toml") + " score --mode preliminary --tree " + demo_.lexical_tree);
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("mode preliminary"), std::string::npos) << r.out;
}

}  // namespace
}  // namespace forest
