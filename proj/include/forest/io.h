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
#ifndef FOREST_IO_H_
#define FOREST_IO_H_

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "forest/analysis.h"
#include "forest/evaluation.h"
#include "forest/nms.h"
#include "forest/scoring.h"
#include "forest/taxonomy.h"
#include "forest/tree_builder.h"

namespace forest::io {

using Json = nlohmann::json;

// Reads one JSON document per non-blank line. Parse and schema errors
// surface as ValidationError prefixed with "<path>:<line>: ".
class JsonLinesReader {
 public:
  explicit JsonLinesReader(std::string path);

  // False at end of file.
  bool Next(Json& out);
  int line() const { return line_; }
  const std::string& path() const { return path_; }

  // "<path>:<line>: <what>"
  std::string Context(const std::string& what) const;

 private:
  std::string path_;
  std::ifstream in_;
  int line_ = 0;
};

class JsonLinesWriter {
 public:
  explicit JsonLinesWriter(std::string path);
  void Write(const Json& j);
  void Close();

 private:
  std::string path_;
  std::ofstream out_;
};

// Runs fn(), rethrowing any ValidationError or JSON type error with the
// reader's file:line prefix.
template <typename Fn>
auto WithLineContext(const JsonLinesReader& reader, Fn&& fn) -> decltype(fn());

Json ReadJsonFile(const std::string& path);
void WriteTextFile(const std::string& path, const std::string& contents);
std::string ReadTextFile(const std::string& path);

// --- categories: {"id", "name", "cf", "group"?} per line -----------------

Json CategoryToJson(const Category& c);
// Derives group from cf when absent. With `strict`, a supplied group must
// match the derived one.
Category CategoryFromJson(const Json& j, bool strict);
CategorySet ReadCategories(const std::string& path, bool strict = false);
void WriteCategories(const std::string& path, const CategorySet& categories);

// --- trees: {"tree_id", "M", "parent_names", "leaf_parent"} ---------------

Json TreeToJson(const ClassificationTree& tree);
ClassificationTree TreeFromJson(const Json& j);
ClassificationTree ReadTree(const std::string& path);
void WriteTree(const std::string& path, const ClassificationTree& tree);

// --- per-class feature table ---------------------------------------------
// Text: first line "<N> <D>", then N lines of D whitespace-separated reals.

FeatureTable ReadFeatureTable(const std::string& path);
void WriteFeatureTable(const std::string& path, const FeatureTable& table);

// --- lexical hierarchy: {"<category name>": "<parent name>", ...} ---------

// Keeps file order; a name listed twice with different parents is an error.
Hierarchy ParseHierarchy(const std::string& text);
Hierarchy ReadHierarchy(const std::string& path);
void WriteHierarchy(const std::string& path, const Hierarchy& hierarchy);

// --- mask fixture: {"class_id": int, "masks": ["HxW:runs", ...]} per line --

std::vector<std::vector<RleMask>> ReadMaskFixture(const std::string& path,
                                                  int num_classes);
void WriteMaskFixture(const std::string& path,
                      const std::vector<std::vector<RleMask>>& masks);

// --- logit records --------------------------------------------------------
// {"object_id", "gt_class": int|null, "fine_logits": [...],
//  "parent_logits": {"<tree_id>": [...]}, "parent_probs"?: {...}}

Json RecordToJson(const LogitRecord& rec);
LogitRecord RecordFromJson(const Json& j);

// --- score output ---------------------------------------------------------
// {"object_id", "gt_class", "mode", "tree_id"?, "label", "scores": [...]}

struct ScoreLine {
  std::string object_id;
  std::optional<int> gt_class;
  ScoreResult result;

  bool operator==(const ScoreLine&) const = default;
};

Json ScoreLineToJson(const ScoreLine& line);
ScoreLine ScoreLineFromJson(const Json& j);

// --- proposals, ground truth, detections ----------------------------------

Json BoxToJson(const Box& b);
Box BoxFromJson(const Json& j);

struct ImageProposal {
  std::string image_id;
  Proposal proposal;
  std::optional<int> kept_rank;

  bool operator==(const ImageProposal&) const = default;
};

Json ProposalToJson(const ImageProposal& p);
ImageProposal ProposalFromJson(const Json& j);

Json GroundTruthToJson(const GroundTruth& g);
GroundTruth GroundTruthFromJson(const Json& j);
std::vector<GroundTruth> ReadGroundTruth(const std::string& path);

Json DetectionToJson(const Detection& d);
Detection DetectionFromJson(const Json& j);
std::vector<Detection> ReadDetections(const std::string& path);

// --- reports --------------------------------------------------------------

Json EvalReportToJson(const EvalReport& report);
EvalReport EvalReportFromJson(const Json& j);
// class_id,name,group,n_gt,ap,ap50,ap75
std::string PerClassCsv(const EvalReport& report, const CategorySet& categories);

struct NoisyReport {
  double mean_noisy = 0.0;
  double eps_gt = 0.0;
  double eps_neg = 0.0;
  std::string source;
  int64_t n_objects = 0;

  bool operator==(const NoisyReport&) const = default;
};

Json NoisyReportToJson(const NoisyReport& r);
NoisyReport NoisyReportFromJson(const Json& j);

// bin_lo,bin_hi,mass
std::string HistogramCsv(const Histogram& h);
Histogram HistogramFromCsv(const std::string& csv);

}  // namespace forest::io

#include "forest/io_inl.h"

#endif  // FOREST_IO_H_
