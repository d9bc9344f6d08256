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
#include "forest/io.h"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <unordered_map>

#include "forest/status.h"

namespace forest::io {
namespace {

std::string FormatDouble(double v) { return Json(v).dump(); }

double ParseDouble(const std::string& token, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (token.empty() || end != token.c_str() + token.size()) {
    ThrowValidation(where, "not a number: '", token, "'");
  }
  return v;
}

std::optional<int> OptionalInt(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<int>();
}

void RequireObject(const Json& j, const char* what) {
  if (!j.is_object()) ThrowValidation(what, " must be a JSON object");
}

Json OptionalToJson(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::optional<double> OptionalDouble(const Json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

JsonLinesReader::JsonLinesReader(std::string path)
    : path_(std::move(path)), in_(path_) {
  if (!in_) throw IoError("cannot open '" + path_ + "' for reading");
}

bool JsonLinesReader::Next(Json& out) {
  std::string text;
  while (std::getline(in_, text)) {
    ++line_;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out = Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw ValidationError(Context(std::string("malformed JSON: ") + e.what()));
    }
    return true;
  }
  if (in_.bad()) throw IoError("read error on '" + path_ + "'");
  return false;
}

std::string JsonLinesReader::Context(const std::string& what) const {
  return path_ + ":" + std::to_string(line_) + ": " + what;
}

JsonLinesWriter::JsonLinesWriter(std::string path)
    : path_(std::move(path)), out_(path_, std::ios::binary | std::ios::trunc) {
  if (!out_) throw IoError("cannot open '" + path_ + "' for writing");
}

void JsonLinesWriter::Write(const Json& j) {
  out_ << j.dump() << '\n';
  if (!out_) throw IoError("write error on '" + path_ + "'");
}

void JsonLinesWriter::Close() {
  out_.close();
  if (out_.fail()) throw IoError("cannot finish writing '" + path_ + "'");
}

std::string ReadTextFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteTextFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << contents;
  out.close();
  if (out.fail()) throw IoError("write error on '" + path + "'");
}

Json ReadJsonFile(const std::string& path) {
  const std::string text = ReadTextFile(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": malformed JSON: " + e.what());
  }
}

// --- categories ------------------------------------------------------------

Json CategoryToJson(const Category& c) {
  return Json{{"id", c.id},
              {"name", c.name},
              {"cf", c.cf},
              {"group", std::string(GroupName(c.group))}};
}

Category CategoryFromJson(const Json& j, bool strict) {
  RequireObject(j, "category");
  Category c;
  c.id = j.at("id").get<int>();
  c.name = j.at("name").get<std::string>();
  c.cf = j.at("cf").get<int64_t>();
  if (c.cf < 0) ThrowValidation("category ", c.id, " has negative cf");
  auto it = j.find("group");
  if (it != j.end() && !it->is_null()) {
    c.group = ParseGroup(it->get<std::string>());
    if (strict && AssignGroup(c.cf) != c.group) {
      ThrowValidation("category '", c.name, "' is labeled ", GroupName(c.group),
                      " but cf=", c.cf, " derives ", GroupName(AssignGroup(c.cf)));
    }
  } else {
    c.group = AssignGroup(c.cf);
  }
  return c;
}

CategorySet ReadCategories(const std::string& path, bool strict) {
  JsonLinesReader reader(path);
  std::vector<Category> cats;
  Json j;
  while (reader.Next(j)) {
    cats.push_back(WithLineContext(reader, [&] { return CategoryFromJson(j, strict); }));
  }
  try {
    return CategorySet(std::move(cats));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void WriteCategories(const std::string& path, const CategorySet& categories) {
  JsonLinesWriter w(path);
  for (const Category& c : categories.categories()) w.Write(CategoryToJson(c));
  w.Close();
}

// --- trees -------------------------------------------------------------------

Json TreeToJson(const ClassificationTree& tree) {
  return Json{{"tree_id", tree.tree_id},
              {"M", tree.num_parents},
              {"parent_names", tree.parent_names},
              {"leaf_parent", tree.leaf_parent}};
}

ClassificationTree TreeFromJson(const Json& j) {
  RequireObject(j, "tree");
  ClassificationTree t;
  t.tree_id = j.at("tree_id").get<std::string>();
  t.num_parents = j.at("M").get<int>();
  t.parent_names = j.at("parent_names").get<std::vector<std::string>>();
  t.leaf_parent = j.at("leaf_parent").get<std::vector<int>>();
  if (t.num_parents != static_cast<int>(t.parent_names.size())) {
    ThrowValidation("tree '", t.tree_id, "': M=", t.num_parents, " but ",
                    t.parent_names.size(), " parent names");
  }
  return t;
}

ClassificationTree ReadTree(const std::string& path) {
  const Json j = ReadJsonFile(path);
  try {
    return TreeFromJson(j);
  } catch (const Json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void WriteTree(const std::string& path, const ClassificationTree& tree) {
  WriteTextFile(path, TreeToJson(tree).dump(2) + "\n");
}

// --- feature table -------------------------------------------------------

FeatureTable ReadFeatureTable(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string text;
  int line = 0;
  int rows = -1, dim = -1;
  std::vector<double> values;
  while (std::getline(in, text)) {
    ++line;
    const std::string where = path + ":" + std::to_string(line) + ": ";
    std::istringstream ls(text);
    std::vector<std::string> tokens;
    for (std::string tok; ls >> tok;) tokens.push_back(tok);
    if (tokens.empty()) continue;
    if (rows < 0) {
      if (tokens.size() != 2) ThrowValidation(where, "header must be '<N> <D>'");
      rows = static_cast<int>(ParseDouble(tokens[0], where));
      dim = static_cast<int>(ParseDouble(tokens[1], where));
      if (rows < 1 || dim < 1) ThrowValidation(where, "N and D must be positive");
      continue;
    }
    if (static_cast<int>(tokens.size()) != dim) {
      ThrowValidation(where, "expected ", dim, " values, got ", tokens.size());
    }
    if (static_cast<int>(values.size() / dim) >= rows) {
      ThrowValidation(where, "more than N=", rows, " rows");
    }
    for (const std::string& tok : tokens) {
      const double v = ParseDouble(tok, where);
      if (!std::isfinite(v)) ThrowValidation(where, "non-finite feature value");
      values.push_back(v);
    }
  }
  if (rows < 0) ThrowValidation(path, ": empty feature table");
  if (static_cast<int>(values.size() / dim) != rows) {
    ThrowValidation(path, ": expected ", rows, " rows, got ", values.size() / dim);
  }
  return FeatureTable(rows, dim, std::move(values));
}

void WriteFeatureTable(const std::string& path, const FeatureTable& table) {
  std::string out = std::to_string(table.rows()) + " " + std::to_string(table.dim()) + "\n";
  for (int r = 0; r < table.rows(); ++r) {
    const auto row = table.row(r);
    for (int d = 0; d < table.dim(); ++d) {
      if (d) out += ' ';
      out += FormatDouble(row[d]);
    }
    out += '\n';
  }
  WriteTextFile(path, out);
}

// --- hierarchy -------------------------------------------------------------

Hierarchy ParseHierarchy(const std::string& text) {
  Hierarchy entries;
  std::string pending_key;
  bool top_is_object = false;
  auto callback = [&](int depth, Json::parse_event_t event, Json& parsed) {
    if (depth == 0 && event == Json::parse_event_t::object_start) top_is_object = true;
    if (depth == 1 && event == Json::parse_event_t::key) {
      pending_key = parsed.get<std::string>();
    } else if (depth == 1 && event == Json::parse_event_t::value) {
      if (!parsed.is_string()) {
        ThrowValidation("parent of '", pending_key, "' must be a string");
      }
      entries.emplace_back(pending_key, parsed.get<std::string>());
    }
    return true;
  };
  try {
    const Json unused = Json::parse(text, callback);
    (void)unused;
  } catch (const Json::parse_error& e) {
    ThrowValidation("malformed hierarchy JSON: ", e.what());
  }
  if (!top_is_object) ThrowValidation("hierarchy must be a JSON object");
  std::unordered_map<std::string, std::string> seen;
  for (const auto& [name, parent] : entries) {
    auto [it, inserted] = seen.emplace(name, parent);
    if (!inserted && it->second != parent) {
      ThrowValidation("category '", name, "' mapped to two parents '", it->second,
                      "' and '", parent, "'");
    }
  }
  return entries;
}

Hierarchy ReadHierarchy(const std::string& path) {
  try {
    return ParseHierarchy(ReadTextFile(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

void WriteHierarchy(const std::string& path, const Hierarchy& hierarchy) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (const auto& [name, parent] : hierarchy) j[name] = parent;
  WriteTextFile(path, j.dump(2) + "\n");
}

// --- masks -------------------------------------------------------------------

std::vector<std::vector<RleMask>> ReadMaskFixture(const std::string& path,
                                                  int num_classes) {
  std::vector<std::vector<RleMask>> masks(num_classes);
  JsonLinesReader reader(path);
  Json j;
  while (reader.Next(j)) {
    WithLineContext(reader, [&] {
      RequireObject(j, "mask record");
      const int c = j.at("class_id").get<int>();
      if (c < 0 || c >= num_classes) {
        ThrowValidation("class_id ", c, " outside [0, ", num_classes, ")");
      }
      for (const auto& m : j.at("masks")) {
        masks[c].push_back(RleMask::Parse(m.get<std::string>()));
      }
    });
  }
  for (int c = 0; c < num_classes; ++c) {
    if (masks[c].empty()) ThrowValidation(path, ": class ", c, " has no masks");
  }
  return masks;
}

void WriteMaskFixture(const std::string& path,
                      const std::vector<std::vector<RleMask>>& masks) {
  JsonLinesWriter w(path);
  for (size_t c = 0; c < masks.size(); ++c) {
    Json list = Json::array();
    for (const RleMask& m : masks[c]) list.push_back(m.ToString());
    w.Write(Json{{"class_id", c}, {"masks", list}});
  }
  w.Close();
}

// --- logit records --------------------------------------------------------

Json RecordToJson(const LogitRecord& rec) {
  Json j{{"object_id", rec.object_id},
         {"gt_class", rec.gt_class ? Json(*rec.gt_class) : Json(nullptr)},
         {"fine_logits", rec.fine_logits},
         {"parent_logits", Json::object()}};
  for (const auto& [tree_id, z] : rec.parent_logits) j["parent_logits"][tree_id] = z;
  if (!rec.parent_probs.empty()) {
    j["parent_probs"] = Json::object();
    for (const auto& [tree_id, p] : rec.parent_probs) j["parent_probs"][tree_id] = p;
  }
  return j;
}

LogitRecord RecordFromJson(const Json& j) {
  RequireObject(j, "logit record");
  LogitRecord rec;
  rec.object_id = j.at("object_id").get<std::string>();
  rec.gt_class = OptionalInt(j, "gt_class");
  rec.fine_logits = j.at("fine_logits").get<std::vector<double>>();
  if (auto it = j.find("parent_logits"); it != j.end() && !it->is_null()) {
    for (const auto& [tree_id, z] : it->items()) {
      rec.parent_logits[tree_id] = z.get<std::vector<double>>();
    }
  }
  if (auto it = j.find("parent_probs"); it != j.end() && !it->is_null()) {
    for (const auto& [tree_id, p] : it->items()) {
      rec.parent_probs[tree_id] = p.get<std::vector<double>>();
    }
  }
  return rec;
}

// --- scores ------------------------------------------------------------------

Json ScoreLineToJson(const ScoreLine& line) {
  Json j{{"object_id", line.object_id},
         {"gt_class", line.gt_class ? Json(*line.gt_class) : Json(nullptr)},
         {"mode", std::string(ScoreModeName(line.result.mode))}};
  if (!line.result.tree_id.empty()) j["tree_id"] = line.result.tree_id;
  j["label"] = line.result.label;
  j["max_score"] = line.result.max_score();
  j["scores"] = line.result.scores;
  return j;
}

ScoreLine ScoreLineFromJson(const Json& j) {
  RequireObject(j, "score line");
  ScoreLine line;
  line.object_id = j.at("object_id").get<std::string>();
  line.gt_class = OptionalInt(j, "gt_class");
  line.result.mode = ParseScoreMode(j.at("mode").get<std::string>());
  if (auto it = j.find("tree_id"); it != j.end()) {
    line.result.tree_id = it->get<std::string>();
  }
  line.result.label = j.at("label").get<int>();
  line.result.scores = j.at("scores").get<std::vector<double>>();
  if (line.result.label < 0 ||
      line.result.label >= static_cast<int>(line.result.scores.size())) {
    ThrowValidation("label ", line.result.label, " outside the score vector");
  }
  return line;
}

// --- boxes -------------------------------------------------------------------

Json BoxToJson(const Box& b) { return Json::array({b.x1, b.y1, b.x2, b.y2}); }

Box BoxFromJson(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) ThrowValidation("box must have 4 coordinates, got ", v.size());
  Box b{v[0], v[1], v[2], v[3]};
  for (double c : v) {
    if (!std::isfinite(c)) ThrowValidation("box has a non-finite coordinate");
  }
  if (!b.valid()) ThrowValidation("box has x2 < x1 or y2 < y1");
  return b;
}

Json ProposalToJson(const ImageProposal& p) {
  Json j{{"image_id", p.image_id},
         {"box", BoxToJson(p.proposal.box)},
         {"score", p.proposal.score},
         {"class_id", p.proposal.class_id}};
  if (p.kept_rank) j["kept_rank"] = *p.kept_rank;
  return j;
}

ImageProposal ProposalFromJson(const Json& j) {
  RequireObject(j, "proposal");
  ImageProposal p;
  p.image_id = j.at("image_id").get<std::string>();
  p.proposal.box = BoxFromJson(j.at("box"));
  p.proposal.score = j.at("score").get<double>();
  if (!std::isfinite(p.proposal.score)) ThrowValidation("non-finite score");
  const auto cls = OptionalInt(j, "class_id");
  p.proposal.class_id = cls ? *cls : kBackground;
  if (p.proposal.class_id < kBackground) {
    ThrowValidation("class_id ", p.proposal.class_id, " is neither a class nor -1");
  }
  p.kept_rank = OptionalInt(j, "kept_rank");
  return p;
}

Json GroundTruthToJson(const GroundTruth& g) {
  Json j{{"image_id", g.image_id}, {"box", BoxToJson(g.box)}, {"class_id", g.class_id}};
  if (g.mask) j["mask_rle"] = g.mask->ToString();
  return j;
}

GroundTruth GroundTruthFromJson(const Json& j) {
  RequireObject(j, "ground truth");
  GroundTruth g;
  g.image_id = j.at("image_id").get<std::string>();
  g.box = BoxFromJson(j.at("box"));
  g.class_id = j.at("class_id").get<int>();
  if (g.class_id < 0) ThrowValidation("ground truth class_id must be >= 0");
  if (auto it = j.find("mask_rle"); it != j.end() && !it->is_null()) {
    g.mask = RleMask::Parse(it->get<std::string>());
  }
  return g;
}

std::vector<GroundTruth> ReadGroundTruth(const std::string& path) {
  JsonLinesReader reader(path);
  std::vector<GroundTruth> out;
  Json j;
  while (reader.Next(j)) {
    out.push_back(WithLineContext(reader, [&] { return GroundTruthFromJson(j); }));
  }
  return out;
}

Json DetectionToJson(const Detection& d) {
  return Json{{"image_id", d.image_id},
              {"box", BoxToJson(d.box)},
              {"class_id", d.class_id},
              {"score", d.score},
              {"mask_rle", d.mask ? Json(d.mask->ToString()) : Json(nullptr)}};
}

Detection DetectionFromJson(const Json& j) {
  RequireObject(j, "detection");
  Detection d;
  d.image_id = j.at("image_id").get<std::string>();
  d.box = BoxFromJson(j.at("box"));
  d.class_id = j.at("class_id").get<int>();
  d.score = j.at("score").get<double>();
  if (!std::isfinite(d.score)) ThrowValidation("non-finite score");
  if (auto it = j.find("mask_rle"); it != j.end() && !it->is_null()) {
    d.mask = RleMask::Parse(it->get<std::string>());
  }
  return d;
}

std::vector<Detection> ReadDetections(const std::string& path) {
  JsonLinesReader reader(path);
  std::vector<Detection> out;
  Json j;
  while (reader.Next(j)) {
    out.push_back(WithLineContext(reader, [&] { return DetectionFromJson(j); }));
  }
  return out;
}

// --- reports -----------------------------------------------------------------

Json EvalReportToJson(const EvalReport& report) {
  Json per_class = Json::array();
  for (const ClassEval& ce : report.per_class) {
    Json curves = Json::array();
    for (const PrCurve& curve : ce.curves) {
      Json pts = Json::array();
      for (const PrPoint& p : curve.points) pts.push_back({p.recall, p.precision});
      curves.push_back(pts);
    }
    per_class.push_back(Json{{"class_id", ce.class_id},
                             {"n_gt", ce.n_gt},
                             {"ap", ce.ap},
                             {"pr_curves", curves}});
  }
  Json iou_thresholds = Json::array();
  for (int t = 0; t < kNumIouThresholds; ++t) iou_thresholds.push_back(IouThreshold(t));
  return Json{{"iou_type", std::string(IouTypeName(report.iou_type))},
              {"ap", report.ap},
              {"ap50", report.ap50},
              {"ap75", report.ap75},
              {"ap_r", OptionalToJson(report.ap_r)},
              {"ap_c", OptionalToJson(report.ap_c)},
              {"ap_f", OptionalToJson(report.ap_f)},
              {"num_detections", report.num_detections},
              {"num_ground_truths", report.num_ground_truths},
              {"iou_thresholds", iou_thresholds},
              {"per_class", per_class}};
}

EvalReport EvalReportFromJson(const Json& j) {
  RequireObject(j, "eval report");
  EvalReport r;
  const std::string type = j.at("iou_type").get<std::string>();
  if (type != "bbox" && type != "segm") ThrowValidation("unknown iou_type '", type, "'");
  r.iou_type = type == "segm" ? IouType::kMask : IouType::kBox;
  r.ap = j.at("ap").get<double>();
  r.ap50 = j.at("ap50").get<double>();
  r.ap75 = j.at("ap75").get<double>();
  r.ap_r = OptionalDouble(j.at("ap_r"));
  r.ap_c = OptionalDouble(j.at("ap_c"));
  r.ap_f = OptionalDouble(j.at("ap_f"));
  r.num_detections = j.at("num_detections").get<int>();
  r.num_ground_truths = j.at("num_ground_truths").get<int>();
  for (const Json& pc : j.at("per_class")) {
    ClassEval ce;
    ce.class_id = pc.at("class_id").get<int>();
    ce.n_gt = pc.at("n_gt").get<int>();
    const auto ap = pc.at("ap").get<std::vector<double>>();
    const Json& curves = pc.at("pr_curves");
    if (ap.size() != kNumIouThresholds || curves.size() != kNumIouThresholds) {
      ThrowValidation("class ", ce.class_id, " needs ", kNumIouThresholds,
                      " AP values and curves");
    }
    for (int t = 0; t < kNumIouThresholds; ++t) {
      ce.ap[t] = ap[t];
      ce.curves[t].n_gt = ce.n_gt;
      for (const Json& p : curves[t]) {
        ce.curves[t].points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
      }
    }
    r.per_class.push_back(std::move(ce));
  }
  return r;
}

std::string PerClassCsv(const EvalReport& report, const CategorySet& categories) {
  std::string out = "class_id,name,group,n_gt,ap,ap50,ap75\n";
  for (const ClassEval& ce : report.per_class) {
    const Category& c = categories[ce.class_id];
    out += std::to_string(ce.class_id) + "," + c.name + "," +
           std::string(GroupName(c.group)) + "," + std::to_string(ce.n_gt) + "," +
           FormatDouble(ce.mean_ap()) + "," + FormatDouble(ce.ap[0]) + "," +
           FormatDouble(ce.ap[5]) + "\n";
  }
  return out;
}

Json NoisyReportToJson(const NoisyReport& r) {
  return Json{{"mean_noisy", r.mean_noisy},
              {"eps_gt", r.eps_gt},
              {"eps_neg", r.eps_neg},
              {"source", r.source},
              {"n_objects", r.n_objects}};
}

NoisyReport NoisyReportFromJson(const Json& j) {
  RequireObject(j, "noisy report");
  NoisyReport r;
  r.mean_noisy = j.at("mean_noisy").get<double>();
  r.eps_gt = j.at("eps_gt").get<double>();
  r.eps_neg = j.at("eps_neg").get<double>();
  r.source = j.at("source").get<std::string>();
  r.n_objects = j.at("n_objects").get<int64_t>();
  return r;
}

std::string HistogramCsv(const Histogram& h) {
  std::string out = "bin_lo,bin_hi,mass\n";
  for (int b = 0; b < h.bins(); ++b) {
    out += FormatDouble(h.bin_lo(b)) + "," + FormatDouble(h.bin_hi(b)) + "," +
           FormatDouble(h.mass[b]) + "\n";
  }
  return out;
}

Histogram HistogramFromCsv(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "bin_lo,bin_hi,mass") {
    ThrowValidation("histogram CSV must start with 'bin_lo,bin_hi,mass'");
  }
  Histogram h;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string lo, hi, mass;
    if (!std::getline(ls, lo, ',') || !std::getline(ls, hi, ',') ||
        !std::getline(ls, mass)) {
      ThrowValidation("malformed histogram row '", line, "'");
    }
    h.mass.push_back(ParseDouble(mass, "histogram: "));
  }
  h.empty = true;
  for (double m : h.mass) {
    if (m != 0.0) h.empty = false;
  }
  return h;
}

}  // namespace forest::io
