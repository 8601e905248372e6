// Copyright 2026 The fpdesc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fpdesc/detect_eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fpdesc/error.hpp"

namespace fpdesc::detect {
namespace {

std::vector<std::size_t> score_order(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].score > dets[b].score; });
  return order;
}

/// Matches, in the given visiting order, each detection against the still-free ground truth
/// of its own class.
void match_in_order(std::span<const Detection> dets, std::span<const std::size_t> order,
                    std::span<const SymbolAnnotation> gts, double iou_thresh,
                    std::vector<bool>& used, std::vector<bool>& flags) {
  for (std::size_t di : order) {
    const Detection& d = dets[di];
    double best = -1;
    std::size_t best_gt = gts.size();
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].label != d.label) continue;
      const double v = iou(d.bbox, gts[g].bbox);
      if (v >= iou_thresh && v > best) {
        best = v;
        best_gt = g;
      }
    }
    if (best_gt < gts.size()) {
      used[best_gt] = true;
      flags[di] = true;
    }
  }
}

}  // namespace

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0) return 0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double confidence(double prob_object, double iou_value) {
  if (!(prob_object >= 0 && prob_object <= 1)) {
    throw InvalidArgument("confidence: object probability must lie in [0, 1]");
  }
  if (!(iou_value >= 0 && iou_value <= 1)) throw InvalidArgument("confidence: IoU must lie in [0, 1]");
  return prob_object * iou_value;
}

std::vector<bool> match_detections(std::span<const Detection> dets,
                                   std::span<const SymbolAnnotation> gts, double iou_thresh) {
  std::vector<bool> flags(dets.size(), false);
  std::vector<bool> used(gts.size(), false);
  const auto order = score_order(dets);
  match_in_order(dets, order, gts, iou_thresh, used, flags);
  return flags;
}

std::optional<double> average_precision(const std::vector<bool>& ranked_flags, std::size_t num_gt) {
  if (num_gt == 0) {
    if (ranked_flags.empty()) return std::nullopt;
    return 0.0;
  }
  double sum = 0;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < ranked_flags.size(); ++i) {
    if (ranked_flags[i]) {
      ++tp;
      sum += static_cast<double>(tp) / static_cast<double>(i + 1);
    }
  }
  return sum / static_cast<double>(num_gt);
}

double mean_ap(const std::map<std::string, ClassResult>& classes) {
  double sum = 0;
  std::size_t n = 0;
  for (const auto& entry : classes) {
    if (entry.second.ap) {
      sum += *entry.second.ap;
      ++n;
    }
  }
  if (n == 0) throw InvalidArgument("mean_ap: every class is excluded");
  return sum / static_cast<double>(n);
}

DetectionEvalResult evaluate_detections(std::span<const Detection> dets,
                                        const std::map<std::string, std::vector<SymbolAnnotation>>& gts,
                                        double iou_thresh, std::span<const std::string> classes) {
  DetectionEvalResult result;
  result.iou_thresh = iou_thresh;
  std::set<std::string> labels(classes.begin(), classes.end());
  for (const auto& d : dets) labels.insert(d.label);
  for (const auto& entry : gts) {
    for (const auto& g : entry.second) labels.insert(g.label);
  }

  std::vector<bool> flags(dets.size(), false);
  std::map<std::string, std::vector<bool>> used;
  for (const auto& entry : gts) used[entry.first].assign(entry.second.size(), false);
  static const std::vector<SymbolAnnotation> kNone;
  std::vector<bool> none_used;
  const auto order = score_order(dets);
  for (std::size_t di : order) {
    const Detection& d = dets[di];
    auto it = gts.find(d.image_id);
    const auto& image_gts = it == gts.end() ? kNone : it->second;
    auto& image_used = it == gts.end() ? none_used : used[d.image_id];
    const std::size_t one[1] = {di};
    match_in_order(dets, one, image_gts, iou_thresh, image_used, flags);
  }

  for (const auto& label : labels) {
    ClassResult cr;
    for (const auto& entry : gts) {
      for (const auto& g : entry.second) cr.num_gt += g.label == label;
    }
    std::vector<bool> ranked;
    for (std::size_t di : order) {
      if (dets[di].label == label) ranked.push_back(flags[di]);
    }
    cr.num_detections = ranked.size();
    std::size_t tp = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
      tp += ranked[i];
      cr.pr.push_back(PrPoint{cr.num_gt ? static_cast<double>(tp) / static_cast<double>(cr.num_gt) : 0.0,
                              static_cast<double>(tp) / static_cast<double>(i + 1)});
    }
    cr.true_positives = tp;
    cr.ap = average_precision(ranked, cr.num_gt);
    if (!cr.ap) result.excluded.push_back(label);
    result.classes.emplace(label, std::move(cr));
  }
  result.map = mean_ap(result.classes);
  return result;
}

std::vector<Detection> parse_detections(std::string_view text) {
  std::vector<Detection> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line(text.substr(start, end - start));
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(std::string("detections: ") + e.what(), line_no);
    }
    const std::string where = "detections line " + std::to_string(line_no);
    if (!j.is_object()) throw SchemaError(where + ": expected a JSON object");
    for (const char* key : {"image_id", "class", "bbox", "score"}) {
      if (!j.contains(key)) throw SchemaError(where + ": missing field '" + key + "'");
    }
    Detection d;
    try {
      d.image_id = j.at("image_id").is_string() ? j.at("image_id").get<std::string>()
                                                 : j.at("image_id").dump();
      d.label = j.at("class").get<std::string>();
      const auto& b = j.at("bbox");
      if (!b.is_array() || b.size() != 4) throw SchemaError(where + ": bbox must be [x, y, w, h]");
      d.bbox = BBox{b[0].get<double>(), b[1].get<double>(), b[2].get<double>(), b[3].get<double>()};
      d.score = j.at("score").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(where + ": " + e.what());
    }
    if (auto problem = bbox_problem(d.bbox); !problem.empty()) {
      throw InvalidBoxError(where + ": " + problem, out.size());
    }
    if (!(d.score >= 0 && d.score <= 1)) throw SchemaError(where + ": score must lie in [0, 1]");
    out.push_back(std::move(d));
  }
  return out;
}

std::vector<Detection> read_detections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open detections file " + path.string(), path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_detections(ss.str());
}

std::string to_json(const DetectionEvalResult& result) {
  nlohmann::ordered_json doc;
  doc["ap_definition"] =
      "all-point: precision at each true positive, summed, divided by the class's ground-truth count";
  doc["iou_thresh"] = result.iou_thresh;
  doc["mAP"] = result.map;
  doc["excluded_classes"] = result.excluded;
  nlohmann::ordered_json classes = nlohmann::ordered_json::object();
  for (const auto& [label, cr] : result.classes) {
    nlohmann::ordered_json c;
    c["ap"] = cr.ap ? nlohmann::ordered_json(*cr.ap) : nlohmann::ordered_json(nullptr);
    c["num_gt"] = cr.num_gt;
    c["num_detections"] = cr.num_detections;
    c["true_positives"] = cr.true_positives;
    nlohmann::ordered_json pr = nlohmann::ordered_json::array();
    for (const auto& p : cr.pr) pr.push_back({p.recall, p.precision});
    c["pr"] = std::move(pr);
    classes[label] = std::move(c);
  }
  doc["classes"] = std::move(classes);
  return doc.dump(2);
}

}  // namespace fpdesc::detect
