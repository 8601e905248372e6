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

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpdesc/corpus.hpp"
#include "fpdesc/geometry.hpp"

namespace fpdesc::detect {

struct Detection {
  std::string image_id;
  std::string label;
  BBox bbox;
  double score = 0;
};

/// Intersection over union; 0 for disjoint boxes.
double iou(const BBox& a, const BBox& b);

/// prob_object * iou. Both inputs must lie in [0, 1].
double confidence(double prob_object, double iou_value);

/// Detections and ground truth of one image. Per class, detections are visited by score
/// (desc, ties in input order) and each takes the unmatched ground-truth box of its class
/// with the highest IoU >= iou_thresh. Returns a TP flag per detection, in input order.
std::vector<bool> match_detections(std::span<const Detection> dets,
                                   std::span<const SymbolAnnotation> gts, double iou_thresh);

/// All-point AP: the precision at every TP, summed and divided by num_gt. Empty when the
/// class has neither ground truth nor detections.
std::optional<double> average_precision(const std::vector<bool>& ranked_flags, std::size_t num_gt);

struct PrPoint {
  double recall = 0;
  double precision = 0;
};

struct ClassResult {
  std::optional<double> ap;
  std::size_t num_gt = 0;
  std::size_t num_detections = 0;
  std::size_t true_positives = 0;
  std::vector<PrPoint> pr;
};

struct DetectionEvalResult {
  std::map<std::string, ClassResult> classes;
  std::vector<std::string> excluded;
  double map = 0;
  double iou_thresh = 0.5;
};

/// Arithmetic mean of the included classes' AP; throws InvalidArgument when none is included.
double mean_ap(const std::map<std::string, ClassResult>& classes);

/// Evaluates detections over many images. Classes listed in `classes` are reported even when
/// absent from both sides (and then excluded from mAP).
DetectionEvalResult evaluate_detections(std::span<const Detection> dets,
                                        const std::map<std::string, std::vector<SymbolAnnotation>>& gts,
                                        double iou_thresh = 0.5,
                                        std::span<const std::string> classes = {});

/// One JSON object per line: {"image_id", "class", "bbox": [x, y, w, h], "score"}.
std::vector<Detection> parse_detections(std::string_view text);
std::vector<Detection> read_detections(const std::filesystem::path& path);

std::string to_json(const DetectionEvalResult& result);

}  // namespace fpdesc::detect
