#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "pseudovoc/classes.hpp"
#include "pseudovoc/dataset.hpp"
#include "pseudovoc/detection.hpp"
#include "pseudovoc/error.hpp"
#include "pseudovoc/geometry.hpp"

namespace pseudovoc {

inline constexpr double kDefaultIouThreshold = 0.5;

enum class ApMode { ElevenPoint, Area };

inline const char* to_string(ApMode mode) {
  return mode == ApMode::ElevenPoint ? "11pt" : "area";
}

inline ApMode ap_mode_from_string(const std::string& text) {
  if (text == "11pt") return ApMode::ElevenPoint;
  if (text == "area") return ApMode::Area;
  throw Error(ErrorKind::InvalidParams, "mode must be 11pt or area, got '" + text + "'");
}

enum class MatchFlag : std::uint8_t { TruePositive, FalsePositive, Ignored };

/// Per-detection match outcome for one class, in score order, plus the
/// recall denominator (non-difficult ground-truth count).
struct MatchFlags {
  std::vector<MatchFlag> flags;
  int npos = 0;
};

struct PrCurve {
  std::vector<double> recall;
  std::vector<double> precision;

  bool empty() const { return recall.empty(); }
};

/// VOC greedy matching. Detections (all of one class) are visited by score
/// descending, ties by ingestion order. Each is matched to the same-image
/// ground-truth object of maximal IoU (ties: lowest index). At or above
/// iou_thr an unmatched object gives a TP and is consumed; a difficult
/// object gives Ignored and is never consumed; anything else is an FP.
inline MatchFlags match_detections(
    const std::vector<Detection>& dets_of_class,
    const std::map<std::string, std::vector<GtObject>>& gt_of_class,
    double iou_thr = kDefaultIouThreshold) {
  MatchFlags result;
  std::map<std::string, std::vector<bool>> matched;
  for (const auto& [image_id, objects] : gt_of_class) {
    matched[image_id].assign(objects.size(), false);
    for (const auto& object : objects) {
      if (!object.difficult) ++result.npos;
    }
  }

  std::vector<std::size_t> order(dets_of_class.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets_of_class[a].score > dets_of_class[b].score;
  });

  result.flags.reserve(order.size());
  for (const auto i : order) {
    const auto& det = dets_of_class[i];
    const auto it = gt_of_class.find(det.image_id);
    if (it == gt_of_class.end() || it->second.empty()) {
      result.flags.push_back(MatchFlag::FalsePositive);
      continue;
    }
    const auto& objects = it->second;
    double best_iou = -1.0;
    std::size_t best = 0;
    for (std::size_t j = 0; j < objects.size(); ++j) {
      const double overlap = iou(det.box, objects[j].box);
      if (overlap > best_iou) {
        best_iou = overlap;
        best = j;
      }
    }
    if (best_iou >= iou_thr) {
      if (objects[best].difficult) {
        result.flags.push_back(MatchFlag::Ignored);
      } else if (!matched[det.image_id][best]) {
        matched[det.image_id][best] = true;
        result.flags.push_back(MatchFlag::TruePositive);
      } else {
        result.flags.push_back(MatchFlag::FalsePositive);
      }
    } else {
      result.flags.push_back(MatchFlag::FalsePositive);
    }
  }
  return result;
}

/// Cumulative precision/recall over non-ignored detections in score order.
/// With npos = 0 the curve is empty.
inline PrCurve precision_recall(const MatchFlags& matches) {
  PrCurve curve;
  if (matches.npos == 0) return curve;
  int tp = 0;
  int fp = 0;
  for (const auto flag : matches.flags) {
    if (flag == MatchFlag::Ignored) continue;
    if (flag == MatchFlag::TruePositive) ++tp; else ++fp;
    curve.recall.push_back(static_cast<double>(tp) / matches.npos);
    curve.precision.push_back(static_cast<double>(tp) / (tp + fp));
  }
  return curve;
}

/// VOC2007 11-point interpolated AP: mean over r in {0, 0.1, ..., 1.0} of the
/// maximum precision among points with recall >= r (0 for an empty set).
inline double average_precision_11pt(const PrCurve& curve) {
  if (curve.empty()) return 0.0;
  double sum = 0.0;
  for (int level = 0; level <= 10; ++level) {
    const double r = level / 10.0;
    double best = 0.0;
    for (std::size_t i = 0; i < curve.recall.size(); ++i) {
      if (curve.recall[i] >= r) best = std::max(best, curve.precision[i]);
    }
    sum += best;
  }
  return sum / 11.0;
}

/// All-points AP (VOC2010+ style): area under the right-running-max envelope
/// of precision as a function of recall.
inline double average_precision_area(const PrCurve& curve) {
  if (curve.empty()) return 0.0;
  const std::size_t n = curve.recall.size();
  std::vector<double> envelope(n);
  double running = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    running = std::max(running, curve.precision[i]);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (curve.recall[i] - prev_recall) * envelope[i];
    prev_recall = curve.recall[i];
  }
  return ap;
}

inline double mean_ap(const std::map<ClassLabel, double>& per_class) {
  if (per_class.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [cls, ap] : per_class) sum += ap;
  return sum / static_cast<double>(per_class.size());
}

/// Per-class APs plus mAP for one detection set against one split.
/// Classes with npos = 0 get AP 0 when detections of the class exist and are
/// otherwise excluded from the mean; `excluded` records which.
struct ApReport {
  double iou_threshold = kDefaultIouThreshold;
  ApMode mode = ApMode::ElevenPoint;
  std::string split;
  std::string provenance;
  std::map<ClassLabel, double> per_class;
  std::vector<ClassLabel> excluded;
  double map = 0.0;
};

/// Full protocol: match -> PR -> AP per class, then the mean. Per-class work
/// may be spread over `workers` threads; the report is byte-identical for
/// any worker count.
inline ApReport evaluate(const DetectionSet& dets, const Dataset& gt,
                         double iou_thr = kDefaultIouThreshold,
                         ApMode mode = ApMode::ElevenPoint, int workers = 1) {
  if (iou_thr < 0.0 || iou_thr > 1.0) {
    throw Error(ErrorKind::InvalidParams, "iou threshold must be in [0, 1]");
  }
  if (workers < 1) {
    throw Error(ErrorKind::InvalidParams, "workers must be >= 1");
  }

  std::unordered_set<std::string> known_ids;
  known_ids.reserve(gt.images.size());
  for (const auto& record : gt.images) known_ids.insert(record.image_id);
  for (const auto& det : dets.items) {
    if (!known_ids.contains(det.image_id)) {
      throw Error(ErrorKind::UnknownImage,
                  "detection references image '" + det.image_id +
                      "' absent from split '" + gt.split + "'");
    }
  }

  std::array<std::vector<Detection>, kNumClasses> dets_by_class;
  for (const auto& det : dets.items) {
    dets_by_class[static_cast<std::size_t>(class_index(det.cls))].push_back(det);
  }
  std::array<std::map<std::string, std::vector<GtObject>>, kNumClasses> gt_by_class;
  std::array<int, kNumClasses> npos_by_class{};
  for (const auto& record : gt.images) {
    for (const auto& object : record.objects) {
      const auto c = static_cast<std::size_t>(class_index(object.cls));
      gt_by_class[c][record.image_id].push_back(object);
      if (!object.difficult) ++npos_by_class[c];
    }
  }

  std::array<std::optional<double>, kNumClasses> ap_slots;
  const auto run_class = [&](int c) {
    const auto ci = static_cast<std::size_t>(c);
    if (npos_by_class[ci] == 0) {
      if (!dets_by_class[ci].empty()) ap_slots[ci] = 0.0;
      return;  // no ground truth, no detections: excluded
    }
    const auto flags = match_detections(dets_by_class[ci], gt_by_class[ci], iou_thr);
    const auto curve = precision_recall(flags);
    ap_slots[ci] = mode == ApMode::ElevenPoint ? average_precision_11pt(curve)
                                               : average_precision_area(curve);
  };

  if (workers == 1) {
    for (int c = 0; c < kNumClasses; ++c) run_class(c);
  } else {
    std::vector<std::thread> pool;
    const int n = std::min(workers, kNumClasses);
    pool.reserve(static_cast<std::size_t>(n));
    for (int w = 0; w < n; ++w) {
      pool.emplace_back([&, w] {
        for (int c = w; c < kNumClasses; c += n) run_class(c);
      });
    }
    for (auto& t : pool) t.join();
  }

  ApReport report;
  report.iou_threshold = iou_thr;
  report.mode = mode;
  report.split = gt.split;
  report.provenance = dets.provenance;
  for (int c = 0; c < kNumClasses; ++c) {
    if (ap_slots[static_cast<std::size_t>(c)]) {
      report.per_class[class_at(c)] = *ap_slots[static_cast<std::size_t>(c)];
    } else {
      report.excluded.push_back(class_at(c));
    }
  }
  report.map = mean_ap(report.per_class);
  return report;
}

/// Machine-readable report document; key order and number rendering are
/// deterministic, so identical reports serialize byte-identically.
inline std::string report_to_json(const ApReport& report) {
  nlohmann::ordered_json doc;
  doc["split"] = report.split;
  doc["provenance"] = report.provenance;
  doc["iou_threshold"] = report.iou_threshold;
  doc["mode"] = to_string(report.mode);
  doc["difficult_policy"] = "voc-devkit";
  doc["npos_zero_policy"] = "zero-if-detected-else-excluded";
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (const auto& [cls, ap] : report.per_class) {
    per_class[std::string(class_name(cls))] = ap;
  }
  doc["per_class"] = std::move(per_class);
  nlohmann::ordered_json excluded = nlohmann::ordered_json::array();
  for (const auto cls : report.excluded) excluded.push_back(class_name(cls));
  doc["excluded_classes"] = std::move(excluded);
  doc["map"] = report.map;
  return doc.dump(2) + "\n";
}

inline ApReport report_from_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("per_class") ||
      !doc.contains("map") || !doc.contains("mode")) {
    throw Error(ErrorKind::MalformedRecord, "not a valid ApReport document");
  }
  ApReport report;
  report.split = doc.value("split", "");
  report.provenance = doc.value("provenance", "");
  report.iou_threshold = doc.value("iou_threshold", kDefaultIouThreshold);
  report.mode = ap_mode_from_string(doc["mode"].get<std::string>());
  for (const auto& [name, value] : doc["per_class"].items()) {
    report.per_class[require_class(name)] = value.get<double>();
  }
  if (doc.contains("excluded_classes")) {
    for (const auto& name : doc["excluded_classes"]) {
      report.excluded.push_back(require_class(name.get<std::string>()));
    }
  }
  report.map = doc["map"].get<double>();
  return report;
}

}  // namespace pseudovoc
