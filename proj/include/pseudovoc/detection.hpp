#pragma once

#include <cstdint>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pseudovoc/classes.hpp"
#include "pseudovoc/error.hpp"
#include "pseudovoc/geometry.hpp"

namespace pseudovoc {

// Detection score threshold used by the pipeline when none is given.
inline constexpr double kDefaultScoreThreshold = 0.1;

struct Detection {
  std::string image_id;
  ClassLabel cls = ClassLabel::aeroplane;
  double score = 0.0;
  BoundingBox box;

  bool operator==(const Detection&) const = default;
};

/// A detector dump. Order is ingestion order; score ties everywhere in the
/// toolkit break on it.
struct DetectionSet {
  std::vector<Detection> items;
  std::string provenance;
};

namespace detail {

inline int require_int_coord(const nlohmann::json& value, int line_no) {
  if (!value.is_number_integer()) {
    throw Error(ErrorKind::MalformedRecord,
                "line " + std::to_string(line_no) + ": bbox coordinate must be an integer");
  }
  const auto wide = value.get<std::int64_t>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
    throw Error(ErrorKind::MalformedRecord,
                "line " + std::to_string(line_no) + ": bbox coordinate out of range");
  }
  return static_cast<int>(wide);
}

}  // namespace detail

/// Read a detection dump: one JSON object per line with fields image_id,
/// class, score, bbox. Errors carry the offending line number.
inline DetectionSet read_dump(std::istream& in, std::string provenance = "") {
  DetectionSet dets;
  dets.provenance = std::move(provenance);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      throw Error(ErrorKind::MalformedRecord,
                  "line " + std::to_string(line_no) + ": not a JSON object");
    }
    if (!record.contains("image_id") || !record["image_id"].is_string() ||
        !record.contains("class") || !record["class"].is_string() ||
        !record.contains("score") || !record["score"].is_number() ||
        !record.contains("bbox") || !record["bbox"].is_array() ||
        record["bbox"].size() != 4) {
      throw Error(ErrorKind::MalformedRecord,
                  "line " + std::to_string(line_no) +
                      ": expected fields image_id, class, score, bbox[4]");
    }
    Detection det;
    det.image_id = record["image_id"].get<std::string>();
    const auto name = record["class"].get<std::string>();
    if (auto cls = class_from_name(name)) {
      det.cls = *cls;
    } else {
      throw Error(ErrorKind::UnknownClass,
                  "line " + std::to_string(line_no) + ": '" + name + "'");
    }
    det.score = record["score"].get<double>();
    if (det.score < 0.0 || det.score > 1.0) {
      throw Error(ErrorKind::ScoreOutOfRange,
                  "line " + std::to_string(line_no) + ": score " +
                      std::to_string(det.score) + " outside [0, 1]");
    }
    const auto& bbox = record["bbox"];
    det.box.xmin = detail::require_int_coord(bbox[0], line_no);
    det.box.ymin = detail::require_int_coord(bbox[1], line_no);
    det.box.xmax = detail::require_int_coord(bbox[2], line_no);
    det.box.ymax = detail::require_int_coord(bbox[3], line_no);
    if (!valid(det.box)) {
      throw Error(ErrorKind::InvalidBox,
                  "line " + std::to_string(line_no) + ": xmin>xmax or ymin>ymax");
    }
    dets.items.push_back(std::move(det));
  }
  return dets;
}

/// Byte-stable writer: fixed field order, shortest round-trip score rendering,
/// one record per line.
inline void write_dump(const DetectionSet& dets, std::ostream& out) {
  for (const auto& det : dets.items) {
    nlohmann::ordered_json record;
    record["image_id"] = det.image_id;
    record["class"] = class_name(det.cls);
    record["score"] = det.score;
    record["bbox"] = {det.box.xmin, det.box.ymin, det.box.xmax, det.box.ymax};
    out << record.dump() << '\n';
  }
  if (!out) throw Error(ErrorKind::IoFailure, "dump write failed");
}

inline std::string dump_to_string(const DetectionSet& dets) {
  std::ostringstream out;
  write_dump(dets, out);
  return out.str();
}

/// Keep detections with score >= tau (inclusive, so tau = 0 is the identity),
/// preserving order.
inline DetectionSet threshold_filter(const DetectionSet& dets,
                                     double tau = kDefaultScoreThreshold) {
  if (tau < 0.0 || tau > 1.0) {
    throw Error(ErrorKind::InvalidParams, "threshold must be in [0, 1]");
  }
  DetectionSet out;
  out.provenance = dets.provenance;
  for (const auto& det : dets.items) {
    if (det.score >= tau) out.items.push_back(det);
  }
  return out;
}

}  // namespace pseudovoc
