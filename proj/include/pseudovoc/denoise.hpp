#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pseudovoc/annotation.hpp"
#include "pseudovoc/classes.hpp"
#include "pseudovoc/detection.hpp"
#include "pseudovoc/error.hpp"

namespace pseudovoc {

// Conventional IoU threshold when NMS is enabled; NMS itself defaults to off.
inline constexpr double kDefaultNmsIou = 0.3;

/// Drop detections whose class is absent from the image-level label set of
/// their image. Removing such detections can only remove false positives.
inline DetectionSet class_consistency_filter(
    const DetectionSet& dets, const std::map<std::string, ClassSet>& labels) {
  DetectionSet out;
  out.provenance = dets.provenance;
  for (const auto& det : dets.items) {
    const auto it = labels.find(det.image_id);
    if (it == labels.end()) {
      throw Error(ErrorKind::UnknownImage,
                  "detection references image '" + det.image_id +
                      "' absent from the label map");
    }
    if (it->second.contains(det.cls)) out.items.push_back(det);
  }
  return out;
}

namespace detail {

// Indices of `items` grouped by (image, class), in ingestion order, with the
// groups themselves ordered by first appearance.
inline std::vector<std::vector<std::size_t>> group_by_image_class(
    const std::vector<Detection>& items) {
  std::map<std::pair<std::string, int>, std::size_t> group_of;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto key = std::make_pair(items[i].image_id, class_index(items[i].cls));
    const auto [it, inserted] = group_of.try_emplace(key, groups.size());
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

// Group indices sorted by score descending, ties broken by ingestion order.
inline std::vector<std::size_t> by_score_desc(const std::vector<Detection>& items,
                                              std::vector<std::size_t> group) {
  std::stable_sort(group.begin(), group.end(), [&](std::size_t a, std::size_t b) {
    return items[a].score > items[b].score;
  });
  return group;
}

}  // namespace detail

/// Greedy per-image, per-class non-maximum suppression. A detection survives
/// iff its IoU with every higher-ranked survivor of its group is < iou_thr.
/// Survivors come back in ingestion order.
inline DetectionSet nms(const DetectionSet& dets, double iou_thr) {
  if (iou_thr < 0.0 || iou_thr > 1.0) {
    throw Error(ErrorKind::InvalidParams, "nms threshold must be in [0, 1]");
  }
  std::vector<bool> keep(dets.items.size(), false);
  for (const auto& group : detail::group_by_image_class(dets.items)) {
    std::vector<std::size_t> kept;
    for (const auto i : detail::by_score_desc(dets.items, group)) {
      const bool suppressed = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
        return iou(dets.items[i].box, dets.items[k].box) >= iou_thr;
      });
      if (!suppressed) {
        kept.push_back(i);
        keep[i] = true;
      }
    }
  }
  DetectionSet out;
  out.provenance = dets.provenance;
  for (std::size_t i = 0; i < dets.items.size(); ++i) {
    if (keep[i]) out.items.push_back(dets.items[i]);
  }
  return out;
}

/// Keep at most `max_per_class` top-scoring detections per (image, class),
/// ties broken by ingestion order; survivors keep ingestion order.
inline DetectionSet cap_per_class(const DetectionSet& dets, int max_per_class) {
  if (max_per_class < 0) {
    throw Error(ErrorKind::InvalidParams, "max-per-class must be >= 0");
  }
  std::vector<bool> keep(dets.items.size(), false);
  for (const auto& group : detail::group_by_image_class(dets.items)) {
    const auto ranked = detail::by_score_desc(dets.items, group);
    const auto n = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(max_per_class));
    for (std::size_t r = 0; r < n; ++r) keep[ranked[r]] = true;
  }
  DetectionSet out;
  out.provenance = dets.provenance;
  for (std::size_t i = 0; i < dets.items.size(); ++i) {
    if (keep[i]) out.items.push_back(dets.items[i]);
  }
  return out;
}

/// Record of which de-noising stages produced a pseudo-label set. Fields left
/// empty mean "not applied / not known here"; they are provenance metadata,
/// not instructions.
struct PseudoLabelParams {
  std::optional<double> tau;
  bool labels_applied = false;
  std::optional<double> nms_iou;
  std::optional<int> max_per_class;
};

/// De-noised detections regrouped as per-image annotation objects. Images
/// with no surviving detections are absent from the map.
struct PseudoLabelSet {
  std::map<std::string, std::vector<GtObject>> by_image;
  std::string provenance;
  PseudoLabelParams params;
};

/// Group surviving detections by image, dropping scores. All resulting
/// objects are non-difficult: pseudo labels carry no difficulty notion.
inline PseudoLabelSet build_pseudo_labels(const DetectionSet& dets,
                                          PseudoLabelParams params = {}) {
  PseudoLabelSet out;
  out.provenance = dets.provenance;
  out.params = params;
  for (const auto& det : dets.items) {
    out.by_image[det.image_id].push_back(GtObject{det.cls, det.box, false});
  }
  return out;
}

namespace detail {

inline std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace detail

/// VOC annotation document for one image; inverse of parse_annotation.
inline std::string serialize_annotation(const ImageRecord& record) {
  std::ostringstream out;
  out << "<annotation>\n";
  out << "  <folder>VOC2007</folder>\n";
  out << "  <filename>" << detail::xml_escape(record.image_id) << ".jpg</filename>\n";
  if (record.size) {
    out << "  <size>\n";
    out << "    <width>" << record.size->width << "</width>\n";
    out << "    <height>" << record.size->height << "</height>\n";
    out << "    <depth>3</depth>\n";
    out << "  </size>\n";
  }
  for (const auto& object : record.objects) {
    out << "  <object>\n";
    out << "    <name>" << class_name(object.cls) << "</name>\n";
    out << "    <difficult>" << (object.difficult ? 1 : 0) << "</difficult>\n";
    out << "    <bndbox>\n";
    out << "      <xmin>" << object.box.xmin << "</xmin>\n";
    out << "      <ymin>" << object.box.ymin << "</ymin>\n";
    out << "      <xmax>" << object.box.xmax << "</xmax>\n";
    out << "      <ymax>" << object.box.ymax << "</ymax>\n";
    out << "    </bndbox>\n";
    out << "  </object>\n";
  }
  out << "</annotation>\n";
  return out.str();
}

/// Write a devkit-shaped tree: Annotations/<id>.xml for every image plus
/// ImageSets/Main/<split_name>.txt listing exactly the images present,
/// one id per line, sorted lexicographically.
inline void export_voc(const PseudoLabelSet& labels,
                       const std::filesystem::path& out_dir,
                       const std::string& split_name = "pseudo") {
  namespace fs = std::filesystem;
  const auto annotations = out_dir / "Annotations";
  const auto imagesets = out_dir / "ImageSets" / "Main";
  std::error_code ec;
  fs::create_directories(annotations, ec);
  fs::create_directories(imagesets, ec);
  if (ec) {
    throw Error(ErrorKind::IoFailure, "cannot create '" + out_dir.string() + "'");
  }

  for (const auto& [image_id, objects] : labels.by_image) {
    // ids become file names; refuse anything that could leave out_dir
    if (image_id.empty() || image_id.find('/') != std::string::npos ||
        image_id.find('\\') != std::string::npos || image_id.find("..") != std::string::npos) {
      throw Error(ErrorKind::InvalidParams,
                  "image id '" + image_id + "' is not usable as a file name");
    }
    const ImageRecord record{image_id, objects, std::nullopt};
    std::ofstream out(annotations / (image_id + ".xml"), std::ios::binary);
    out << serialize_annotation(record);
    if (!out) {
      throw Error(ErrorKind::IoFailure, "cannot write annotation for '" + image_id + "'");
    }
  }

  // std::map iteration is already lexicographic.
  std::ofstream split(imagesets / (split_name + ".txt"), std::ios::binary);
  for (const auto& [image_id, objects] : labels.by_image) {
    split << image_id << '\n';
  }
  if (!split) {
    throw Error(ErrorKind::IoFailure, "cannot write split file '" + split_name + "'");
  }
}

}  // namespace pseudovoc
