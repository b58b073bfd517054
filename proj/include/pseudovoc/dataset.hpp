#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "pseudovoc/annotation.hpp"
#include "pseudovoc/error.hpp"

namespace pseudovoc {

/// A split's worth of annotated images. Iteration order is the order of ids
/// in the split file, which anchors every downstream determinism guarantee.
struct Dataset {
  std::string split;
  std::vector<ImageRecord> images;

  bool operator==(const Dataset&) const = default;
};

/// Parse an image-set split file. Plain format keeps every id; the per-class
/// format ("id 1" / "id -1" / "id 0") keeps only ids flagged 1.
inline std::vector<std::string> parse_imageset(const std::string& text) {
  std::vector<std::string> ids;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string id, flag, extra;
    if (!(fields >> id)) continue;  // blank line
    if (fields >> flag) {
      if (fields >> extra) {
        throw Error(ErrorKind::MalformedLine,
                    "line " + std::to_string(line_no) + ": more than two fields");
      }
      if (flag != "1" && flag != "-1" && flag != "0") {
        throw Error(ErrorKind::MalformedLine,
                    "line " + std::to_string(line_no) + ": flag '" + flag +
                        "' not in {-1, 0, 1}");
      }
      if (flag == "1") ids.push_back(id);
    } else {
      ids.push_back(id);
    }
  }
  return ids;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::IoFailure, "cannot open '" + path.string() + "'");
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace detail

/// Load every image listed in `split_file` from `annotation_dir`, preserving
/// split order. The split id is authoritative for the record's image_id.
inline Dataset load_dataset(const std::filesystem::path& annotation_dir,
                            const std::filesystem::path& split_file) {
  Dataset dataset;
  dataset.split = split_file.stem().string();
  const auto ids = parse_imageset(detail::read_file(split_file));

  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) {
      throw Error(ErrorKind::MalformedLine, "duplicate image id '" + id + "'");
    }
  }

  dataset.images.reserve(ids.size());
  for (const auto& id : ids) {
    const auto path = annotation_dir / (id + ".xml");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::MissingAnnotation,
                  "'" + id + "' listed in split but '" + path.string() + "' is absent");
    }
    try {
      ImageRecord record = parse_annotation(detail::read_file(path));
      record.image_id = id;
      dataset.images.push_back(std::move(record));
    } catch (const Error& e) {
      throw Error(e.kind(), "annotation '" + id + "': " + e.what());
    }
  }
  return dataset;
}

/// Image-level labels for every image: class presence, difficult included.
inline std::map<std::string, ClassSet> image_level_labels(const Dataset& dataset) {
  std::map<std::string, ClassSet> labels;
  for (const auto& record : dataset.images) {
    labels[record.image_id] = record.label_set();
  }
  return labels;
}

}  // namespace pseudovoc
