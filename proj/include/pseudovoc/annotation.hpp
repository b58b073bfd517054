#pragma once

#include <charconv>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "pseudovoc/classes.hpp"
#include "pseudovoc/error.hpp"
#include "pseudovoc/geometry.hpp"

namespace pseudovoc {

struct GtObject {
  ClassLabel cls = ClassLabel::aeroplane;
  BoundingBox box;
  bool difficult = false;

  bool operator==(const GtObject&) const = default;
};

struct ImageRecord {
  std::string image_id;
  std::vector<GtObject> objects;
  std::optional<Extent> size;

  /// Image-level labels: the set of classes present among the objects.
  /// Derived on demand, never stored.
  ClassSet label_set() const {
    ClassSet s;
    for (const auto& o : objects) s.insert(o.cls);
    return s;
  }

  bool operator==(const ImageRecord&) const = default;
};

namespace detail {

inline int parse_int_strict(std::string_view text, const char* what) {
  int value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || text.empty()) {
    throw Error(ErrorKind::MalformedAnnotation,
                std::string(what) + " is not an integer: '" + std::string(text) + "'");
  }
  return value;
}

inline std::string require_text(const boost::property_tree::ptree& node,
                                const char* path) {
  auto child = node.get_optional<std::string>(path);
  if (!child) {
    throw Error(ErrorKind::MalformedAnnotation,
                std::string("missing <") + path + ">");
  }
  return *child;
}

inline std::string filename_stem(const std::string& filename) {
  const auto dot = filename.rfind('.');
  return dot == std::string::npos ? filename : filename.substr(0, dot);
}

}  // namespace detail

/// Parse one VOC annotation document. Objects come back in document order;
/// unknown class names and inverted boxes are hard errors.
inline ImageRecord parse_annotation(const std::string& xml_text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(xml_text);
  try {
    pt::read_xml(in, tree, pt::xml_parser::trim_whitespace);
  } catch (const pt::xml_parser_error& e) {
    throw Error(ErrorKind::MalformedAnnotation, e.what());
  }

  const auto root = tree.get_child_optional("annotation");
  if (!root) {
    throw Error(ErrorKind::MalformedAnnotation, "missing <annotation> root");
  }

  ImageRecord record;
  record.image_id = detail::filename_stem(detail::require_text(*root, "filename"));

  if (const auto size = root->get_child_optional("size")) {
    Extent extent;
    extent.width = detail::parse_int_strict(detail::require_text(*size, "width"), "width");
    extent.height = detail::parse_int_strict(detail::require_text(*size, "height"), "height");
    record.size = extent;
  }

  for (const auto& [key, node] : *root) {
    if (key != "object") continue;
    GtObject object;
    object.cls = require_class(detail::require_text(node, "name"));
    if (const auto difficult = node.get_optional<std::string>("difficult")) {
      object.difficult = detail::parse_int_strict(*difficult, "difficult") != 0;
    }
    const auto bndbox = node.get_child_optional("bndbox");
    if (!bndbox) {
      throw Error(ErrorKind::MalformedAnnotation, "object missing <bndbox>");
    }
    object.box.xmin = detail::parse_int_strict(detail::require_text(*bndbox, "xmin"), "xmin");
    object.box.ymin = detail::parse_int_strict(detail::require_text(*bndbox, "ymin"), "ymin");
    object.box.xmax = detail::parse_int_strict(detail::require_text(*bndbox, "xmax"), "xmax");
    object.box.ymax = detail::parse_int_strict(detail::require_text(*bndbox, "ymax"), "ymax");
    if (!valid(object.box)) {
      throw Error(ErrorKind::InvalidBox,
                  "bndbox (" + std::to_string(object.box.xmin) + "," +
                      std::to_string(object.box.ymin) + "," +
                      std::to_string(object.box.xmax) + "," +
                      std::to_string(object.box.ymax) + ") has xmin>xmax or ymin>ymax");
    }
    record.objects.push_back(object);
  }
  return record;
}

}  // namespace pseudovoc
