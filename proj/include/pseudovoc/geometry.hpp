#pragma once

#include <algorithm>
#include <cstdint>

namespace pseudovoc {

/// Axis-aligned box in VOC devkit convention: integer pixel coordinates,
/// inclusive on both ends, so a single pixel is (x, y, x, y) with area 1.
struct BoundingBox {
  int xmin = 0;
  int ymin = 0;
  int xmax = 0;
  int ymax = 0;

  bool operator==(const BoundingBox&) const = default;
};

inline bool valid(const BoundingBox& b) {
  return b.xmin <= b.xmax && b.ymin <= b.ymax;
}

inline std::int64_t area(const BoundingBox& b) {
  return (static_cast<std::int64_t>(b.xmax) - b.xmin + 1) *
         (static_cast<std::int64_t>(b.ymax) - b.ymin + 1);
}

/// Intersection-over-union under the inclusive convention (+1 width/height).
inline double iou(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t iw =
      std::min<std::int64_t>(a.xmax, b.xmax) - std::max<std::int64_t>(a.xmin, b.xmin) + 1;
  const std::int64_t ih =
      std::min<std::int64_t>(a.ymax, b.ymax) - std::max<std::int64_t>(a.ymin, b.ymin) + 1;
  if (iw <= 0 || ih <= 0) return 0.0;
  const std::int64_t inter = iw * ih;
  const std::int64_t uni = area(a) + area(b) - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

struct Extent {
  int width = 0;
  int height = 0;

  bool operator==(const Extent&) const = default;
};

// Modal VOC image size; used when an annotation carries no size element.
inline constexpr Extent kDefaultExtent{500, 375};

}  // namespace pseudovoc
