#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pseudovoc/error.hpp"

namespace pseudovoc {

inline constexpr int kNumClasses = 20;

// The 20 PASCAL VOC categories, in the conventional devkit order.
enum class ClassLabel : std::uint8_t {
  aeroplane,
  bicycle,
  bird,
  boat,
  bottle,
  bus,
  car,
  cat,
  chair,
  cow,
  diningtable,
  dog,
  horse,
  motorbike,
  person,
  pottedplant,
  sheep,
  sofa,
  train,
  tvmonitor,
};

inline constexpr std::array<std::string_view, kNumClasses> kClassNames = {
    "aeroplane", "bicycle", "bird",        "boat",   "bottle",
    "bus",       "car",     "cat",         "chair",  "cow",
    "diningtable", "dog",   "horse",       "motorbike", "person",
    "pottedplant", "sheep", "sofa",        "train",  "tvmonitor",
};

// Short display names as used in result tables.
inline constexpr std::array<std::string_view, kNumClasses> kClassAliases = {
    "aero",  "bike",  "bird",  "boat",  "bottle", "bus",   "car",
    "cat",   "chair", "cow",   "table", "dog",    "horse", "mbike",
    "person", "plant", "sheep", "sofa",  "train",  "tv",
};

constexpr int class_index(ClassLabel c) { return static_cast<int>(c); }

constexpr ClassLabel class_at(int index) {
  return static_cast<ClassLabel>(index);
}

constexpr std::string_view class_name(ClassLabel c) {
  return kClassNames[static_cast<std::size_t>(c)];
}

constexpr std::string_view class_alias(ClassLabel c) {
  return kClassAliases[static_cast<std::size_t>(c)];
}

inline std::optional<ClassLabel> class_from_name(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kClassNames[static_cast<std::size_t>(i)] == name) return class_at(i);
  }
  return std::nullopt;
}

inline std::optional<ClassLabel> class_from_alias(std::string_view alias) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (kClassAliases[static_cast<std::size_t>(i)] == alias) return class_at(i);
  }
  return std::nullopt;
}

/// Like class_from_name but throws UnknownClass; the vocabulary is closed.
inline ClassLabel require_class(std::string_view name) {
  if (auto c = class_from_name(name)) return *c;
  throw Error(ErrorKind::UnknownClass, "'" + std::string(name) + "'");
}

inline std::array<ClassLabel, kNumClasses> all_classes() {
  std::array<ClassLabel, kNumClasses> out{};
  for (int i = 0; i < kNumClasses; ++i) out[static_cast<std::size_t>(i)] = class_at(i);
  return out;
}

/// Set of class labels backed by a 20-bit mask.
class ClassSet {
 public:
  ClassSet() = default;

  void insert(ClassLabel c) { bits_ |= bit(c); }
  bool contains(ClassLabel c) const { return (bits_ & bit(c)) != 0; }
  bool empty() const { return bits_ == 0; }

  int size() const {
    int n = 0;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) ++n;
    return n;
  }

  bool operator==(const ClassSet&) const = default;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (int i = 0; i < kNumClasses; ++i) {
      if (contains(class_at(i))) fn(class_at(i));
    }
  }

 private:
  static std::uint32_t bit(ClassLabel c) {
    return std::uint32_t{1} << class_index(c);
  }

  std::uint32_t bits_ = 0;
};

}  // namespace pseudovoc
