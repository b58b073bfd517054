#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "pseudovoc/classes.hpp"
#include "pseudovoc/dataset.hpp"
#include "pseudovoc/detection.hpp"
#include "pseudovoc/error.hpp"
#include "pseudovoc/geometry.hpp"
#include "pseudovoc/rng.hpp"

namespace pseudovoc {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Four-knob corruption model turning ground truth into a synthetic weak
/// detector dump: Gaussian corner jitter, object misses, class flips, and
/// Poisson spurious boxes.
struct NoiseParams {
  double jitter_sigma = 0.0;
  double miss_prob = 0.0;
  double flip_prob = 0.0;
  double spurious_rate = 0.0;
  Interval score_tp{1.0, 1.0};
  Interval score_noise{0.1, 0.9};

  void validate() const {
    const auto probability = [](double p) { return p >= 0.0 && p <= 1.0; };
    const auto interval = [&](const Interval& iv) {
      return probability(iv.lo) && probability(iv.hi) && iv.lo <= iv.hi;
    };
    if (jitter_sigma < 0.0) throw Error(ErrorKind::InvalidParams, "jitter sigma must be >= 0");
    if (!probability(miss_prob)) throw Error(ErrorKind::InvalidParams, "miss prob must be in [0, 1]");
    if (!probability(flip_prob)) throw Error(ErrorKind::InvalidParams, "flip prob must be in [0, 1]");
    if (spurious_rate < 0.0) throw Error(ErrorKind::InvalidParams, "spurious rate must be >= 0");
    if (!interval(score_tp)) throw Error(ErrorKind::InvalidParams, "score-tp interval must satisfy 0 <= lo <= hi <= 1");
    if (!interval(score_noise)) throw Error(ErrorKind::InvalidParams, "score-noise interval must satisfy 0 <= lo <= hi <= 1");
  }
};

namespace detail {

// Round half away from zero, the convention for all real->pixel rounding.
inline int round_half_away(double value) {
  return static_cast<int>(std::llround(value));
}

inline int clamp_coord(int value, int lo, int hi) {
  return value < lo ? lo : (value > hi ? hi : value);
}

inline double sample_interval(const Interval& iv, SplitMix64& rng) {
  return iv.lo + rng.next_double() * (iv.hi - iv.lo);
}

}  // namespace detail

/// Offset each corner coordinate by an independent Gaussian draw (rounded
/// half away from zero), re-order inverted coordinates, then clamp to
/// `bounds` when given. Always consumes two Gaussian pairs, in the order
/// (dxmin, dymin), (dxmax, dymax), so the stream layout does not depend on
/// sigma.
inline BoundingBox perturb_box(const BoundingBox& box, double sigma,
                               const std::optional<Extent>& bounds,
                               SplitMix64& rng) {
  if (sigma < 0.0) throw Error(ErrorKind::InvalidParams, "sigma must be >= 0");
  const auto [z0, z1] = rng.gaussian_pair();
  const auto [z2, z3] = rng.gaussian_pair();
  BoundingBox out;
  out.xmin = box.xmin + detail::round_half_away(sigma * z0);
  out.ymin = box.ymin + detail::round_half_away(sigma * z1);
  out.xmax = box.xmax + detail::round_half_away(sigma * z2);
  out.ymax = box.ymax + detail::round_half_away(sigma * z3);
  if (out.xmin > out.xmax) std::swap(out.xmin, out.xmax);
  if (out.ymin > out.ymax) std::swap(out.ymin, out.ymax);
  if (bounds) {
    out.xmin = detail::clamp_coord(out.xmin, 1, bounds->width);
    out.xmax = detail::clamp_coord(out.xmax, 1, bounds->width);
    out.ymin = detail::clamp_coord(out.ymin, 1, bounds->height);
    out.ymax = detail::clamp_coord(out.ymax, 1, bounds->height);
  }
  return out;
}

/// Corrupt ground truth into a synthetic detection dump, deterministically in
/// (gt, params, seed). Each image gets its own child stream (split by split
/// position), drawn in a fixed order:
///   per object: miss draw; 2 Gaussian pairs (jitter); flip draw;
///               class pick when flipped; score draw
///   then: Poisson spurious count; per spurious box: class, x pair, y pair
///         (each coordinate pair is sampled independently and ordered), score
inline DetectionSet corrupt_dataset(const Dataset& gt, const NoiseParams& params,
                                    std::uint64_t seed) {
  params.validate();
  DetectionSet dets;
  dets.provenance = "simulated(seed=" + std::to_string(seed) + ")";
  const SplitMix64 master(seed);

  for (std::size_t i = 0; i < gt.images.size(); ++i) {
    const auto& record = gt.images[i];
    SplitMix64 rng = master.split(i);

    for (const auto& object : record.objects) {
      if (rng.next_double() < params.miss_prob) continue;
      Detection det;
      det.image_id = record.image_id;
      det.box = perturb_box(object.box, params.jitter_sigma, record.size, rng);
      const bool flipped = rng.next_double() < params.flip_prob;
      if (flipped) {
        // uniform among the other 19 classes
        const auto k = static_cast<int>(rng.next_below(kNumClasses - 1));
        det.cls = class_at(k < class_index(object.cls) ? k : k + 1);
      } else {
        det.cls = object.cls;
      }
      det.score = detail::sample_interval(flipped ? params.score_noise : params.score_tp, rng);
      dets.items.push_back(std::move(det));
    }

    const Extent extent = record.size.value_or(kDefaultExtent);
    const int spurious = rng.next_poisson(params.spurious_rate);
    for (int s = 0; s < spurious; ++s) {
      Detection det;
      det.image_id = record.image_id;
      det.cls = class_at(static_cast<int>(rng.next_below(kNumClasses)));
      int x1 = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(extent.width)));
      int x2 = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(extent.width)));
      if (x1 > x2) std::swap(x1, x2);
      int y1 = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(extent.height)));
      int y2 = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(extent.height)));
      if (y1 > y2) std::swap(y1, y2);
      det.box = BoundingBox{x1, y1, x2, y2};
      det.score = detail::sample_interval(params.score_noise, rng);
      dets.items.push_back(std::move(det));
    }
  }
  return dets;
}

}  // namespace pseudovoc
