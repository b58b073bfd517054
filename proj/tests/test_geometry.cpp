#include <catch2/catch_amalgamated.hpp>

#include "pseudovoc/geometry.hpp"
#include "pseudovoc/rng.hpp"
#include "support/oracles.hpp"
#include "support/gen.hpp"

using namespace pseudovoc;

TEST_CASE("area uses the inclusive convention") {
  REQUIRE(area(BoundingBox{0, 0, 0, 0}) == 1);
  REQUIRE(area(BoundingBox{0, 0, 9, 9}) == 100);
  REQUIRE(area(BoundingBox{48, 240, 195, 371}) == 148 * 132);
}

TEST_CASE("iou of a box with itself is exactly 1") {
  SplitMix64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto box = testsupport::random_box(rng);
    REQUIRE(iou(box, box) == 1.0);
  }
}

TEST_CASE("disjoint boxes have iou 0") {
  const BoundingBox a{0, 0, 9, 9};
  REQUIRE(iou(a, BoundingBox{10, 0, 19, 9}) == 0.0);
  REQUIRE(iou(a, BoundingBox{0, 10, 9, 19}) == 0.0);
  REQUIRE(iou(a, BoundingBox{100, 100, 110, 110}) == 0.0);
}

TEST_CASE("iou matches the worked overlap example") {
  const BoundingBox a{0, 0, 9, 9};
  const BoundingBox b{5, 5, 14, 14};
  // 5x5 intersection, union 100 + 100 - 25
  REQUIRE(iou(a, b) == 25.0 / 175.0);
  REQUIRE_THAT(iou(a, b), Catch::Matchers::WithinAbs(0.142857, 1e-6));
}

TEST_CASE("iou equals the pixel-counting oracle exactly") {
  SplitMix64 rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto a = testsupport::random_box(rng);
    const auto b = testsupport::random_box(rng);
    REQUIRE(iou(a, b) == oracles::iou_pixel_count(a, b));
  }
}

TEST_CASE("box validity") {
  REQUIRE(valid(BoundingBox{1, 1, 1, 1}));
  REQUIRE_FALSE(valid(BoundingBox{2, 1, 1, 1}));
  REQUIRE_FALSE(valid(BoundingBox{1, 2, 1, 1}));
}
