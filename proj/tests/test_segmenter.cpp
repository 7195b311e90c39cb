#include <doctest.h>

#include <set>

#include "crowdmask/error.hpp"
#include "crowdmask/nnec.hpp"
#include "crowdmask/segmenter.hpp"
#include "crowdmask/synth.hpp"
#include "oracles.hpp"

using namespace crowdmask;

namespace {

Scene two_box_scene() {
  Scene s{40, 30, {{5.5, 5.5}, {30.5, 20.5}}, std::nullopt, "boxes"};
  s.gt_masks = std::vector<RasterMask>{oracle::filled_box(40, 30, 3, 3, 8, 8),
                                       oracle::filled_box(40, 30, 27, 17, 33, 23)};
  return s;
}

}  // namespace

TEST_CASE("circle backend") {
  const Scene s{50, 50, {}, std::nullopt, ""};
  const CircleSegmenter seg;
  Rng rng(1);
  const auto m = seg.segment({25.0, 25.0}, s, rng);
  REQUIRE(m);
  CHECK(*m == rasterize_circle({{25.0, 25.0}, 8.0}, 50, 50));
  CHECK_THROWS_AS(seg.segment({50.0, 1.0}, s, rng), Error);
}

TEST_CASE("identity oracle") {
  const Scene s = two_box_scene();
  const OracleSegmenter seg({0, 0.0, 400.0});
  Rng rng(4);
  const auto m = seg.segment({4.2, 7.9}, s, rng);
  REQUIRE(m);
  CHECK(*m == (*s.gt_masks)[0]);
  // Outside every mask: binds to the nearest gt point.
  const auto n = seg.segment({25.0, 15.0}, s, rng);
  REQUIRE(n);
  CHECK(*n == (*s.gt_masks)[1]);
}

TEST_CASE("oracle bind radius and misses") {
  const Scene s = two_box_scene();
  Rng rng(4);
  CHECK_FALSE(OracleSegmenter({0, 0.0, 3.0}).segment({20.0, 10.0}, s, rng));
  const OracleSegmenter miss({0, 1.0, 400.0});
  for (int i = 0; i < 20; ++i) CHECK_FALSE(miss.segment({5.0, 5.0}, s, rng));

  Scene no_gt = s;
  no_gt.gt_masks.reset();
  CHECK_THROWS_AS(OracleSegmenter().segment({5.0, 5.0}, no_gt, rng), Error);
  CHECK_THROWS_AS(OracleSegmenter({-1, 0.0, 1.0}), Error);
}

TEST_CASE("oracle noise dilates or erodes") {
  const Scene s = two_box_scene();
  const OracleSegmenter seg({2, 0.0, 400.0});
  Rng rng(10);
  std::set<std::size_t> sizes;
  for (int i = 0; i < 60; ++i) {
    const auto m = seg.segment({30.0, 20.0}, s, rng);
    REQUIRE(m);
    sizes.insert(m->population());
  }
  // 7x7 box offset by -2..2 gives 3x3..11x11.
  CHECK(sizes == std::set<std::size_t>{9, 25, 49, 81, 121});
}

TEST_CASE("morph offset") {
  const auto box = oracle::filled_box(20, 20, 5, 5, 9, 9);
  CHECK(morph_offset(box, 1) == oracle::filled_box(20, 20, 4, 4, 10, 10));
  CHECK(morph_offset(box, -2) == oracle::filled_box(20, 20, 7, 7, 7, 7));
  CHECK(morph_offset(box, -3).empty());
  // Pixels outside the image do not erode the border.
  const auto corner = oracle::filled_box(20, 20, 0, 0, 3, 3);
  CHECK(morph_offset(corner, -1) == oracle::filled_box(20, 20, 0, 0, 2, 2));
  CHECK(morph_offset(corner, 2) == oracle::filled_box(20, 20, 0, 0, 5, 5));

  // Dilation against a direct Chebyshev-distance evaluation.
  oracle::Lcg g{6};
  for (int t = 0; t < 30; ++t) {
    const auto m = oracle::random_mask(g, 15, 11, 0.08);
    const int k = 1 + g.below(3);
    const auto d = morph_offset(m, k);
    for (int r = 0; r < 11; ++r) {
      for (int c = 0; c < 15; ++c) {
        bool any = false;
        for (int y = std::max(0, r - k); y <= std::min(10, r + k); ++y)
          for (int x = std::max(0, c - k); x <= std::min(14, c + k); ++x) any = any || m.get(x, y);
        REQUIRE(d.get(c, r) == any);
      }
    }
  }
}

TEST_CASE("file backend") {
  const Scene s = two_box_scene();
  FileConfig cfg;
  for (const auto& m : *s.gt_masks) cfg.records.push_back(rle_encode(m));
  const FileSegmenter seg(cfg);
  Rng rng(0);
  auto m = seg.segment({31.0, 18.0}, s, rng);
  REQUIRE(m);
  CHECK(*m == (*s.gt_masks)[1]);
  m = seg.segment({10.5, 10.5}, s, rng);
  REQUIRE(m);
  CHECK(*m == (*s.gt_masks)[0]);

  FileConfig tight = cfg;
  tight.bind_radius = 1.0;
  CHECK_FALSE(FileSegmenter(tight).segment({20.0, 12.0}, s, rng));

  Scene other = s;
  other.width = 41;
  CHECK_THROWS_AS(seg.segment({1.0, 1.0}, other, rng), Error);
}

TEST_CASE("segmenter factory") {
  CHECK(make_segmenter({})->kind() == SegmenterKind::Oracle);
  SegmenterConfig c;
  c.kind = parse_segmenter_kind("circle");
  CHECK(make_segmenter(c)->kind() == SegmenterKind::Circle);
  CHECK_THROWS_AS(parse_segmenter_kind("sam"), Error);
}
