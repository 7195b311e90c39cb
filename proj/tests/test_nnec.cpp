#include <doctest.h>

#include <cmath>

#include "crowdmask/nnec.hpp"
#include "crowdmask/synth.hpp"
#include "oracles.hpp"

using namespace crowdmask;

namespace {

std::vector<Point2D> random_points(oracle::Lcg& g, std::size_t n, double w, double h) {
  std::vector<Point2D> pts(n);
  for (auto& p : pts) p = {g.uniform() * w, g.uniform() * h};
  return pts;
}

int count_set(const RasterMask& m) { return static_cast<int>(m.population()); }

}  // namespace

TEST_CASE("radius examples") {
  const std::vector<Point2D> two{{0, 0}, {10, 0}};
  CHECK(nnec_radius(two, 0, {}).radius == 9.0);
  CHECK(nnec_radius(two, 0, {}).center.x == 0.0);
  const std::vector<Point2D> one{{4, 4}};
  CHECK(nnec_radius(one, 0, {}).radius == 200.0);
  const std::vector<Point2D> close{{0, 0}, {3, 0}};
  CHECK(nnec_radius(close, 1, {}).radius == 5.0);

  const std::vector<Point2D> line{{0, 0}, {10, 0}, {25, 0}};
  const auto c = all_radii(line, {});
  REQUIRE(c.size() == 3);
  CHECK(c[0].radius == 9.0);
  CHECK(c[1].radius == 9.0);
  CHECK(c[2].radius == 14.0);
}

TEST_CASE("bounded radius halves the distance") {
  NnecParams p;
  p.bounded = true;
  const std::vector<Point2D> two{{0, 0}, {30, 0}};
  CHECK(nnec_radius(two, 0, p).radius == 14.0);
  CHECK(nnec_radius_from_distance(1000.0, p) == 200.0);
}

TEST_CASE("grid radii equal the brute force on 10k points") {
  oracle::Lcg g{17};
  const auto pts = random_points(g, 10000, 3000.0, 2000.0);
  const auto grid = all_radii(pts, {});
  REQUIRE(grid.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); i += 97) {
    const double d = oracle::nearest_distance(pts, i);
    REQUIRE(grid[i].radius == std::clamp(d - 1.0, 5.0, 200.0));
  }
  const auto brute = all_radii_reference(pts, {});
  for (std::size_t i = 0; i < pts.size(); ++i) REQUIRE(grid[i].radius == brute[i].radius);
}

TEST_CASE("grid equals brute force on awkward layouts") {
  oracle::Lcg g{3};
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 1 + static_cast<std::size_t>(g.below(300));
    std::vector<Point2D> pts;
    // Clustered points plus duplicates and far outliers.
    for (std::size_t i = 0; i < n; ++i) {
      const int kind = g.below(10);
      if (kind == 0 && !pts.empty()) {
        pts.push_back(pts[static_cast<std::size_t>(g.below(static_cast<int>(pts.size())))]);
      } else if (kind == 1) {
        pts.push_back({g.uniform() * 5000.0, g.uniform() * 5000.0});
      } else {
        pts.push_back({100.0 + g.uniform() * 20.0, 100.0 + g.uniform() * 20.0});
      }
    }
    NnecParams p;
    p.bounded = g.below(2) == 1;
    const auto a = all_radii(pts, p);
    const auto b = all_radii_reference(pts, p);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(a[i].radius == b[i].radius);
  }
}

TEST_CASE("nearest neighbor squared distance") {
  const std::vector<Point2D> one{{1, 1}};
  CHECK(std::isinf(nearest_neighbor_sq(one)[0]));
  const std::vector<Point2D> pts{{0, 0}, {3, 4}, {100, 100}};
  const auto d = nearest_neighbor_sq(pts);
  CHECK(d[0] == 25.0);
  CHECK(d[1] == 25.0);
}

TEST_CASE("exclusivity when points are at least r_min + delta apart") {
  for (int t = 0; t < 50; ++t) {
    const auto scene =
        generate_scene(SynthConfig::preset(DensityRegime::Sparse, 25, static_cast<std::uint64_t>(t)));
    const auto circles = all_radii(scene.points, {});
    for (std::size_t i = 0; i < circles.size(); ++i) {
      int inside = 0;
      for (const auto& p : scene.points) {
        inside += squared_distance(p, circles[i].center) <= circles[i].radius * circles[i].radius;
      }
      REQUIRE(inside == 1);
    }
  }
}

TEST_CASE("radius grows with the neighbor distance") {
  NnecParams p;
  double prev = 0.0;
  for (double d = 0.0; d < 400.0; d += 0.37) {
    const double r = nnec_radius_from_distance(d, p);
    CHECK(r >= prev);
    CHECK(r >= p.r_min);
    CHECK(r <= p.r_max);
    prev = r;
  }
}

TEST_CASE("rasterize circle") {
  const auto a = rasterize_circle({{0.5, 0.5}, 0.6}, 3, 3);
  CHECK(count_set(a) == 1);
  CHECK(a.get(0, 0));

  const auto b = rasterize_circle({{1.5, 1.5}, 1.0}, 3, 3);
  CHECK(count_set(b) == 5);
  for (auto [c, r] : {std::pair{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}}) CHECK(b.get(c, r));

  CHECK(rasterize_circle({{500.0, 500.0}, 200.0}, 1, 1).empty());

  // Predicate check against a direct evaluation.
  oracle::Lcg g{1};
  for (int t = 0; t < 100; ++t) {
    const ExclusionCircle c{{g.uniform() * 40 - 5, g.uniform() * 30 - 5}, g.uniform() * 12};
    const auto m = rasterize_circle(c, 31, 23);
    for (int r = 0; r < 23; ++r) {
      for (int col = 0; col < 31; ++col) {
        const double dx = col + 0.5 - c.center.x, dy = r + 0.5 - c.center.y;
        REQUIRE(m.get(col, r) == (dx * dx + dy * dy <= c.radius * c.radius));
      }
    }
  }
}

TEST_CASE("constrain") {
  const ExclusionCircle circle{{10.5, 10.5}, 5.0};
  const auto disc = rasterize_circle(circle, 30, 30);
  const auto inner = oracle::filled_box(30, 30, 9, 9, 11, 11);
  auto r = constrain(&inner, circle, 30, 30);
  CHECK_FALSE(r.fallback);
  CHECK(r.mask == inner);

  r = constrain(nullptr, circle, 30, 30);
  CHECK(r.fallback);
  CHECK(r.mask == disc);

  const auto far = oracle::filled_box(30, 30, 25, 25, 29, 29);
  r = constrain(&far, circle, 30, 30);
  CHECK(r.fallback);
  CHECK(r.mask == disc);

  const auto big = oracle::filled_box(30, 30, 0, 0, 29, 29);
  r = constrain(&big, circle, 30, 30);
  CHECK_FALSE(r.fallback);
  CHECK(r.mask == disc);
}

TEST_CASE("resolve overlaps") {
  const auto a = oracle::filled_box(20, 20, 0, 0, 4, 4);
  const auto b = oracle::filled_box(20, 20, 10, 10, 14, 14);
  const std::vector<RasterMask> disjoint{a, b};
  const std::vector<Point2D> centers{{2, 2}, {12, 12}};
  CHECK(resolve_overlaps(disjoint, centers) == disjoint);

  const std::vector<RasterMask> same{a, a};
  const std::vector<Point2D> far{{0, 0}, {100, 100}};
  const auto out = resolve_overlaps(same, far);
  CHECK(out[0] == a);
  CHECK(out[1].empty());
}

TEST_CASE("resolve overlaps gives disjoint subsets and is idempotent") {
  oracle::Lcg g{12};
  for (int t = 0; t < 100; ++t) {
    std::vector<RasterMask> masks;
    std::vector<Point2D> centers;
    const int n = 1 + g.below(6);
    for (int i = 0; i < n; ++i) {
      masks.push_back(oracle::random_mask(g, 12, 9, 0.4));
      centers.push_back({g.uniform() * 12, g.uniform() * 9});
    }
    const auto once = resolve_overlaps(masks, centers);
    REQUIRE(oracle::pairwise_disjoint(once));
    std::size_t uni_in = 0, uni_out = 0;
    for (std::size_t p = 0; p < masks[0].size(); ++p) {
      bool any = false, any_out = false;
      for (int i = 0; i < n; ++i) {
        any = any || masks[i].get(p);
        any_out = any_out || once[i].get(p);
        if (once[i].get(p)) REQUIRE(masks[i].get(p));
      }
      uni_in += any;
      uni_out += any_out;
    }
    CHECK(uni_in == uni_out);
    CHECK(resolve_overlaps(once, centers) == once);
  }
}
