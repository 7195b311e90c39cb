#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "crowdmask/error.hpp"
#include "crowdmask/io.hpp"
#include "crowdmask/rle.hpp"
#include "crowdmask/rng.hpp"
#include "oracles.hpp"

using namespace crowdmask;

namespace {

RasterMask bits2x2(std::vector<std::uint8_t> b) { return RasterMask(2, 2, std::move(b)); }

}  // namespace

TEST_CASE("rle encode examples") {
  CHECK(rle_encode(bits2x2({0, 0, 0, 0})).counts == std::vector<std::uint32_t>{4});
  CHECK(rle_encode(bits2x2({1, 1, 1, 1})).counts == std::vector<std::uint32_t>{0, 4});
  CHECK(rle_encode(bits2x2({0, 1, 1, 0})).counts == std::vector<std::uint32_t>{1, 2, 1});
  const auto rec = rle_encode(bits2x2({0, 1, 1, 0}));
  CHECK(rec.height == 2);
  CHECK(rec.width == 2);
}

TEST_CASE("rle decode examples") {
  CHECK(rle_decode({2, 2, {4}}) == bits2x2({0, 0, 0, 0}));
  CHECK(rle_decode({2, 2, {0, 4}}) == bits2x2({1, 1, 1, 1}));
  CHECK(rle_decode({2, 2, {1, 2, 1}}) == bits2x2({0, 1, 1, 0}));
  CHECK_THROWS_AS(rle_decode({2, 2, {1, 2}}), Error);
  try {
    rle_decode({2, 2, {3, 2}});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SizeMismatch);
  }
}

TEST_CASE("rle round trip on random masks") {
  oracle::Lcg g{42};
  for (int t = 0; t < 300; ++t) {
    const int w = 1 + g.below(17), h = 1 + g.below(13);
    const RasterMask m = oracle::random_mask(g, w, h, g.uniform());
    const RleRecord rec = rle_encode(m);
    std::uint64_t sum = 0;
    for (auto c : rec.counts) sum += c;
    CHECK(sum == static_cast<std::uint64_t>(w) * h);
    // Only the leading run may be empty.
    for (std::size_t i = 1; i < rec.counts.size(); ++i) CHECK(rec.counts[i] > 0);
    CHECK(rle_decode(rec) == m);
  }
}

TEST_CASE("raster mask basics") {
  RasterMask m(4, 3);
  CHECK(m.empty());
  m.set(1, 2, true);
  m.set(3, 0, true);
  CHECK(m.population() == 2);
  CHECK(m.contains({1.9, 2.99}));
  CHECK_FALSE(m.contains({2.0, 2.5}));
  const PixelBox b = m.bounds();
  CHECK(b.col0 == 1);
  CHECK(b.col1 == 3);
  CHECK(b.row0 == 0);
  CHECK(b.row1 == 2);
  m.set(1, 2, false);
  CHECK(m.population() == 1);
}

TEST_CASE("bounds stay tight under random edits") {
  oracle::Lcg g{19};
  for (int t = 0; t < 50; ++t) {
    RasterMask m = g.below(2) ? RasterMask(13, 9) : oracle::random_mask(g, 13, 9, 0.1);
    for (int step = 0; step < 200; ++step) {
      m.set(g.below(13), g.below(9), g.uniform() < 0.45);
      PixelBox ref{13, 9, -1, -1};
      for (int r = 0; r < 9; ++r)
        for (int c = 0; c < 13; ++c)
          if (m.get(c, r)) {
            ref = {std::min(ref.col0, c), std::min(ref.row0, r), std::max(ref.col1, c),
                   std::max(ref.row1, r)};
          }
      if (m.empty()) ref = {};
      REQUIRE(m.bounds() == ref);
    }
  }
}

TEST_CASE("scene validation") {
  Scene s{10, 10, {{1, 1}, {5, 5}}, std::nullopt, "x"};
  CHECK_NOTHROW(validate(s));
  s.points.push_back({10.0, 3.0});
  CHECK_THROWS_AS(validate(s), Error);
  s.points.pop_back();
  RasterMask a(10, 10), b(10, 10);
  a.set(1, 1, true);
  b.set(1, 1, true);
  s.gt_masks = std::vector<RasterMask>{a, b};
  CHECK_THROWS_AS(validate(s), Error);  // overlapping
  s.gt_masks = std::vector<RasterMask>{a};
  CHECK_THROWS_AS(validate(s), Error);  // length
}

TEST_CASE("splitmix64 matches the reference") {
  for (std::uint64_t seed : {0ULL, 1ULL, 0xdeadbeefULL, ~0ULL}) {
    Rng rng(seed);
    oracle::SplitMix64 ref{seed};
    for (int i = 0; i < 1000; ++i) REQUIRE(rng.next_u64() == ref.next());
  }
  // Published first output for seed 0.
  CHECK(Rng(0).next_u64() == 0xe220a8397b1dcdafULL);
}

TEST_CASE("uniform stays in [0,1)") {
  Rng rng(3);
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.next_uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("gaussian") {
  Rng a(9);
  CHECK(a.next_gaussian(7.0, 0.0) == 7.0);
  Rng rng(1);
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.next_gaussian(0.0, 1.0);
    s += x;
    s2 += x * x;
  }
  const double mean = s / n;
  const double sd = std::sqrt(s2 / n - mean * mean);
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(sd - 1.0) < 0.02);

  Rng b(5), c(5);
  for (int i = 0; i < 1000; ++i) REQUIRE(b.next_gaussian(1.0, 2.0) == c.next_gaussian(1.0, 2.0));
}

TEST_CASE("sigma zero consumes the same stream positions") {
  Rng a(11), b(11);
  for (int i = 0; i < 5; ++i) {
    a.next_gaussian(0.0, 0.0);
    b.next_gaussian(0.0, 3.0);
  }
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("next_int covers its range") {
  Rng rng(2);
  std::vector<int> hits(5, 0);
  for (int i = 0; i < 5000; ++i) {
    const int v = rng.next_int(-2, 2);
    REQUIRE(v >= -2);
    REQUIRE(v <= 2);
    ++hits[v + 2];
  }
  for (int h : hits) CHECK(h > 800);
}

TEST_CASE("derived streams") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(derive_seed(7, "x") == (7ULL ^ fnv1a64("x")));
  CHECK(derive_seed(7, "a") != derive_seed(7, "b"));
}

TEST_CASE("points and masks json round trip") {
  io::PointsFile f{20, 10, {{0.25, 1.5}, {19.999, 9.0}}};
  const auto back = io::parse_points(io::format_points(f));
  CHECK(back.width == 20);
  CHECK(back.height == 10);
  REQUIRE(back.points.size() == 2);
  CHECK(back.points[1].x == 19.999);

  oracle::Lcg g{5};
  std::vector<RasterMask> masks;
  for (int i = 0; i < 4; ++i) masks.push_back(oracle::random_mask(g, 7, 5, 0.3));
  const auto recs = io::parse_rle_records(io::format_masks(masks));
  REQUIRE(recs.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(rle_decode(recs[i]) == masks[i]);

  CHECK_THROWS_AS(io::parse_points("{\"width\":3}"), Error);
  CHECK_THROWS_AS(io::parse_rle_records("not json"), Error);
}

TEST_CASE("density files round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "crowdmask_core_density";
  std::filesystem::create_directories(dir);
  DensityMap d(3, 2);
  d.values = {0.f, 0.5f, 1.f, 1.5f, 2.f, 0.25f};
  io::write_density(dir / "d.json", d);
  for (const char* p : {"d.json", "d.bin"}) {
    const DensityMap back = io::read_density(dir / p);
    CHECK(back.width == 3);
    CHECK(back.height == 2);
    CHECK(back.values == d.values);
  }
  std::filesystem::remove_all(dir);
}
