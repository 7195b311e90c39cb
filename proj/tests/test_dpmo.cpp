#include <doctest.h>

#include "crowdmask/dpmo.hpp"
#include "crowdmask/error.hpp"
#include "crowdmask/eval.hpp"
#include "crowdmask/synth.hpp"
#include "oracles.hpp"

using namespace crowdmask;

namespace {

void check_one_to_one(const DpmoResult& r, std::size_t n) {
  REQUIRE(r.masks.size() == n);
  REQUIRE(r.fallback.size() == n);
  REQUIRE(r.circles.size() == n);
  for (const auto& m : r.masks) REQUIRE_FALSE(m.empty());
  REQUIRE(oracle::pairwise_disjoint(r.masks));
}

}  // namespace

TEST_CASE("circle backend with two far prompts gives two radius-8 discs") {
  const Scene s{300, 200, {}, std::nullopt, ""};
  const std::vector<Point2D> prompts{{100.0, 100.0}, {200.0, 100.0}};
  const auto r = run_dpmo(prompts, s, CircleSegmenter(), {}, 1);
  check_one_to_one(r, 2);
  CHECK(r.circles[0].radius == 99.0);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK_FALSE(r.fallback[i]);
    CHECK(r.masks[i] == rasterize_circle({prompts[i], 8.0}, 300, 200));
  }
}

TEST_CASE("forced misses fall back to the exclusion circles") {
  const Scene s = generate_scene(SynthConfig::preset(DensityRegime::Sparse, 12, 5));
  const OracleSegmenter seg({0, 1.0, 400.0});
  NnecParams bounded;
  bounded.bounded = true;
  const auto r = run_dpmo(s.points, s, seg, bounded, 2);
  check_one_to_one(r, s.points.size());
  for (std::size_t i = 0; i < r.masks.size(); ++i) {
    CHECK(r.fallback[i]);
    // Bounded circles never overlap, so resolution leaves them intact.
    CHECK(r.masks[i] == rasterize_circle(r.circles[i], s.width, s.height));
  }
}

TEST_CASE("identity oracle on exact prompts reproduces the heads") {
  const Scene s = generate_scene(SynthConfig::preset(DensityRegime::Sparse, 30, 9));
  const OracleSegmenter seg({0, 0.0, 400.0});
  const auto r = run_dpmo(s.points, s, seg, {}, 3);
  check_one_to_one(r, s.points.size());
  for (std::size_t i = 0; i < r.masks.size(); ++i) {
    CHECK_FALSE(r.fallback[i]);
    CHECK(r.masks[i] == (*s.gt_masks)[i]);
  }
}

TEST_CASE("one-to-one and disjoint across backends and regimes") {
  for (auto regime : {DensityRegime::Sparse, DensityRegime::Dense, DensityRegime::Mixed}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const Scene s = generate_scene(SynthConfig::preset(regime, 40, seed));
      Rng rng(seed);
      const auto prompts = perturb_points(s.points, 2.0, rng, s.width, s.height);
      FileConfig fc;
      for (const auto& m : *s.gt_masks) fc.records.push_back(rle_encode(m));
      const CircleSegmenter circle;
      const OracleSegmenter noisy({3, 0.2, 400.0});
      const FileSegmenter file(fc);
      for (const Segmenter* seg : {static_cast<const Segmenter*>(&circle),
                                   static_cast<const Segmenter*>(&noisy),
                                   static_cast<const Segmenter*>(&file)}) {
        check_one_to_one(run_dpmo(prompts, s, *seg, {}, seed), prompts.size());
      }
    }
  }
}

TEST_CASE("coincident prompts still get non-empty masks") {
  const Scene s{20, 20, {}, std::nullopt, ""};
  const std::vector<Point2D> prompts{{5.0, 5.0}, {5.0, 5.0}, {5.0, 5.0}};
  const auto r = run_dpmo(prompts, s, CircleSegmenter(), {}, 0);
  check_one_to_one(r, 3);
}

TEST_CASE("serial and parallel runs agree") {
  const Scene s = generate_scene(SynthConfig::preset(DensityRegime::Dense, 200, 4));
  Rng rng(1);
  const auto prompts = perturb_points(s.points, 1.0, rng, s.width, s.height);
  const OracleSegmenter seg;
  const auto a = run_dpmo(prompts, s, seg, {}, 77, {1});
  const auto b = run_dpmo(prompts, s, seg, {}, 77, {4});
  const auto c = run_dpmo(prompts, s, seg, {}, 77, {0});
  CHECK(a.masks == b.masks);
  CHECK(a.masks == c.masks);
  CHECK(a.fallback == b.fallback);
}

TEST_CASE("errors") {
  const Scene s{10, 10, {}, std::nullopt, ""};
  const std::vector<Point2D> none;
  CHECK_THROWS_AS(run_dpmo(none, s, CircleSegmenter(), {}, 0), Error);
  const std::vector<Point2D> out{{12.0, 1.0}};
  CHECK_THROWS_AS(run_dpmo(out, s, CircleSegmenter(), {}, 0), Error);
  NnecParams bad;
  bad.r_min = 10.0;
  bad.r_max = 5.0;
  const std::vector<Point2D> ok{{1.0, 1.0}};
  CHECK_THROWS_AS(run_dpmo(ok, s, CircleSegmenter(), bad, 0), Error);
}

TEST_CASE("prompt stream depends on the index and the coordinates") {
  CHECK(prompt_stream_id(0, {1.0, 2.0}) != prompt_stream_id(1, {1.0, 2.0}));
  CHECK(prompt_stream_id(0, {1.0, 2.0}) != prompt_stream_id(0, {1.0, 2.000001}));
  CHECK(prompt_stream_id(3, {1.0, 2.0}) == prompt_stream_id(3, {1.0, 2.0}));
}
