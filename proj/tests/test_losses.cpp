#include <doctest.h>

#include <cmath>

#include "crowdmask/counting_losses.hpp"
#include "crowdmask/error.hpp"
#include "crowdmask/synth.hpp"
#include "oracles.hpp"

using namespace crowdmask;

namespace {

void check_consistent(const MatchingProblem& p, const Matching& r) {
  std::vector<int> pu(p.preds.size(), 0), gu(p.gts.size(), 0);
  double cost = 0.0;
  for (const auto& [i, j] : r.pairs) {
    REQUIRE(++pu[i] == 1);
    REQUIRE(++gu[j] == 1);
    cost += distance(p.preds[i], p.gts[j]);
  }
  CHECK(cost == doctest::Approx(r.total_cost).epsilon(1e-12));
  CHECK(r.pairs.size() + r.unmatched_pred.size() == p.preds.size());
  CHECK(r.pairs.size() + r.unmatched_gt.size() == p.gts.size());
}

}  // namespace

TEST_CASE("density loss fixtures") {
  RasterMask mask(5, 1);
  for (int c = 0; c < 4; ++c) mask.set(c, 0, true);
  const std::vector<RasterMask> masks{mask};
  DensityMap d(5, 1);
  d.values = {0.5f, 0.5f, 0.5f, 0.5f, 0.5f};
  CHECK(density_mask_loss(d, masks) == 1.25);
  const auto g = density_mask_loss_grad(d, masks);
  CHECK(g == std::vector<double>{2.0, 2.0, 2.0, 2.0, 1.0});

  DensityMap zero(5, 1);
  CHECK(density_mask_loss(zero, masks) == 1.0);
  const std::vector<RasterMask> none;
  d.values = {0.f, 0.f, 0.f, 0.f, 3.f};
  CHECK(density_mask_loss(d, none) == 9.0);
}

TEST_CASE("perfect map has zero loss and zero gradient") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Scene s = generate_scene(SynthConfig::preset(DensityRegime::Mixed, 25, seed));
    const DensityMap d = make_density_map(s, DensityMode::Perfect);
    CHECK(density_mask_loss(d, *s.gt_masks) < 1e-9);
    for (double v : density_mask_loss_grad(d, *s.gt_masks)) REQUIRE(std::abs(v) < 1e-5);
  }
}

TEST_CASE("density gradient matches central differences") {
  oracle::Lcg g{31};
  for (int t = 0; t < 50; ++t) {
    const int w = 4 + g.below(6), h = 3 + g.below(5);
    std::vector<RasterMask> masks;
    RasterMask taken(w, h);
    for (int k = 0; k < 1 + g.below(4); ++k) {
      RasterMask m(w, h);
      for (std::size_t i = 0; i < m.size(); ++i) {
        if (!taken.get(i) && g.uniform() < 0.25) {
          m.set(i, true);
          taken.set(i, true);
        }
      }
      masks.push_back(std::move(m));
    }
    std::vector<double> x(static_cast<std::size_t>(w) * h);
    for (auto& v : x) v = g.uniform() * 0.3;
    const auto an = density_mask_loss_grad(x, w, h, masks);
    auto f = [&](const std::vector<double>& v) { return density_mask_loss(v, w, h, masks); };
    double worst = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      worst = std::max(worst, std::abs(oracle::central_difference(f, x, k, 1e-4) - an[k]));
    }
    REQUIRE(worst < 1e-5);
  }
}

TEST_CASE("density size checks") {
  DensityMap d(3, 3);
  const std::vector<RasterMask> masks{RasterMask(4, 3)};
  CHECK_THROWS_AS(density_mask_loss(d, masks), Error);
}

TEST_CASE("three-case fixtures") {
  const int w = 100, h = 40;
  SUBCASE("case 1: one pred inside") {
    MatchingProblem p{{{11.0, 11.0}}, {{10.5, 10.5}}, {oracle::square_at(w, h, {10.5, 10.5}, 4)}};
    const auto r = match_three_case(p);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0] == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(match_exact(p).pairs == r.pairs);
  }
  SUBCASE("case 2: nearest of several inside, the rest background") {
    const Point2D v{20.5, 20.5};
    MatchingProblem p{{{25.5, 20.5}, {20.5, 23.5}}, {v}, {oracle::square_at(w, h, v, 6)}};
    const auto r = match_three_case(p);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].first == 1);
    CHECK(r.total_cost == 3.0);
    CHECK(r.unmatched_pred == std::vector<std::size_t>{0});
    CHECK(match_exact(p).pairs == r.pairs);
  }
  SUBCASE("case 3: empty mask takes the nearest background pred") {
    const Point2D v{50.5, 20.5};
    MatchingProblem p{{{59.5, 20.5}, {50.5, 27.5}}, {v}, {oracle::square_at(w, h, v, 2)}};
    const auto r = match_three_case(p);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].first == 1);
    CHECK(r.total_cost == 7.0);
  }
  SUBCASE("case-3 preds are consumed in ascending gt order") {
    const Point2D v0{10.5, 10.5}, v1{30.5, 10.5};
    MatchingProblem p{{{20.5, 10.5}}, {v0, v1}, {oracle::square_at(w, h, v0, 1), oracle::square_at(w, h, v1, 1)}};
    const auto r = match_three_case(p);
    REQUIRE(r.pairs.size() == 1);
    CHECK(r.pairs[0].second == 0);
    CHECK(r.unmatched_gt == std::vector<std::size_t>{1});
  }
}

TEST_CASE("crossing pattern: exact beats greedy") {
  const Point2D v0{20.5, 20.5}, v1{30.5, 20.5};
  MatchingProblem p{{{24.5, 20.5}, {15.5, 20.5}},
                    {v0, v1},
                    {oracle::square_at(100, 40, v0, 1), oracle::square_at(100, 40, v1, 1)}};
  const auto greedy = match_three_case(p);
  const auto exact = match_exact(p);
  CHECK(greedy.total_cost == doctest::Approx(4.0 + 15.0));
  CHECK(exact.total_cost == doctest::Approx(5.0 + 6.0));
  CHECK(exact.pairs == Assignment{{1, 0}, {0, 1}});
}

TEST_CASE("identity configuration costs nothing") {
  oracle::Lcg g{4};
  for (int t = 0; t < 20; ++t) {
    auto p = oracle::random_problem(g, 0, 1 + static_cast<std::size_t>(g.below(8)));
    p.preds = p.gts;
    CHECK(match_exact(p).total_cost == 0.0);
    CHECK(match_three_case(p).total_cost == 0.0);
    CHECK(match_exact(p).pairs.size() == p.gts.size());
  }
}

TEST_CASE("exact matching equals the brute force for small instances") {
  oracle::Lcg g{77};
  for (int t = 0; t < 400; ++t) {
    const auto m = static_cast<std::size_t>(1 + g.below(6));
    const auto n = static_cast<std::size_t>(g.below(7));
    const auto p = oracle::random_problem(g, m, n);
    const auto r = match_exact(p);
    check_consistent(p, r);
    const auto b = oracle::brute_matching(p.preds, p.gts, p.masks);
    REQUIRE(r.pairs.size() == b.pairs);
    REQUIRE(r.total_cost == doctest::Approx(b.cost).epsilon(1e-9));
  }
}

TEST_CASE("exact never costs more than three-case") {
  oracle::Lcg g{5};
  for (int t = 0; t < 500; ++t) {
    const auto p = oracle::random_problem(g, static_cast<std::size_t>(1 + g.below(12)),
                                  static_cast<std::size_t>(g.below(10)));
    const auto e = match_exact(p);
    const auto c = match_three_case(p);
    check_consistent(p, c);
    REQUIRE(e.pairs.size() == c.pairs.size());
    REQUIRE(e.total_cost <= c.total_cost + 1e-9);
  }
}

TEST_CASE("matching errors") {
  MatchingProblem p{{}, {{1, 1}}, {RasterMask(4, 4)}};
  CHECK_THROWS_AS(match_exact(p), Error);
  p.preds = {{1, 1}};
  p.masks.clear();
  CHECK_THROWS_AS(match_three_case(p), Error);
}
