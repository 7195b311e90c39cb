#include "crowdmask/dpmo.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crowdmask/error.hpp"

namespace crowdmask {

namespace {

int resolve_threads(int requested) {
#ifdef _OPENMP
  return requested > 0 ? requested : omp_get_max_threads();
#else
  (void)requested;
  return 1;
#endif
}

// Gives every empty mask the nearest pixel it can take without emptying
// another mask.
void repair_empty(std::vector<RasterMask>& masks, std::span<const Point2D> prompts) {
  if (std::none_of(masks.begin(), masks.end(), [](const RasterMask& m) { return m.empty(); })) {
    return;
  }
  const int w = masks.front().width();
  const int h = masks.front().height();
  std::vector<std::int32_t> owner(static_cast<std::size_t>(w) * h, -1);
  for (std::size_t j = 0; j < masks.size(); ++j) {
    const auto bits = masks[j].bits();
    for (std::size_t p = 0; p < bits.size(); ++p) {
      if (bits[p]) owner[p] = static_cast<std::int32_t>(j);
    }
  }
  std::vector<std::size_t> order(owner.size());
  for (std::size_t i = 0; i < masks.size(); ++i) {
    if (!masks[i].empty()) continue;
    const Point2D c = prompts[i];
    const auto sq = [&](std::size_t p) {
      const double dx = static_cast<double>(p % w) + 0.5 - c.x;
      const double dy = static_cast<double>(p / w) + 0.5 - c.y;
      return dx * dx + dy * dy;
    };
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return sq(a) < sq(b); });
    bool placed = false;
    for (std::size_t p : order) {
      const std::int32_t o = owner[p];
      if (o >= 0 && masks[static_cast<std::size_t>(o)].population() < 2) continue;
      if (o >= 0) masks[static_cast<std::size_t>(o)].set(p, false);
      masks[i].set(p, true);
      owner[p] = static_cast<std::int32_t>(i);
      placed = true;
      break;
    }
    if (!placed) {
      throw Error(ErrorKind::InvalidArgument, "more prompts than pixels in the image");
    }
  }
}

}  // namespace

std::string prompt_stream_id(std::size_t index, const Point2D& prompt) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "prompt/%zu/%016llx/%016llx", index,
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(prompt.x)),
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(prompt.y)));
  return buf;
}

std::vector<Proposal> query_proposals(std::span<const Point2D> prompts, const Scene& scene,
                                      const Segmenter& segmenter, std::uint64_t seed,
                                      const DpmoOptions& options) {
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    if (!scene.in_bounds(prompts[i])) {
      throw Error(ErrorKind::OutOfBounds, "prompt " + std::to_string(i) + " outside the scene");
    }
  }
  std::vector<Proposal> proposals(prompts.size());
  const auto n = static_cast<std::int64_t>(prompts.size());
  const int threads = resolve_threads(options.threads);
  // Exceptions may not cross the OpenMP region boundary.
  std::vector<std::exception_ptr> errors(prompts.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads) if (threads > 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      Rng rng = derive_rng(seed, prompt_stream_id(static_cast<std::size_t>(i), prompts[i]));
      proposals[i] = segmenter.segment(prompts[i], scene, rng);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return proposals;
}

std::vector<const RasterMask*> proposal_view(std::span<const Proposal> proposals) {
  std::vector<const RasterMask*> view(proposals.size(), nullptr);
  for (std::size_t i = 0; i < proposals.size(); ++i) {
    if (proposals[i]) view[i] = &*proposals[i];
  }
  return view;
}

DpmoResult constrain_and_resolve(std::span<const Point2D> prompts,
                                 std::span<const ExclusionCircle> circles,
                                 std::span<const RasterMask* const> proposals, int width,
                                 int height, const DpmoOptions& options) {
  if (prompts.empty()) throw Error(ErrorKind::EmptyPointSet, "no prompts");
  if (proposals.size() != prompts.size() || circles.size() != prompts.size()) {
    throw Error(ErrorKind::LengthMismatch, "proposals, circles and prompts differ in length");
  }
  DpmoResult result;
  result.circles.assign(circles.begin(), circles.end());

  std::vector<RasterMask> constrained(prompts.size());
  std::vector<std::uint8_t> fallback(prompts.size(), 0);
  const auto n = static_cast<std::int64_t>(prompts.size());
  const int threads = resolve_threads(options.threads);
  std::vector<std::exception_ptr> errors(prompts.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads) if (threads > 1)
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      ConstrainResult cr = constrain(proposals[i], circles[i], width, height);
      constrained[i] = std::move(cr.mask);
      fallback[i] = cr.fallback ? 1 : 0;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.masks = resolve_overlaps(constrained, prompts);
  repair_empty(result.masks, prompts);
  result.fallback.assign(fallback.begin(), fallback.end());
  return result;
}

DpmoResult run_dpmo_with_proposals(std::span<const Point2D> prompts,
                                   std::span<const RasterMask* const> proposals, int width,
                                   int height, const NnecParams& params,
                                   const DpmoOptions& options) {
  if (prompts.empty()) throw Error(ErrorKind::EmptyPointSet, "no prompts");
  const auto circles = all_radii(prompts, params);
  return constrain_and_resolve(prompts, circles, proposals, width, height, options);
}

DpmoResult run_dpmo(std::span<const Point2D> prompts, const Scene& scene,
                    const Segmenter& segmenter, const NnecParams& params, std::uint64_t seed,
                    const DpmoOptions& options) {
  if (prompts.empty()) throw Error(ErrorKind::EmptyPointSet, "no prompts");
  validate(params);
  const auto proposals = query_proposals(prompts, scene, segmenter, seed, options);
  return run_dpmo_with_proposals(prompts, proposal_view(proposals), scene.width, scene.height,
                                 params, options);
}

}  // namespace crowdmask
