// Parallel kernels against their serial references.
#include <benchmark/benchmark.h>

#include "crowdmask/dpmo.hpp"
#include "crowdmask/eval.hpp"
#include "crowdmask/nnec.hpp"
#include "crowdmask/synth.hpp"

namespace {

using namespace crowdmask;

std::vector<Point2D> random_points(std::size_t n, double side, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point2D> pts(n);
  for (auto& p : pts) p = {rng.next_uniform() * side, rng.next_uniform() * side};
  return pts;
}

const Scene& dense_scene() {
  static const Scene scene = generate_scene(SynthConfig::preset(DensityRegime::Dense, 400, 11));
  return scene;
}

void BM_AllRadiiGrid(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 2048.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(all_radii(pts, {}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AllRadiiGrid)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_AllRadiiReference(benchmark::State& state) {
  const auto pts = random_points(static_cast<std::size_t>(state.range(0)), 2048.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(all_radii_reference(pts, {}));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AllRadiiReference)->RangeMultiplier(4)->Range(256, 16384)->Complexity();

void BM_IouMatrix(benchmark::State& state) {
  const auto& gt = *dense_scene().gt_masks;
  for (auto _ : state) benchmark::DoNotOptimize(iou_matrix(gt, gt));
}
BENCHMARK(BM_IouMatrix);

void BM_IouMatrixReference(benchmark::State& state) {
  const auto& gt = *dense_scene().gt_masks;
  for (auto _ : state) benchmark::DoNotOptimize(iou_matrix_reference(gt, gt));
}
BENCHMARK(BM_IouMatrixReference);

void BM_Dpmo(benchmark::State& state) {
  const Scene& scene = dense_scene();
  const OracleSegmenter seg;
  const DpmoOptions opts{static_cast<int>(state.range(0))};
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_dpmo(scene.points, scene, seg, {}, 3, opts));
  }
}
// 1 = serial path, 0 = OpenMP default.
BENCHMARK(BM_Dpmo)->Arg(1)->Arg(0);

}  // namespace

BENCHMARK_MAIN();
