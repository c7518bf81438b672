#include <benchmark/benchmark.h>

#include "occalib/edge2d.hpp"
#include "occalib/edge3d.hpp"
#include "occalib/optim.hpp"
#include "occalib/scene.hpp"

using namespace occalib;

namespace {

struct FrameFixture {
  PinholeCamera cam = standard_camera();
  RigidTransform gt = standard_extrinsic();
  Scene scene = build_scene(standard_scene_spec(1));
  RigidTransform lidar_pose = standard_lidar_pose();
  OrganizedScan scan = simulate_lidar(scene, hdl64_model(), lidar_pose, 1);
  DepthImage depth = render_depth(scene, cam, lidar_pose * gt.inverse());
};

const FrameFixture& fixture() {
  static FrameFixture f;
  return f;
}

}  // namespace

static void BM_RenderDepth(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(render_depth(f.scene, f.cam, f.lidar_pose * f.gt.inverse()));
  }
}
BENCHMARK(BM_RenderDepth)->Unit(benchmark::kMillisecond);

static void BM_SimulateLidar(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_lidar(f.scene, hdl64_model(), f.lidar_pose, 1));
  }
}
BENCHMARK(BM_SimulateLidar)->Unit(benchmark::kMillisecond);

static void BM_Extract3d(benchmark::State& state) {
  const auto& f = fixture();
  Edge3DParams params;
  params.ransac_seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(extract_3d_features(f.scan, params));
  }
}
BENCHMARK(BM_Extract3d)->Unit(benchmark::kMillisecond);

static void BM_Calibrate(benchmark::State& state) {
  const auto& f = fixture();
  const DirectedEdgeSet2D edges2d =
      extract_edge_points_2d(label_pixel_pairs(f.depth, 0.4));
  Edge3DParams ep;
  ep.ransac_seed = 1;
  const DirectedEdgeSet3D features3d = extract_3d_features(f.scan, ep).features;
  const Twist xi0 = log_map(f.gt * sample_perturbation(2.0, 0.15, 1));
  CalibParams params;
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate(edges2d, features3d, f.cam, xi0, params));
  }
}
BENCHMARK(BM_Calibrate)->Unit(benchmark::kMillisecond);
