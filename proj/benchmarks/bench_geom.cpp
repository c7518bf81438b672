#include <benchmark/benchmark.h>

#include "occalib/geom.hpp"
#include "occalib/rng.hpp"

using namespace occalib;

static void BM_ExpMap(benchmark::State& state) {
  Rng rng(1);
  Twist xi;
  xi.rot_vec = rng.unit_vector() * 0.8;
  xi.trans_vec = rng.unit_vector() * 1.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(exp_map(xi));
  }
}
BENCHMARK(BM_ExpMap);

static void BM_LogMap(benchmark::State& state) {
  Rng rng(2);
  Twist xi;
  xi.rot_vec = rng.unit_vector() * 2.5;
  xi.trans_vec = rng.unit_vector() * 1.5;
  const RigidTransform T = exp_map(xi);
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_map(T));
  }
}
BENCHMARK(BM_LogMap);

static void BM_Project(benchmark::State& state) {
  PinholeCamera cam;
  cam.fx = cam.fy = 250.0;
  cam.cx = 320.0;
  cam.cy = 240.0;
  cam.width = 640;
  cam.height = 480;
  const Eigen::Vector3d X(1.0, -0.5, 6.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(project_point(cam, X));
  }
}
BENCHMARK(BM_Project);
