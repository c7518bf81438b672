#include <benchmark/benchmark.h>

#include "occalib/kdtree.hpp"
#include "occalib/match.hpp"
#include "occalib/rng.hpp"

using namespace occalib;

static void BM_KdTreeBuild(benchmark::State& state) {
  Rng rng(3);
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < state.range(0); ++i) {
    pts.emplace_back(rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0));
  }
  for (auto _ : state) {
    KdTree2d tree(pts);
    benchmark::DoNotOptimize(tree.size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KdTreeBuild)->Range(1 << 8, 1 << 14)->Complexity();

static void BM_KdTreeKnn8(benchmark::State& state) {
  Rng rng(4);
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < state.range(0); ++i) {
    pts.emplace_back(rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0));
  }
  const KdTree2d tree(pts);
  for (auto _ : state) {
    const Eigen::Vector2d q(rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0));
    benchmark::DoNotOptimize(tree.knn(q, 8));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KdTreeKnn8)->Range(1 << 8, 1 << 14)->Complexity();

static void BM_CandidateLine(benchmark::State& state) {
  Rng rng(5);
  std::vector<Eigen::Vector2d> pts;
  for (int i = 0; i < 8; ++i) {
    pts.emplace_back(100.0 + i + rng.uniform(-0.2, 0.2), 200.0 + rng.uniform(-0.2, 0.2));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(candidate_line(pts));
  }
}
BENCHMARK(BM_CandidateLine);
