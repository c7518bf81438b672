#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "occalib/edge2d.hpp"
#include "occalib/edge3d.hpp"
#include "occalib/eval.hpp"
#include "occalib/io.hpp"
#include "occalib/optim.hpp"
#include "occalib/rng.hpp"

using namespace occalib;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("occalib_cli_" +
            std::to_string(Rng(reinterpret_cast<uint64_t>(this)).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = std::string(OCCALIB_CLI_PATH) + " " + args +
                          " > /dev/null 2> /dev/null";
  return std::system(cmd.c_str());
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("synth + extract + calibrate + evaluate round trip") {
  TempDir dir;
  REQUIRE(run("synth --out " + dir.file("data") + " --seed 1 --sigma-r 0.02") == 0);
  REQUIRE(fs::exists(dir.file("data/scan.txt")));
  REQUIRE(fs::exists(dir.file("data/depth.txt")));

  REQUIRE(run("extract2d --depth " + dir.file("data/depth.txt") + " --out " +
              dir.file("edges2d.txt")) == 0);
  REQUIRE(run("extract3d --scan " + dir.file("data/scan.txt") + " --out " +
              dir.file("edges3d.txt") + " --seed 1") == 0);

  // Perturbed initialization written next to the data.
  const RigidTransform gt = read_extrinsic(dir.file("data/extrinsic_gt.txt"));
  const RigidTransform init = gt * sample_perturbation(2.0, 0.15, 5);
  write_extrinsic(dir.file("init.txt"), init);

  REQUIRE(run("calibrate --edges2d " + dir.file("edges2d.txt") + " --edges3d " +
              dir.file("edges3d.txt") + " --camera " + dir.file("data/camera.txt") +
              " --init " + dir.file("init.txt") + " --out " + dir.file("result.txt") +
              " --trace " + dir.file("trace.txt")) == 0);

  REQUIRE(run("evaluate --est " + dir.file("result.txt") + " --gt " +
              dir.file("data/extrinsic_gt.txt") + " --out " + dir.file("errors.txt")) ==
          0);
  const std::string errors = slurp(dir.file("errors.txt"));
  CHECK(errors.find("total_rotation_deg=") != std::string::npos);

  // The CLI file pipeline must agree with the in-memory pipeline bit-exactly.
  const DirectedEdgeSet2D edges2d = read_edges2d(dir.file("edges2d.txt"));
  const DirectedEdgeSet3D features3d = read_edges3d(dir.file("edges3d.txt"));
  const PinholeCamera cam = read_camera(dir.file("data/camera.txt"));
  CalibParams params;
  const CalibrationResult expected =
      calibrate(edges2d, features3d, cam, log_map(init), params);

  const RigidTransform result = read_result_extrinsic(dir.file("result.txt"));
  CHECK(result.rotation == expected.final_transform.rotation);
  CHECK(result.translation == expected.final_transform.translation);
}

TEST_CASE("calibrate is byte-identical across runs") {
  TempDir dir;
  REQUIRE(run("synth --out " + dir.file("data") + " --seed 1") == 0);
  REQUIRE(run("extract2d --depth " + dir.file("data/depth.txt") + " --out " +
              dir.file("e2.txt")) == 0);
  REQUIRE(run("extract3d --scan " + dir.file("data/scan.txt") + " --out " +
              dir.file("e3.txt") + " --seed 1") == 0);

  const RigidTransform gt = read_extrinsic(dir.file("data/extrinsic_gt.txt"));
  write_extrinsic(dir.file("init.txt"), gt * sample_perturbation(2.0, 0.15, 9));

  const std::string base = "calibrate --edges2d " + dir.file("e2.txt") +
                           " --edges3d " + dir.file("e3.txt") + " --camera " +
                           dir.file("data/camera.txt") + " --init " +
                           dir.file("init.txt");
  REQUIRE(run(base + " --out " + dir.file("r1.txt") + " --trace " +
              dir.file("t1.txt")) == 0);
  REQUIRE(run(base + " --out " + dir.file("r2.txt") + " --trace " +
              dir.file("t2.txt")) == 0);

  CHECK(slurp(dir.file("r1.txt")) == slurp(dir.file("r2.txt")));
  CHECK(slurp(dir.file("t1.txt")) == slurp(dir.file("t2.txt")));
}

TEST_CASE("synth is deterministic in the seed") {
  TempDir dir;
  REQUIRE(run("synth --out " + dir.file("a") + " --seed 7 --sigma-r 0.02") == 0);
  REQUIRE(run("synth --out " + dir.file("b") + " --seed 7 --sigma-r 0.02") == 0);
  CHECK(slurp(dir.file("a/scan.txt")) == slurp(dir.file("b/scan.txt")));
  CHECK(slurp(dir.file("a/depth.txt")) == slurp(dir.file("b/depth.txt")));
}

TEST_CASE("missing and malformed inputs produce nonzero exits") {
  TempDir dir;
  CHECK(run("extract2d --depth " + dir.file("nope.txt") + " --out " +
            dir.file("out.txt")) != 0);

  std::ofstream bad(dir.file("bad_scan.txt"));
  bad << "2,4\n0,0,oops,2.0,3.0\n";
  bad.close();
  CHECK(run("extract3d --scan " + dir.file("bad_scan.txt") + " --out " +
            dir.file("out.txt")) != 0);

  CHECK(run("badcommand") != 0);
}

TEST_CASE("sweep runs a tiny config end to end") {
  TempDir dir;
  std::ofstream cfg(dir.file("sweep.cfg"));
  cfg << "trials=1\nseed=3\nperturb_rot_deg=2\nperturb_trans_m=0.15\n"
      << "scenario=mini,hdl64,0,0.02,0\n";
  cfg.close();

  REQUIRE(run("sweep --config " + dir.file("sweep.cfg") + " --out-dir " +
              dir.file("out")) == 0);
  CHECK(fs::exists(dir.file("out/report.txt")));
  CHECK(fs::exists(dir.file("out/report_records.txt")));
  CHECK(fs::exists(dir.file("out/trace_mini_0.txt")));
  const std::string records = slurp(dir.file("out/report_records.txt"));
  CHECK(records.find("mini,roll_deg,") != std::string::npos);
}
