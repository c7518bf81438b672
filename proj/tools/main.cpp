// occalib command-line tool: synthetic dataset generation, feature
// extraction, calibration, evaluation and protocol sweeps. Every subcommand
// is a pure function of its input files and seeds.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "occalib/edge2d.hpp"
#include "occalib/edge3d.hpp"
#include "occalib/eval.hpp"
#include "occalib/io.hpp"
#include "occalib/optim.hpp"
#include "occalib/rng.hpp"

namespace fs = std::filesystem;
using namespace occalib;

namespace {

struct SynthOptions {
  std::string out_dir;
  uint64_t seed = 1;
  std::string preset = "standard";
  std::string lidar = "hdl64";
  double sigma_r = 0.0;
  double sigma_alpha_deg = 0.0;
};

int run_synth(const SynthOptions& opt) {
  fs::create_directories(opt.out_dir);
  const auto path = [&](const char* name) {
    return (fs::path(opt.out_dir) / name).string();
  };

  SceneSpec spec;
  if (opt.preset == "standard") {
    spec = standard_scene_spec(Rng::mix(opt.seed ^ Rng::hash_name("scene-root")));
  } else if (opt.preset == "sparse") {
    spec = sparse_scene_spec(Rng::mix(opt.seed ^ Rng::hash_name("scene-root")));
  } else {
    throw std::runtime_error("unknown preset: " + opt.preset);
  }
  const Scene scene = build_scene(spec);

  const PinholeCamera cam = standard_camera();
  const RigidTransform gt = standard_extrinsic();
  const RigidTransform lidar_pose = standard_lidar_pose();

  LidarModel model = opt.lidar == "hdl32" ? hdl32_model() : hdl64_model();
  if (opt.lidar != "hdl32" && opt.lidar != "hdl64") {
    throw std::runtime_error("unknown lidar preset: " + opt.lidar);
  }
  model.sigma_r = opt.sigma_r;
  model.sigma_alpha_deg = opt.sigma_alpha_deg;

  const DepthImage depth = render_depth(scene, cam, lidar_pose * gt.inverse());
  const OrganizedScan scan = simulate_lidar(
      scene, model, lidar_pose, Rng::mix(opt.seed ^ Rng::hash_name("noise-root")));

  write_scene_spec(path("scene.txt"), spec);
  write_camera(path("camera.txt"), cam);
  write_extrinsic(path("extrinsic_gt.txt"), gt);
  write_depth(path("depth.txt"), depth);
  write_scan(path("scan.txt"), scan);
  std::printf("synth: wrote scene/camera/extrinsic_gt/depth/scan to %s\n",
              opt.out_dir.c_str());
  return 0;
}

struct Extract2dOptions {
  std::string depth_path;
  std::string out_path;
  double occ_threshold = 0.40;
  double missing_rate = 0.0;
  uint64_t seed = 1;
};

int run_extract2d(const Extract2dOptions& opt) {
  const DepthImage depth = read_depth(opt.depth_path);
  DirectedEdgeSet2D edges =
      extract_edge_points_2d(label_pixel_pairs(depth, opt.occ_threshold));
  if (opt.missing_rate > 0.0) {
    edges = apply_circle_dropout(
        edges, opt.missing_rate, Rng::mix(opt.seed ^ Rng::hash_name("dropout-root")));
  }
  write_edges2d(opt.out_path, edges);
  std::printf("extract2d: %zu edge points -> %s\n", edges.total(),
              opt.out_path.c_str());
  return 0;
}

struct Extract3dOptions {
  std::string scan_path;
  std::string out_path;
  Edge3DParams params;
  uint64_t seed = 1;
};

int run_extract3d(const Extract3dOptions& opt) {
  const OrganizedScan scan = read_scan(opt.scan_path);
  Edge3DParams params = opt.params;
  params.ransac_seed = Rng::mix(opt.seed ^ Rng::hash_name("ransac-root"));
  const Extraction3D result = extract_3d_features(scan, params);
  write_edges3d(opt.out_path, result.features);
  std::printf("extract3d: %zu feature points -> %s\n", result.features.total(),
              opt.out_path.c_str());
  return 0;
}

struct CalibrateOptions {
  std::vector<std::string> edges2d_paths;
  std::vector<std::string> edges3d_paths;
  std::string camera_path;
  std::string init_path;
  std::string out_path;
  std::string trace_path;
  std::string dump_path;
  CalibParams params;
  bool no_ogm = false;
  bool no_ub = false;
  bool grid_search = false;
  double grid_rot_res_deg = 1.0;
  double grid_trans_res_m = 0.005;
  double grid_rot_span_deg = 10.0;
  double grid_trans_span_m = 0.2;
};

int run_calibrate(const CalibrateOptions& opt) {
  if (opt.edges2d_paths.size() != opt.edges3d_paths.size()) {
    throw std::runtime_error("need one --edges3d per --edges2d (paired frames)");
  }
  const PinholeCamera cam = read_camera(opt.camera_path);
  const RigidTransform init = read_extrinsic(opt.init_path);

  std::vector<FrameFeatures> frames;
  for (std::size_t i = 0; i < opt.edges2d_paths.size(); ++i) {
    FrameFeatures f;
    f.edges2d = read_edges2d(opt.edges2d_paths[i]);
    f.features3d = read_edges3d(opt.edges3d_paths[i]);
    if (opt.no_ub) {
      f.edges2d.of(OcclusionDirection::Up).clear();
      f.edges2d.of(OcclusionDirection::Bottom).clear();
      f.features3d.of(OcclusionDirection::Up).clear();
      f.features3d.of(OcclusionDirection::Bottom).clear();
    }
    frames.push_back(std::move(f));
  }
  const MultiFrameContext context = accumulate_frames(frames);

  CalibParams params = opt.params;
  params.direction_guided = !opt.no_ogm;

  Twist xi0 = log_map(init);
  if (opt.grid_search) {
    xi0 = grid_search_init(context, cam, xi0, opt.grid_rot_res_deg,
                           opt.grid_trans_res_m, opt.grid_rot_span_deg,
                           opt.grid_trans_span_m, params);
  }

  const CalibrationResult result = calibrate_frames(context, cam, xi0, params);
  write_result(opt.out_path, result);
  if (!opt.trace_path.empty()) write_trace(opt.trace_path, result.trace);
  if (!opt.dump_path.empty()) {
    // Dump the associations of the final estimate at the floor distance.
    MatchParams mp = params.match;
    mp.d_c = params.d_c_floor;
    std::vector<AssociationRecord> records;
    for (const auto& frame : context.frames) {
      associate(frame.features3d, frame.index, result.final_twist, cam, mp,
                params.direction_guided, &records);
    }
    write_match_dump(opt.dump_path, records);
  }

  std::printf("calibrate: status %s, %zu outer iterations -> %s\n",
              calib_status_name(result.status), result.trace.size(),
              opt.out_path.c_str());
  return result.status == CalibStatus::Converged ? 0 : 3;
}

struct EvaluateOptions {
  std::string est_path;
  std::string gt_path;
  std::string out_path;
};

int run_evaluate(const EvaluateOptions& opt) {
  const RigidTransform est = read_result_extrinsic(opt.est_path);
  const RigidTransform gt = read_extrinsic(opt.gt_path);
  const AxisErrors e = rotation_translation_errors(est, gt);

  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "roll_deg=%.17g\npitch_deg=%.17g\nyaw_deg=%.17g\n"
                "x_m=%.17g\ny_m=%.17g\nz_m=%.17g\n"
                "total_rotation_deg=%.17g\ntotal_translation_m=%.17g\n",
                e.roll_deg, e.pitch_deg, e.yaw_deg, e.x_m, e.y_m, e.z_m,
                e.total_rotation_deg, e.total_translation_m);
  std::fputs(buf, stdout);
  if (!opt.out_path.empty()) {
    std::ofstream out(opt.out_path);
    if (!out) throw std::runtime_error(opt.out_path + ": cannot open for writing");
    out << buf;
  }
  return 0;
}

struct SweepOptions {
  std::string config_path;
  std::string out_dir;
  bool no_ogm = false;
  bool no_ub = false;
};

int run_sweep_cmd(const SweepOptions& opt) {
  SweepConfig config = read_sweep_config(opt.config_path);
  for (auto& s : config.scenarios) {
    s.ogm = !opt.no_ogm;
    s.use_ub = !opt.no_ub;
  }
  const EvalReport report = run_sweep(config);

  fs::create_directories(opt.out_dir);
  const std::string table = format_report_table(report);
  const std::string records = format_report_records(report);
  {
    std::ofstream out(fs::path(opt.out_dir) / "report.txt");
    out << table;
  }
  {
    std::ofstream out(fs::path(opt.out_dir) / "report_records.txt");
    out << records;
  }
  for (const auto& s : report.scenarios) {
    for (std::size_t t = 0; t < s.trials.size(); ++t) {
      const std::string name =
          "trace_" + s.config.name + "_" + std::to_string(t) + ".txt";
      write_trace((fs::path(opt.out_dir) / name).string(), s.trials[t].trace);
    }
  }
  std::fputs(table.c_str(), stdout);
  return 0;
}

struct AblateOptions {
  std::string config_path;
  std::string out_dir;
  std::string mode;  // "no-ogm" | "no-ub"
};

int run_ablate(const AblateOptions& opt) {
  if (opt.mode != "no-ogm" && opt.mode != "no-ub") {
    throw std::runtime_error("--mode must be no-ogm or no-ub");
  }
  SweepConfig config = read_sweep_config(opt.config_path);

  SweepConfig ablated = config;
  for (auto& s : ablated.scenarios) {
    if (opt.mode == "no-ogm") s.ogm = false;
    if (opt.mode == "no-ub") s.use_ub = false;
    s.name += "_" + opt.mode;
  }

  EvalReport report = run_sweep(config);
  const EvalReport ablated_report = run_sweep(ablated);
  report.scenarios.insert(report.scenarios.end(),
                          ablated_report.scenarios.begin(),
                          ablated_report.scenarios.end());

  fs::create_directories(opt.out_dir);
  const std::string table = format_report_table(report);
  {
    std::ofstream out(fs::path(opt.out_dir) / "report.txt");
    out << table;
  }
  {
    std::ofstream out(fs::path(opt.out_dir) / "report_records.txt");
    out << format_report_records(report);
  }
  std::fputs(table.c_str(), stdout);
  return 0;
}

void add_calib_params(CLI::App* cmd, CalibParams& params) {
  cmd->add_option("--n-opt", params.n_opt, "outer iterations");
  cmd->add_option("--d-c-init", params.d_c_init, "initial cutting distance [px]");
  cmd->add_option("--d-c-decay", params.d_c_decay, "cutting distance decay");
  cmd->add_option("--d-c-floor", params.d_c_floor, "cutting distance floor [px]");
  cmd->add_option("--huber-delta", params.huber_delta, "Huber knee [px]");
  cmd->add_option("--min-pairs", params.min_pairs, "minimum matched pairs");
  cmd->add_option("--lambda-a", params.match.lambda_a_deg, "angle threshold [deg]");
  cmd->add_option("--lambda-c", params.match.lambda_c, "eigenvalue ratio threshold");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target-less camera-LiDAR extrinsic calibration from occlusion edges"};
  app.require_subcommand(1);

  SynthOptions synth;
  CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic frame");
  synth_cmd->add_option("--out", synth.out_dir, "output directory")->required();
  synth_cmd->add_option("--seed", synth.seed, "root seed");
  synth_cmd->add_option("--preset", synth.preset, "standard | sparse");
  synth_cmd->add_option("--lidar", synth.lidar, "hdl64 | hdl32");
  synth_cmd->add_option("--sigma-r", synth.sigma_r, "range noise std [m]");
  synth_cmd->add_option("--sigma-alpha", synth.sigma_alpha_deg,
                        "angular noise std [deg]");

  Extract2dOptions e2d;
  CLI::App* e2d_cmd =
      app.add_subcommand("extract2d", "directed 2D occlusion edges from depth");
  e2d_cmd->add_option("--depth", e2d.depth_path, "depth image file")->required();
  e2d_cmd->add_option("--out", e2d.out_path, "output edge file")->required();
  e2d_cmd->add_option("--occ-threshold", e2d.occ_threshold, "lambda_occ [m]");
  e2d_cmd->add_option("--missing-rate", e2d.missing_rate, "circle dropout rate");
  e2d_cmd->add_option("--seed", e2d.seed, "dropout seed");

  Extract3dOptions e3d;
  CLI::App* e3d_cmd =
      app.add_subcommand("extract3d", "directed 3D occlusion edges from a scan");
  e3d_cmd->add_option("--scan", e3d.scan_path, "organized scan file")->required();
  e3d_cmd->add_option("--out", e3d.out_path, "output feature file")->required();
  e3d_cmd->add_option("--occ-threshold", e3d.params.occ_threshold, "lambda_occ [m]");
  e3d_cmd->add_option("--ground-dist", e3d.params.ground_dist,
                      "near-plane removal distance [m]");
  e3d_cmd->add_option("--filter-radius", e3d.params.filter_radius,
                      "radius filter radius [m]");
  e3d_cmd->add_option("--min-neighbors", e3d.params.min_neighbors,
                      "radius filter neighbor count");
  e3d_cmd->add_option("--seed", e3d.seed, "RANSAC seed");

  CalibrateOptions cal;
  CLI::App* cal_cmd = app.add_subcommand("calibrate", "estimate the extrinsic");
  cal_cmd->add_option("--edges2d", cal.edges2d_paths, "2D edge file (repeatable)")
      ->required();
  cal_cmd->add_option("--edges3d", cal.edges3d_paths, "3D edge file (repeatable)")
      ->required();
  cal_cmd->add_option("--camera", cal.camera_path, "camera file")->required();
  cal_cmd->add_option("--init", cal.init_path, "initial extrinsic file")->required();
  cal_cmd->add_option("--out", cal.out_path, "result file")->required();
  cal_cmd->add_option("--trace", cal.trace_path, "trace file");
  cal_cmd->add_option("--match-dump", cal.dump_path, "debug match dump file");
  cal_cmd->add_flag("--no-ogm", cal.no_ogm, "disable occlusion-guided matching");
  cal_cmd->add_flag("--no-ub", cal.no_ub, "drop Up/Bottom features");
  cal_cmd->add_flag("--grid-search", cal.grid_search, "grid-search initialization");
  cal_cmd->add_option("--grid-rot-res", cal.grid_rot_res_deg,
                      "grid rotation resolution [deg]");
  cal_cmd->add_option("--grid-trans-res", cal.grid_trans_res_m,
                      "grid translation resolution [m]");
  cal_cmd->add_option("--grid-rot-span", cal.grid_rot_span_deg,
                      "grid rotation span [deg]");
  cal_cmd->add_option("--grid-trans-span", cal.grid_trans_span_m,
                      "grid translation span [m]");
  add_calib_params(cal_cmd, cal.params);

  EvaluateOptions ev;
  CLI::App* ev_cmd = app.add_subcommand("evaluate", "per-axis errors vs ground truth");
  ev_cmd->add_option("--est", ev.est_path, "estimated extrinsic/result file")
      ->required();
  ev_cmd->add_option("--gt", ev.gt_path, "ground-truth extrinsic file")->required();
  ev_cmd->add_option("--out", ev.out_path, "also write the errors here");

  SweepOptions sweep;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "run the evaluation protocol");
  sweep_cmd->add_option("--config", sweep.config_path, "sweep config file")
      ->required();
  sweep_cmd->add_option("--out-dir", sweep.out_dir, "report directory")->required();

  AblateOptions ablate;
  CLI::App* ablate_cmd =
      app.add_subcommand("ablate", "compare the pipeline with a module disabled");
  ablate_cmd->add_option("--config", ablate.config_path, "sweep config file")
      ->required();
  ablate_cmd->add_option("--out-dir", ablate.out_dir, "report directory")->required();
  ablate_cmd->add_option("--mode", ablate.mode, "no-ogm | no-ub")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth_cmd->parsed()) return run_synth(synth);
    if (e2d_cmd->parsed()) return run_extract2d(e2d);
    if (e3d_cmd->parsed()) return run_extract3d(e3d);
    if (cal_cmd->parsed()) return run_calibrate(cal);
    if (ev_cmd->parsed()) return run_evaluate(ev);
    if (sweep_cmd->parsed()) return run_sweep_cmd(sweep);
    if (ablate_cmd->parsed()) return run_ablate(ablate);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
