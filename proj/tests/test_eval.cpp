#include <doctest.h>

#include <cmath>

#include "occalib/eval.hpp"
#include "occalib/rng.hpp"
#include "oracles.hpp"

using namespace occalib;

TEST_CASE("identical transforms have zero errors") {
  const RigidTransform gt = standard_extrinsic();
  const AxisErrors e = rotation_translation_errors(gt, gt);
  CHECK(e.roll_deg == 0.0);
  CHECK(e.pitch_deg == 0.0);
  CHECK(e.yaw_deg == 0.0);
  CHECK(e.x_m == 0.0);
  CHECK(e.y_m == 0.0);
  CHECK(e.z_m == 0.0);
  CHECK(e.total_rotation_deg == 0.0);
}

TEST_CASE("a pure yaw offset lands in the yaw column") {
  const RigidTransform gt = standard_extrinsic();
  Twist yaw;
  yaw.rot_vec = Eigen::Vector3d(0.0, 0.0, deg2rad(0.5));
  const RigidTransform est = gt * exp_map(yaw);
  const AxisErrors e = rotation_translation_errors(est, gt);
  CHECK(e.yaw_deg == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(e.roll_deg <= 1e-9);
  CHECK(e.pitch_deg <= 1e-9);
  CHECK(e.total_rotation_deg == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("per-axis errors match the quaternion RPY oracle") {
  Rng rng(17);
  const RigidTransform gt = standard_extrinsic();
  for (int i = 0; i < 200; ++i) {
    const RigidTransform est = gt * sample_perturbation(rng.uniform(0.1, 5.0),
                                                        rng.uniform(0.0, 0.3),
                                                        rng.next_u64());
    const AxisErrors e = rotation_translation_errors(est, gt);

    const RigidTransform err = gt.inverse() * est;
    const Eigen::Vector3d rpy = oracles::rpy_via_quaternion(err.rotation);
    CHECK(e.roll_deg == doctest::Approx(std::abs(rad2deg(rpy.x()))).epsilon(1e-9));
    CHECK(e.pitch_deg == doctest::Approx(std::abs(rad2deg(rpy.y()))).epsilon(1e-9));
    CHECK(e.yaw_deg == doctest::Approx(std::abs(rad2deg(rpy.z()))).epsilon(1e-9));
    CHECK(e.x_m == doctest::Approx(std::abs(err.translation.x())).epsilon(1e-12));
    CHECK(e.y_m == doctest::Approx(std::abs(err.translation.y())).epsilon(1e-12));
    CHECK(e.z_m == doctest::Approx(std::abs(err.translation.z())).epsilon(1e-12));
  }
}

TEST_CASE("translation errors are reported in the gt frame") {
  const RigidTransform gt = standard_extrinsic();
  RigidTransform est = gt;
  est.translation += gt.rotation * Eigen::Vector3d(0.02, 0.0, 0.0);
  const AxisErrors e = rotation_translation_errors(est, gt);
  CHECK(e.x_m == doctest::Approx(0.02).epsilon(1e-9));
  CHECK(e.y_m <= 1e-12);
  CHECK(e.z_m <= 1e-12);
}

TEST_CASE("make_trial is deterministic and perturbs as configured") {
  Scenario s;
  s.seed = 7;
  s.trials = 1;
  const Edge3DParams ep;
  const TrialData a = make_trial(s, 0, ep);
  const TrialData b = make_trial(s, 0, ep);
  CHECK(a.edges2d.total() == b.edges2d.total());
  CHECK(a.features3d.total() == b.features3d.total());
  CHECK(a.xi0.rot_vec == b.xi0.rot_vec);

  const Twist e = log_map(a.perturbation);
  CHECK(std::abs(e.rot_vec.norm() - deg2rad(2.0)) <= 1e-9);
  CHECK(std::abs(a.perturbation.translation.norm() - 0.15) <= 1e-9);

  const TrialData c = make_trial(s, 1, ep);
  CHECK(c.xi0.rot_vec != a.xi0.rot_vec);
}

TEST_CASE("run_scenario aggregates MAE over a couple of trials") {
  Scenario s;
  s.name = "smoke";
  s.trials = 2;
  s.seed = 3;
  s.sigma_r = 0.0;
  CalibParams calib;
  const Edge3DParams ep;
  const ScenarioReport report = run_scenario(s, calib, ep);
  REQUIRE(report.trials.size() == 2);
  CHECK(report.failures == 0);
  CHECK(report.mae.total_rotation_deg < 0.2);
  CHECK(report.mae.x_m < 0.05);
  for (const auto& t : report.trials) {
    CHECK(t.status == CalibStatus::Converged);
    CHECK(t.trace.size() == 10);
  }
}

TEST_CASE("report formatting contains the scenario rows") {
  EvalReport report;
  ScenarioReport s;
  s.config.name = "test1";
  s.mae.roll_deg = 0.1;
  s.trials.resize(3);
  report.scenarios.push_back(s);

  const std::string table = format_report_table(report);
  CHECK(table.find("test1") != std::string::npos);
  CHECK(table.find("roll") != std::string::npos);

  const std::string records = format_report_records(report);
  CHECK(records.find("scenario,axis,mae") == 0);
  CHECK(records.find("test1,roll_deg,0.1") != std::string::npos);
}
