#pragma once

#include <string>

#include "occalib/eval.hpp"

namespace occalib {

/// File formats. All writers print doubles with 17 significant digits so a
/// write/read round trip is bit-exact. Readers throw std::runtime_error with
/// the offending file and line on malformed input.

// 12 whitespace-separated reals, row-major 3x4 [R|t]. Validates the rotation
// invariants on read.
RigidTransform read_extrinsic(const std::string& path);
void write_extrinsic(const std::string& path, const RigidTransform& T);

// key=value lines: fx, fy, cx, cy, width, height.
PinholeCamera read_camera(const std::string& path);
void write_camera(const std::string& path, const PinholeCamera& cam);

// Header `rings,cols` then one line per valid return `ring,col,x,y,z`.
OrganizedScan read_scan(const std::string& path);
void write_scan(const std::string& path, const OrganizedScan& scan);

// key=value plus repeated `box=cx,cy,cz,hx,hy,hz` and
// `cylinder=cx,cy,cz,radius,height` lines.
SceneSpec read_scene_spec(const std::string& path);
void write_scene_spec(const std::string& path, const SceneSpec& spec);

// Header `width,height` then row-major depths, one row per line, -1 invalid.
DepthImage read_depth(const std::string& path);
void write_depth(const std::string& path, const DepthImage& img);

// One line per feature `u,v,D` with D in {L,R,U,B}.
DirectedEdgeSet2D read_edges2d(const std::string& path);
void write_edges2d(const std::string& path, const DirectedEdgeSet2D& edges);

// One line per feature `x,y,z,D`.
DirectedEdgeSet3D read_edges3d(const std::string& path);
void write_edges3d(const std::string& path, const DirectedEdgeSet3D& edges);

// `iter,d_c_px,pairs,mean_abs_residual_px` per outer iteration.
void write_trace(const std::string& path, const std::vector<IterationRecord>& trace);

// Final 3x4 extrinsic plus a status line.
void write_result(const std::string& path, const CalibrationResult& result);
// Reads the extrinsic part of a result file (status line optional).
RigidTransform read_result_extrinsic(const std::string& path);

// Debug match dump:
// x,y,z,D,u_proj,v_proj,c_u,c_v,n_u,n_v,residual_px,accepted,reason
void write_match_dump(const std::string& path,
                      const std::vector<AssociationRecord>& records);

// Flat key=value sweep configuration; unknown keys are errors. Scenario rows:
// scenario=name,lidar,missing_rate,sigma_r,sigma_alpha_deg
SweepConfig read_sweep_config(const std::string& path);

std::string format_double(double v);  // %.17g

}  // namespace occalib
