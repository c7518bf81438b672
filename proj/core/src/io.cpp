#include "occalib/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace occalib {

namespace {

[[noreturn]] void fail(const std::string& path, int line, const std::string& msg) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + msg);
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream iss(s);
  while (std::getline(iss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& s, const std::string& path, int line) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) fail(path, line, "trailing characters in number '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail(path, line, "not a number: '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(path, line, "number out of range: '" + s + "'");
  }
}

long parse_long(const std::string& s, const std::string& path, int line) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) fail(path, line, "trailing characters in integer '" + s + "'");
    return v;
  } catch (const std::invalid_argument&) {
    fail(path, line, "not an integer: '" + s + "'");
  } catch (const std::out_of_range&) {
    fail(path, line, "integer out of range: '" + s + "'");
  }
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

RigidTransform read_extrinsic(const std::string& path) {
  std::ifstream in = open_in(path);
  double vals[12];
  for (int i = 0; i < 12; ++i) {
    if (!(in >> vals[i])) fail(path, 1, "expected 12 reals for a 3x4 extrinsic");
  }
  RigidTransform T;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) T.rotation(r, c) = vals[r * 4 + c];
    T.translation[r] = vals[r * 4 + 3];
  }
  if (!T.is_valid()) fail(path, 1, "rotation block is not orthonormal (1e-9)");
  return T;
}

void write_extrinsic(const std::string& path, const RigidTransform& T) {
  std::ofstream out = open_out(path);
  for (int r = 0; r < 3; ++r) {
    out << format_double(T.rotation(r, 0)) << ' ' << format_double(T.rotation(r, 1))
        << ' ' << format_double(T.rotation(r, 2)) << ' '
        << format_double(T.translation[r]) << '\n';
  }
}

PinholeCamera read_camera(const std::string& path) {
  std::ifstream in = open_in(path);
  PinholeCamera cam;
  bool seen[6] = {};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(path, lineno, "expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "fx") { cam.fx = parse_double(value, path, lineno); seen[0] = true; }
    else if (key == "fy") { cam.fy = parse_double(value, path, lineno); seen[1] = true; }
    else if (key == "cx") { cam.cx = parse_double(value, path, lineno); seen[2] = true; }
    else if (key == "cy") { cam.cy = parse_double(value, path, lineno); seen[3] = true; }
    else if (key == "width") { cam.width = static_cast<int>(parse_long(value, path, lineno)); seen[4] = true; }
    else if (key == "height") { cam.height = static_cast<int>(parse_long(value, path, lineno)); seen[5] = true; }
    else fail(path, lineno, "unknown key '" + key + "'");
  }
  for (bool s : seen) {
    if (!s) fail(path, lineno, "missing camera key (need fx,fy,cx,cy,width,height)");
  }
  if (!cam.is_valid()) fail(path, lineno, "camera violates its invariants");
  return cam;
}

void write_camera(const std::string& path, const PinholeCamera& cam) {
  std::ofstream out = open_out(path);
  out << "fx=" << format_double(cam.fx) << "\nfy=" << format_double(cam.fy)
      << "\ncx=" << format_double(cam.cx) << "\ncy=" << format_double(cam.cy)
      << "\nwidth=" << cam.width << "\nheight=" << cam.height << '\n';
}

OrganizedScan read_scan(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "missing `rings,cols` header");
  const auto header = split(line, ',');
  if (header.size() != 2) fail(path, 1, "header must be `rings,cols`");
  OrganizedScan scan;
  scan.rings = static_cast<int>(parse_long(header[0], path, 1));
  scan.cols = static_cast<int>(parse_long(header[1], path, 1));
  if (scan.rings <= 0 || scan.cols <= 0) fail(path, 1, "non-positive grid size");
  scan.grid.assign(static_cast<std::size_t>(scan.rings) * scan.cols, {});

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 5) fail(path, lineno, "expected `ring,col,x,y,z`");
    const long ring = parse_long(parts[0], path, lineno);
    const long col = parse_long(parts[1], path, lineno);
    if (ring < 0 || ring >= scan.rings || col < 0 || col >= scan.cols) {
      fail(path, lineno, "ring/col out of bounds");
    }
    LidarReturn& ret = scan.at(static_cast<int>(ring), static_cast<int>(col));
    ret.point = Eigen::Vector3d(parse_double(parts[2], path, lineno),
                                parse_double(parts[3], path, lineno),
                                parse_double(parts[4], path, lineno));
    ret.range = ret.point.norm();
    ret.valid = true;
  }
  return scan;
}

void write_scan(const std::string& path, const OrganizedScan& scan) {
  std::ofstream out = open_out(path);
  out << scan.rings << ',' << scan.cols << '\n';
  for (int i = 0; i < scan.rings; ++i) {
    for (int j = 0; j < scan.cols; ++j) {
      const LidarReturn& ret = scan.at(i, j);
      if (!ret.valid) continue;
      out << i << ',' << j << ',' << format_double(ret.point.x()) << ','
          << format_double(ret.point.y()) << ',' << format_double(ret.point.z())
          << '\n';
    }
  }
}

SceneSpec read_scene_spec(const std::string& path) {
  std::ifstream in = open_in(path);
  SceneSpec spec;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(path, lineno, "expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "ground_z") {
      spec.ground_z = parse_double(value, path, lineno);
    } else if (key == "box") {
      const auto p = split(value, ',');
      if (p.size() != 6) fail(path, lineno, "box needs cx,cy,cz,hx,hy,hz");
      Box b;
      b.center = {parse_double(p[0], path, lineno), parse_double(p[1], path, lineno),
                  parse_double(p[2], path, lineno)};
      b.half_extents = {parse_double(p[3], path, lineno),
                        parse_double(p[4], path, lineno),
                        parse_double(p[5], path, lineno)};
      spec.boxes.push_back(b);
    } else if (key == "cylinder") {
      const auto p = split(value, ',');
      if (p.size() != 5) fail(path, lineno, "cylinder needs cx,cy,cz,radius,height");
      Cylinder c;
      c.center = {parse_double(p[0], path, lineno), parse_double(p[1], path, lineno),
                  parse_double(p[2], path, lineno)};
      c.radius = parse_double(p[3], path, lineno);
      c.height = parse_double(p[4], path, lineno);
      spec.cylinders.push_back(c);
    } else {
      fail(path, lineno, "unknown key '" + key + "'");
    }
  }
  return spec;
}

void write_scene_spec(const std::string& path, const SceneSpec& spec) {
  std::ofstream out = open_out(path);
  out << "ground_z=" << format_double(spec.ground_z) << '\n';
  for (const auto& b : spec.boxes) {
    out << "box=" << format_double(b.center.x()) << ',' << format_double(b.center.y())
        << ',' << format_double(b.center.z()) << ',' << format_double(b.half_extents.x())
        << ',' << format_double(b.half_extents.y()) << ','
        << format_double(b.half_extents.z()) << '\n';
  }
  for (const auto& c : spec.cylinders) {
    out << "cylinder=" << format_double(c.center.x()) << ','
        << format_double(c.center.y()) << ',' << format_double(c.center.z()) << ','
        << format_double(c.radius) << ',' << format_double(c.height) << '\n';
  }
}

DepthImage read_depth(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) fail(path, 1, "missing `width,height` header");
  const auto header = split(line, ',');
  if (header.size() != 2) fail(path, 1, "header must be `width,height`");
  DepthImage img;
  img.width = static_cast<int>(parse_long(header[0], path, 1));
  img.height = static_cast<int>(parse_long(header[1], path, 1));
  if (img.width <= 0 || img.height <= 0) fail(path, 1, "non-positive image size");
  img.depth.reserve(static_cast<std::size_t>(img.width) * img.height);

  int lineno = 1;
  for (int v = 0; v < img.height; ++v) {
    if (!std::getline(in, line)) fail(path, lineno + 1, "missing depth row");
    ++lineno;
    std::istringstream iss(line);
    std::string tok;
    int count = 0;
    while (iss >> tok) {
      img.depth.push_back(parse_double(tok, path, lineno));
      ++count;
    }
    if (count != img.width) fail(path, lineno, "wrong number of depths in row");
  }
  return img;
}

void write_depth(const std::string& path, const DepthImage& img) {
  std::ofstream out = open_out(path);
  out << img.width << ',' << img.height << '\n';
  for (int v = 0; v < img.height; ++v) {
    for (int u = 0; u < img.width; ++u) {
      if (u) out << ' ';
      const double d = img.at(u, v);
      out << (d > 0.0 ? format_double(d) : "-1");
    }
    out << '\n';
  }
}

DirectedEdgeSet2D read_edges2d(const std::string& path) {
  std::ifstream in = open_in(path);
  DirectedEdgeSet2D edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 3 || parts[2].size() != 1) {
      fail(path, lineno, "expected `u,v,D`");
    }
    const auto dir = direction_from_code(parts[2][0]);
    if (!dir) fail(path, lineno, "direction must be one of L,R,U,B");
    edges.of(*dir).emplace_back(
        static_cast<int>(parse_long(parts[0], path, lineno)),
        static_cast<int>(parse_long(parts[1], path, lineno)));
  }
  return edges;
}

void write_edges2d(const std::string& path, const DirectedEdgeSet2D& edges) {
  std::ofstream out = open_out(path);
  for (const OcclusionDirection d : kAllDirections) {
    for (const auto& p : edges.of(d)) {
      out << p.x() << ',' << p.y() << ',' << direction_code(d) << '\n';
    }
  }
}

DirectedEdgeSet3D read_edges3d(const std::string& path) {
  std::ifstream in = open_in(path);
  DirectedEdgeSet3D edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line)) continue;
    const auto parts = split(line, ',');
    if (parts.size() != 4 || parts[3].size() != 1) {
      fail(path, lineno, "expected `x,y,z,D`");
    }
    const auto dir = direction_from_code(parts[3][0]);
    if (!dir) fail(path, lineno, "direction must be one of L,R,U,B");
    edges.of(*dir).emplace_back(parse_double(parts[0], path, lineno),
                                parse_double(parts[1], path, lineno),
                                parse_double(parts[2], path, lineno));
  }
  return edges;
}

void write_edges3d(const std::string& path, const DirectedEdgeSet3D& edges) {
  std::ofstream out = open_out(path);
  for (const OcclusionDirection d : kAllDirections) {
    for (const auto& p : edges.of(d)) {
      out << format_double(p.x()) << ',' << format_double(p.y()) << ','
          << format_double(p.z()) << ',' << direction_code(d) << '\n';
    }
  }
}

void write_trace(const std::string& path, const std::vector<IterationRecord>& trace) {
  std::ofstream out = open_out(path);
  out << "iter,d_c_px,pairs,mean_abs_residual_px\n";
  for (const auto& rec : trace) {
    out << rec.iter << ',' << format_double(rec.d_c) << ',' << rec.pairs << ','
        << format_double(rec.mean_abs_residual) << '\n';
  }
}

void write_result(const std::string& path, const CalibrationResult& result) {
  std::ofstream out = open_out(path);
  const RigidTransform& T = result.final_transform;
  for (int r = 0; r < 3; ++r) {
    out << format_double(T.rotation(r, 0)) << ' ' << format_double(T.rotation(r, 1))
        << ' ' << format_double(T.rotation(r, 2)) << ' '
        << format_double(T.translation[r]) << '\n';
  }
  out << "status " << calib_status_name(result.status) << '\n';
}

RigidTransform read_result_extrinsic(const std::string& path) {
  return read_extrinsic(path);  // the status line follows the 12 reals
}

void write_match_dump(const std::string& path,
                      const std::vector<AssociationRecord>& records) {
  std::ofstream out = open_out(path);
  out << "x,y,z,D,u_proj,v_proj,c_u,c_v,n_u,n_v,residual_px,accepted,reason\n";
  for (const auto& r : records) {
    out << format_double(r.point.x()) << ',' << format_double(r.point.y()) << ','
        << format_double(r.point.z()) << ',' << direction_code(r.direction) << ',';
    if (r.projected) {
      out << format_double(r.projected->x()) << ',' << format_double(r.projected->y());
    } else {
      out << "nan,nan";
    }
    out << ',';
    if (r.line) {
      out << format_double(r.line->center.x()) << ',' << format_double(r.line->center.y())
          << ',' << format_double(r.line->normal.x()) << ','
          << format_double(r.line->normal.y()) << ',' << format_double(r.residual_px);
    } else {
      out << "nan,nan,nan,nan,nan";
    }
    out << ',' << (r.accepted ? 1 : 0) << ',' << reject_reason_name(r.reason) << '\n';
  }
}

SweepConfig read_sweep_config(const std::string& path) {
  std::ifstream in = open_in(path);
  SweepConfig config;
  Scenario defaults;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (blank(line) || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(path, lineno, "expected key=value");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "trials") {
      defaults.trials = static_cast<int>(parse_long(value, path, lineno));
    } else if (key == "seed") {
      defaults.seed = static_cast<uint64_t>(parse_long(value, path, lineno));
    } else if (key == "perturb_rot_deg") {
      defaults.perturb_rot_deg = parse_double(value, path, lineno);
    } else if (key == "perturb_trans_m") {
      defaults.perturb_trans_m = parse_double(value, path, lineno);
    } else if (key == "scenario") {
      const auto p = split(value, ',');
      if (p.size() != 5) {
        fail(path, lineno,
             "scenario needs name,lidar,missing_rate,sigma_r,sigma_alpha_deg");
      }
      Scenario s = defaults;
      s.name = p[0];
      s.lidar = p[1];
      if (s.lidar != "hdl64" && s.lidar != "hdl32") {
        fail(path, lineno, "lidar must be hdl64 or hdl32");
      }
      s.missing_rate = parse_double(p[2], path, lineno);
      s.sigma_r = parse_double(p[3], path, lineno);
      s.sigma_alpha_deg = parse_double(p[4], path, lineno);
      config.scenarios.push_back(s);
    } else {
      fail(path, lineno, "unknown key '" + key + "'");
    }
  }
  // Late defaults (trials=, seed=) apply to every scenario row.
  for (auto& s : config.scenarios) {
    s.trials = defaults.trials;
    s.seed = defaults.seed;
    s.perturb_rot_deg = defaults.perturb_rot_deg;
    s.perturb_trans_m = defaults.perturb_trans_m;
  }
  return config;
}

}  // namespace occalib
