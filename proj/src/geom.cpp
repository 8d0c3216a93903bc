#include "cadseq/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "cadseq/error.hpp"

namespace cadseq {

SketchPlane SketchPlane::canonical(Plane id) {
  switch (id) {
    case Plane::XY: return {id, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    case Plane::XZ: return {id, {1, 0, 0}, {0, 0, 1}, {0, -1, 0}};
    case Plane::YZ: return {id, {0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  }
  return {Plane::XY, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
}

Vec3 SketchPlane::to_world(double u_coord, double v_coord, double w_coord) const {
  return u_coord * u + v_coord * v + w_coord * normal;
}

// ---------------------------------------------------------------------------
// Profiles

std::vector<Vec2> Profile::polygon() const {
  std::vector<Vec2> pts;
  if (kind == Kind::Circle) {
    pts.reserve(kCircleSegments);
    for (int k = 0; k < kCircleSegments; ++k) {
      double a = 2.0 * std::numbers::pi * k / kCircleSegments;
      pts.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
    }
    return pts;
  }
  for (const ChainedCurve& seg : segments) {
    if (seg.type == OpType::Line) {
      pts.push_back(seg.start);
      continue;
    }
    ArcGeometry g = arc_center(seg.start, seg.end, seg.sweep_deg);
    double a0 = std::atan2(seg.start.y - g.center.y, seg.start.x - g.center.x);
    double sweep = seg.sweep_deg * std::numbers::pi / 180.0;
    pts.push_back(seg.start);
    for (int k = 1; k < kArcChords; ++k) {
      double a = a0 + sweep * k / kArcChords;
      pts.push_back({g.center.x + g.radius * std::cos(a), g.center.y + g.radius * std::sin(a)});
    }
  }
  // Drop repeated vertices from zero-length segments.
  std::vector<Vec2> out;
  for (const Vec2& p : pts) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  while (out.size() > 1 && out.front() == out.back()) out.pop_back();
  return out;
}

namespace {

int orientation(Vec2 a, Vec2 b, Vec2 c) {
  double v = cross(b - a, c - a);
  if (v > 0) return 1;
  if (v < 0) return -1;
  return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  int o1 = orientation(a, b, c), o2 = orientation(a, b, d);
  int o3 = orientation(c, d, a), o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool self_intersects(const std::vector<Vec2>& poly) {
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = poly[i], b = poly[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_touch(a, b, poly[j], poly[(j + 1) % n])) return true;
    }
  }
  // Adjacent edges folding back onto each other.
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 a = poly[(i + n - 1) % n], b = poly[i], c = poly[(i + 1) % n];
    if (orientation(a, b, c) == 0 && dot(a - b, c - b) > 0) return true;
  }
  return false;
}

Profile close_chain(std::vector<ChainedCurve> chain) {
  Profile profile;
  profile.kind = Profile::Kind::Loop;
  Vec2 first = chain.front().start;
  double gap = length(chain.back().end - first);
  profile.closure_gap = gap;
  if (gap > kSnapTolerance) {
    throw Error(ErrorCode::OpenProfile, "curve chain ends " + format_real(gap) + " away from its start");
  }
  if (gap > kCloseEpsilon) chain.back().end = first;
  bool lines_only = std::all_of(chain.begin(), chain.end(), [](const auto& c) { return c.type == OpType::Line; });
  if (lines_only && chain.size() < 3) {
    throw Error(ErrorCode::OpenProfile, "a line loop needs at least three segments");
  }
  profile.segments = std::move(chain);
  auto poly = profile.polygon();
  if (poly.size() < 3) throw Error(ErrorCode::OpenProfile, "loop encloses no area");
  if (self_intersects(poly)) throw Error(ErrorCode::SelfIntersecting, "profile edges cross");
  return profile;
}

}  // namespace

std::vector<Profile> build_profiles(std::span<const ChainedCurve> curves) {
  std::vector<Profile> profiles;
  std::vector<ChainedCurve> chain;
  auto flush = [&] {
    if (!chain.empty()) profiles.push_back(close_chain(std::move(chain)));
    chain.clear();
  };
  for (const ChainedCurve& c : curves) {
    if (c.type == OpType::Circle) {
      flush();
      if (!(c.radius > 0.0)) throw Error(ErrorCode::OpenProfile, "circle radius must be positive");
      Profile p;
      p.kind = Profile::Kind::Circle;
      p.center = c.center;
      p.radius = c.radius;
      p.segments = {c};
      profiles.push_back(std::move(p));
    } else {
      chain.push_back(c);
    }
  }
  flush();
  return profiles;
}

bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    Vec2 a = polygon[i], b = polygon[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool point_in_profile(Vec2 p, const Profile& profile) {
  auto poly = profile.polygon();
  return point_in_polygon(p, poly);
}

// ---------------------------------------------------------------------------
// Voxels

Lattice Lattice::for_scale(double scale, int resolution) {
  if (resolution <= 0) throw Error(ErrorCode::RangeError, "resolution must be positive");
  return {resolution, scale + kLatticeMargin};
}

VoxelGrid::VoxelGrid(Lattice lattice)
    : lattice_(lattice),
      cells_(static_cast<std::size_t>(lattice.resolution) * lattice.resolution * lattice.resolution, 0) {}

std::size_t VoxelGrid::count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

double VoxelGrid::cell_volume() const {
  double p = lattice_.pitch();
  return p * p * p;
}

namespace {

void require_same_lattice(const VoxelGrid& a, const VoxelGrid& b) {
  if (!(a.lattice() == b.lattice())) throw Error(ErrorCode::LatticeMismatch, "voxel grids use different lattices");
}

}  // namespace

void VoxelGrid::unite(const VoxelGrid& other) {
  require_same_lattice(*this, other);
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] |= other.cells_[i];
}

void VoxelGrid::subtract(const VoxelGrid& other) {
  require_same_lattice(*this, other);
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] &= static_cast<std::uint8_t>(!other.cells_[i]);
}

void VoxelGrid::intersect(const VoxelGrid& other) {
  require_same_lattice(*this, other);
  for (std::size_t i = 0; i < cells_.size(); ++i) cells_[i] &= other.cells_[i];
}

void Mesh::append(const Mesh& other) {
  auto base = static_cast<std::uint32_t>(vertices.size());
  vertices.insert(vertices.end(), other.vertices.begin(), other.vertices.end());
  for (auto t : other.triangles) triangles.push_back({t[0] + base, t[1] + base, t[2] + base});
}

SolidScene SolidScene::empty(double scale, int resolution) {
  SolidScene scene;
  scene.scale = scale;
  scene.lattice = Lattice::for_scale(scale, resolution);
  return scene;
}

VoxelGrid SolidScene::occupancy() const {
  VoxelGrid all(lattice);
  for (const Body& b : bodies) all.unite(b.voxels);
  return all;
}

bool SolidScene::has_solid() const {
  return std::any_of(bodies.begin(), bodies.end(), [](const Body& b) { return b.voxels.count() > 0; });
}

VoxelGrid rasterize_extrusion(const Profile& profile, const SketchPlane& plane, double depth, double scale,
                              const Lattice& lattice) {
  VoxelGrid grid(lattice);
  const int r = lattice.resolution;
  const auto poly = profile.polygon();

  // Canonical planes are axis aligned: find the world axis behind u, v, w.
  auto axis_of = [](Vec3 e) { return e.x != 0 ? 0 : (e.y != 0 ? 1 : 2); };
  const int u_axis = axis_of(plane.u), v_axis = axis_of(plane.v), w_axis = axis_of(plane.normal);
  const double w_sign = plane.normal.x + plane.normal.y + plane.normal.z;

  double lo_u = poly.front().x, hi_u = lo_u, lo_v = poly.front().y, hi_v = lo_v;
  for (const Vec2& p : poly) {
    lo_u = std::min(lo_u, p.x);
    hi_u = std::max(hi_u, p.x);
    lo_v = std::min(lo_v, p.y);
    hi_v = std::max(hi_v, p.y);
  }

  std::vector<std::uint8_t> mask(static_cast<std::size_t>(r) * r, 0);
  for (int b = 0; b < r; ++b) {
    double v = lattice.cell_center(b) / scale;
    if (v < lo_v || v > hi_v) continue;
    for (int a = 0; a < r; ++a) {
      double u = lattice.cell_center(a) / scale;
      if (u < lo_u || u > hi_u) continue;
      mask[static_cast<std::size_t>(b) * r + a] = point_in_polygon({u, v}, poly) ? 1 : 0;
    }
  }

  const double w_lo = std::min(0.0, depth * scale), w_hi = std::max(0.0, depth * scale);
  std::array<int, 3> idx{};
  for (int m = 0; m < r; ++m) {
    double w = w_sign * lattice.cell_center(m);
    if (!(w >= w_lo && w < w_hi)) continue;
    idx[w_axis] = m;
    for (int b = 0; b < r; ++b) {
      idx[v_axis] = b;
      for (int a = 0; a < r; ++a) {
        if (!mask[static_cast<std::size_t>(b) * r + a]) continue;
        idx[u_axis] = a;
        grid.set(idx[0], idx[1], idx[2], true);
      }
    }
  }
  return grid;
}

SolidScene extrude(const Profile& profile, const SketchPlane& plane, double depth, BooleanOp boolean_op,
                   double scale, SolidScene scene) {
  if (!(depth != 0.0) || !std::isfinite(depth)) throw Error(ErrorCode::RangeError, "extrude depth must be non-zero");
  if (!(scale > 0.0)) throw Error(ErrorCode::RangeError, "scale must be positive");
  if (profile.kind == Profile::Kind::Loop && profile.closure_gap > kSnapTolerance) {
    throw Error(ErrorCode::OpenProfile, "profile is not closed");
  }
  Body tool{rasterize_extrusion(profile, plane, depth, scale, scene.lattice),
            extrusion_mesh(profile, plane, depth, scale)};

  auto drop_empty = [&] {
    std::erase_if(scene.bodies, [](const Body& b) { return b.voxels.count() == 0; });
    if (scene.bodies.empty()) throw Error(ErrorCode::EmptyResult, "boolean operation left no material");
  };

  switch (boolean_op) {
    case BooleanOp::Join:
      if (!scene.bodies.empty()) {
        scene.bodies.back().voxels.unite(tool.voxels);
        scene.bodies.back().mesh.append(tool.mesh);
        break;
      }
      [[fallthrough]];
    case BooleanOp::Add:
      if (tool.voxels.count() == 0) throw Error(ErrorCode::EmptyResult, "extrusion covers no voxel");
      scene.bodies.push_back(std::move(tool));
      break;
    case BooleanOp::Cut:
      for (Body& b : scene.bodies) b.voxels.subtract(tool.voxels);
      drop_empty();
      break;
    case BooleanOp::Intersect:
      for (Body& b : scene.bodies) b.voxels.intersect(tool.voxels);
      drop_empty();
      break;
  }
  return scene;
}

SolidScene evaluate_program(const CadProgram& program, int resolution) {
  auto report = validate_grammar(program);
  if (!report.ok) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::ParseFailure, ErrorCode::InvalidProgram,
                "InvalidProgram: " + v.rule + " at operation " + std::to_string(v.index) + ": " + v.message);
  }
  try {
    SolidScene scene = SolidScene::empty(program.scale(), resolution);
    SketchPlane plane = SketchPlane::canonical(Plane::XY);
    std::span<const CadOp> ops(program.ops);
    std::size_t block = 0;
    for (std::size_t i = 0; i < ops.size() && ops[i].type != OpType::End; ++i) {
      const CadOp& op = ops[i];
      if (op.type == OpType::Sketch) {
        plane = SketchPlane::canonical(*op.plane);
        block = i + 1;
      } else if (op.type == OpType::Extrude) {
        auto curves = chain_curves(ops.subspan(block, i - block));
        auto profiles = build_profiles(curves);
        if (op.profile_index < 0 || static_cast<std::size_t>(op.profile_index) >= profiles.size()) {
          throw Error(ErrorCode::OpenProfile, "sketch has no profile " + std::to_string(op.profile_index));
        }
        scene = extrude(profiles[static_cast<std::size_t>(op.profile_index)], plane, *op.depth, op.boolean_op,
                        op.scale, std::move(scene));
        block = i + 1;
      }
    }
    if (!scene.has_solid()) throw Error(ErrorCode::EmptyResult, "program produced no solid body");
    return scene;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseFailure) throw;
    throw Error(ErrorCode::ParseFailure, e.code(), e.what());
  }
}

}  // namespace cadseq
