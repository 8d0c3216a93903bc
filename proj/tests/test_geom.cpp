#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cadseq/error.hpp"
#include "cadseq/geom.hpp"
#include "cadseq/metrics.hpp"
#include "test_helpers.hpp"

using namespace cadseq;

namespace {

ErrorCode failure_cause(const CadProgram& p, int resolution = 32) {
  try {
    evaluate_program(p, resolution);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseFailure);
    return e.cause();
  }
  FAIL("expected ParseFailure");
  return ErrorCode::FormatError;
}

CadOp box_line(double x, double y) { return CadOp::line(x, y); }

// Right triangle with its corner at the origin (chaining starts there).
std::vector<CadOp> triangle(double side, double depth, BooleanOp op) {
  return {CadOp::sketch(Plane::XY), box_line(side, 0), box_line(0, side), box_line(0, 0), CadOp::extrude(depth, op)};
}

std::vector<CadOp> disc(double x, double y, double r, double depth, BooleanOp op) {
  return {CadOp::sketch(Plane::XY), CadOp::circle(x, y, r), CadOp::extrude(depth, op)};
}

std::vector<ChainedCurve> curves_of(std::vector<CadOp> body) {
  return chain_curves(CadProgram::from_body(std::move(body)).body());
}

// Analytic cylinder occupancy sampled at cell centers.
VoxelGrid analytic_cylinder(const Lattice& lat, double r, double h) {
  VoxelGrid g(lat);
  for (int k = 0; k < lat.resolution; ++k) {
    for (int j = 0; j < lat.resolution; ++j) {
      for (int i = 0; i < lat.resolution; ++i) {
        double x = lat.cell_center(i), y = lat.cell_center(j), z = lat.cell_center(k);
        g.set(i, j, k, x * x + y * y < r * r && z >= 0 && z < h);
      }
    }
  }
  return g;
}

}  // namespace

TEST_CASE("canonical planes are orthonormal with the stated normals") {
  for (Plane id : {Plane::XY, Plane::XZ, Plane::YZ}) {
    auto p = SketchPlane::canonical(id);
    CHECK(dot(p.u, p.u) == 1.0);
    CHECK(dot(p.v, p.v) == 1.0);
    CHECK(dot(p.u, p.v) == 0.0);
    CHECK(dot(p.normal, p.u) == 0.0);
    CHECK(dot(p.normal, p.v) == 0.0);
  }
  CHECK(SketchPlane::canonical(Plane::XY).normal == Vec3{0, 0, 1});
  CHECK(SketchPlane::canonical(Plane::XZ).normal == Vec3{0, -1, 0});
  CHECK(SketchPlane::canonical(Plane::YZ).normal == Vec3{1, 0, 0});
  CHECK(SketchPlane::canonical(Plane::XZ).to_world(1, 2, 3) == Vec3{1, -3, 2});
  CHECK(SketchPlane::canonical(Plane::YZ).to_world(1, 2, 3) == Vec3{3, 1, 2});
}

TEST_CASE("profiles from curve chains") {
  auto circle = build_profiles(curves_of({CadOp::sketch(Plane::XY), CadOp::circle(0, 0, 0.5)}));
  REQUIRE(circle.size() == 1);
  CHECK(circle[0].kind == Profile::Kind::Circle);
  CHECK(circle[0].radius == 0.5);
  CHECK(circle[0].polygon().size() == static_cast<std::size_t>(kCircleSegments));

  auto tri = build_profiles(
      curves_of({CadOp::sketch(Plane::XY), CadOp::line(0.8, 0), CadOp::line(0, 0.8), CadOp::line(0, 0)}));
  REQUIRE(tri.size() == 1);
  CHECK(tri[0].kind == Profile::Kind::Loop);
  CHECK(tri[0].closure_gap == 0.0);
  CHECK(point_in_profile({0.8 / 3, 0.8 / 3}, tri[0]));
  CHECK_FALSE(point_in_profile({0.5, 0.5}, tri[0]));

  auto arcs = build_profiles(curves_of({CadOp::sketch(Plane::XY), CadOp::arc(0.5, 0, 1.0), CadOp::arc(0, 0, 1.0)}));
  REQUIRE(arcs.size() == 1);
  CHECK(arcs[0].polygon().size() == static_cast<std::size_t>(2 * kArcChords));

  try {
    build_profiles(curves_of({CadOp::sketch(Plane::XY), CadOp::line(1, 0), CadOp::line(1, 1)}));
    FAIL("expected OpenProfile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OpenProfile);
  }
  try {
    build_profiles(curves_of(
        {CadOp::sketch(Plane::XY), CadOp::line(1, 0), CadOp::line(0, 1), CadOp::line(1, 1), CadOp::line(0, 0)}));
    FAIL("expected SelfIntersecting");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SelfIntersecting);
  }
}

TEST_CASE("near-closure within two bins is snapped shut") {
  const double bin = 2.0 / kQuantLevels;
  auto ok = build_profiles(
      curves_of({CadOp::sketch(Plane::XY), CadOp::line(0.8, 0), CadOp::line(0, 0.8), CadOp::line(bin, bin)}));
  REQUIRE(ok.size() == 1);
  CHECK(ok[0].closure_gap > 0.0);
  CHECK_THROWS_AS(build_profiles(curves_of({CadOp::sketch(Plane::XY), CadOp::line(0.8, 0), CadOp::line(0, 0.8),
                                            CadOp::line(3 * bin, 0)})),
                  Error);
}

TEST_CASE("point in circle profile") {
  Profile unit;
  unit.kind = Profile::Kind::Circle;
  unit.radius = 1.0;
  CHECK(point_in_profile({0, 0}, unit));
  CHECK_FALSE(point_in_profile({2, 0}, unit));
}

TEST_CASE("point in polygon uses even-odd with half-open edges") {
  std::vector<Vec2> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(point_in_polygon({0.5, 0.5}, sq));
  CHECK(point_in_polygon({0.0, 0.5}, sq));   // left edge inside
  CHECK_FALSE(point_in_polygon({1.0, 0.5}, sq));  // right edge outside
  CHECK(point_in_polygon({0.5, 0.0}, sq));   // bottom edge inside
  CHECK_FALSE(point_in_polygon({0.5, 1.0}, sq));  // top edge outside
  // Unit squares tiled side by side cover each boundary point exactly once.
  std::vector<Vec2> right{{1, 0}, {2, 0}, {2, 1}, {1, 1}};
  CHECK(point_in_polygon({1.0, 0.5}, right));
}

TEST_CASE("cylinder volume and IoU against the analytic cylinder") {
  SolidScene s = evaluate_program(test::cylinder(), 64);
  REQUIRE(s.bodies.size() == 1);
  const double exact = std::numbers::pi * 25.0 * 10.0;
  CHECK(std::abs(s.occupancy().volume() - exact) / exact < 0.03);
  CHECK(voxel_iou(s.occupancy(), analytic_cylinder(s.lattice, 5.0, 10.0)) >= 0.95);
  CHECK(s.lattice.half_extent == 12.0);
}

TEST_CASE("cylinder volume converges with resolution") {
  const double exact = std::numbers::pi * 25.0 * 10.0;
  double prev = 1.0;
  for (int r : {32, 64, 128}) {
    double err = std::abs(evaluate_program(test::cylinder(), r).occupancy().volume() - exact) / exact;
    CAPTURE(r);
    CHECK(err < 0.06);
    CHECK(err <= prev + 0.005);
    prev = err;
  }
}

TEST_CASE("tri-prism volume") {
  SolidScene s = evaluate_program(test::tri_prism(), 64);
  REQUIRE(s.bodies.size() == 1);
  const double exact = 0.5 * 8.0 * 8.0 * 5.0;
  CHECK(std::abs(s.occupancy().volume() - exact) / exact < 0.03);
}

TEST_CASE("negative depth mirrors through the sketch plane") {
  for (Plane plane : {Plane::XY, Plane::XZ, Plane::YZ}) {
    auto up = evaluate_program(CadProgram::from_body({CadOp::sketch(plane), CadOp::line(0.6, 0.1),
                                                      CadOp::line(0.2, 0.7), CadOp::line(0, 0), CadOp::extrude(0.4)}),
                               32)
                  .occupancy();
    auto down = evaluate_program(CadProgram::from_body({CadOp::sketch(plane), CadOp::line(0.6, 0.1),
                                                        CadOp::line(0.2, 0.7), CadOp::line(0, 0),
                                                        CadOp::extrude(-0.4)}),
                                 32)
                    .occupancy();
    CHECK(up.count() == down.count());
    CHECK(up.count() > 0);
    const int r = up.resolution();
    bool mirrored = true;
    for (int k = 0; k < r && mirrored; ++k) {
      for (int j = 0; j < r && mirrored; ++j) {
        for (int i = 0; i < r; ++i) {
          bool m = plane == Plane::XY   ? down.at(i, j, r - 1 - k)
                   : plane == Plane::XZ ? down.at(i, r - 1 - j, k)
                                        : down.at(r - 1 - i, j, k);
          if (up.at(i, j, k) != m) {
            mirrored = false;
            break;
          }
        }
      }
    }
    CHECK(mirrored);
  }
}

TEST_CASE("moving a circle by one pitch shifts occupancy by one cell") {
  const int res = 16;
  const double step = Lattice::for_scale(kDefaultScale, res).pitch() / kDefaultScale;
  auto a = evaluate_program(CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::circle(0, 0, 0.35),
                                                   CadOp::extrude(0.5)}),
                            res)
               .occupancy();
  auto b = evaluate_program(CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::circle(step, 0, 0.35),
                                                   CadOp::extrude(0.5)}),
                            res)
               .occupancy();
  CHECK(a.count() == b.count());
  bool shifted = true;
  for (int k = 0; k < res; ++k) {
    for (int j = 0; j < res; ++j) {
      for (int i = 0; i + 1 < res; ++i) shifted &= a.at(i, j, k) == b.at(i + 1, j, k);
    }
  }
  CHECK(shifted);
}

TEST_CASE("booleans match a per-cell oracle") {
  const int res = 16;
  const Lattice lat = Lattice::for_scale(kDefaultScale, res);
  const auto plane = SketchPlane::canonical(Plane::XY);
  auto tool = [&](const std::vector<CadOp>& ops) {
    auto profiles = build_profiles(curves_of(ops));
    return rasterize_extrusion(profiles.at(0), plane, *ops.back().depth, kDefaultScale, lat);
  };
  const VoxelGrid a = tool(triangle(0.6, 0.6, BooleanOp::Add));
  const VoxelGrid b = tool(disc(0.2, 0.2, 0.3, 0.3, BooleanOp::Add));

  auto scene_of = [&](BooleanOp op) {
    auto body = triangle(0.6, 0.6, BooleanOp::Add);
    auto second = disc(0.2, 0.2, 0.3, 0.3, op);
    body.insert(body.end(), second.begin(), second.end());
    return evaluate_program(CadProgram::from_body(body), res);
  };

  struct Case {
    BooleanOp op;
    std::size_t bodies;
  };
  for (Case c : {Case{BooleanOp::Join, 1}, Case{BooleanOp::Cut, 1}, Case{BooleanOp::Intersect, 1},
                 Case{BooleanOp::Add, 2}}) {
    SolidScene s = scene_of(c.op);
    CHECK(s.bodies.size() == c.bodies);
    VoxelGrid occ = s.occupancy();
    bool agree = true;
    for (std::size_t i = 0; i < occ.cells().size(); ++i) {
      bool x = a.cells()[i], y = b.cells()[i];
      bool want = c.op == BooleanOp::Cut         ? (x && !y)
                  : c.op == BooleanOp::Intersect ? (x && y)
                                                 : (x || y);
      agree &= static_cast<bool>(occ.cells()[i]) == want;
    }
    CAPTURE(static_cast<int>(c.op));
    CHECK(agree);
  }

  VoxelGrid u = a;
  u.unite(b);
  VoxelGrid d = a;
  d.subtract(b);
  VoxelGrid n = a;
  n.intersect(b);
  CHECK(u.count() + n.count() == a.count() + b.count());
  CHECK(d.count() + n.count() == a.count());
  CHECK_THROWS_AS(u.unite(VoxelGrid(Lattice::for_scale(kDefaultScale, 8))), Error);
}

TEST_CASE("evaluation failures") {
  CHECK(failure_cause(parse_program("")) == ErrorCode::EmptyResult);
  CHECK(failure_cause(CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::line(0.5, 0), CadOp::line(0.5, 0.5),
                                             CadOp::line(0, 0)})) == ErrorCode::EmptyResult);
  CHECK(failure_cause(CadProgram::from_body({CadOp::extrude(1.0)})) == ErrorCode::InvalidProgram);
  CHECK(failure_cause(CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::line(0.5, 0), CadOp::line(0.5, 0.5),
                                             CadOp::extrude(0.5)})) == ErrorCode::OpenProfile);

  auto cut_all = triangle(0.5, 0.5, BooleanOp::Add);
  auto cutter = disc(0.0, 0.0, 1.0, 0.9, BooleanOp::Cut);
  cut_all.insert(cut_all.end(), cutter.begin(), cutter.end());
  CHECK(failure_cause(CadProgram::from_body(cut_all)) == ErrorCode::EmptyResult);
}

TEST_CASE("evaluation is deterministic") {
  auto a = evaluate_program(test::tri_prism(), 48);
  auto b = evaluate_program(test::tri_prism(), 48);
  CHECK(a.occupancy() == b.occupancy());
  CHECK(a.bodies[0].mesh.vertices == b.bodies[0].mesh.vertices);
}

TEST_CASE("ear clipping covers the polygon area") {
  std::vector<Vec2> l_shape{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}};
  auto tris = triangulate(l_shape);
  CHECK(tris.size() == 4);
  double area = 0;
  for (auto t : tris) area += 0.5 * std::abs(cross(l_shape[t[1]] - l_shape[t[0]], l_shape[t[2]] - l_shape[t[0]]));
  CHECK(area == doctest::Approx(3.0));
}
