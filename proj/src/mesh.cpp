#include <algorithm>
#include <numeric>

#include "cadseq/geom.hpp"

namespace cadseq {

namespace {

double signed_area(std::span<const Vec2> poly) {
  double a = 0.0;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) a += cross(poly[j], poly[i]);
  return 0.5 * a;
}

bool inside_triangle(Vec2 p, Vec2 a, Vec2 b, Vec2 c) {
  return cross(b - a, p - a) >= 0 && cross(c - b, p - b) >= 0 && cross(a - c, p - c) >= 0;
}

}  // namespace

std::vector<std::array<std::uint32_t, 3>> triangulate(std::span<const Vec2> polygon) {
  std::vector<std::array<std::uint32_t, 3>> tris;
  const std::size_t n = polygon.size();
  if (n < 3) return tris;
  std::vector<std::uint32_t> ring(n);
  std::iota(ring.begin(), ring.end(), 0u);
  if (signed_area(polygon) < 0) std::reverse(ring.begin(), ring.end());

  while (ring.size() > 3) {
    const std::size_t m = ring.size();
    std::size_t ear = m;
    for (std::size_t i = 0; i < m && ear == m; ++i) {
      std::uint32_t ia = ring[(i + m - 1) % m], ib = ring[i], ic = ring[(i + 1) % m];
      Vec2 a = polygon[ia], b = polygon[ib], c = polygon[ic];
      if (cross(b - a, c - b) <= 0) continue;
      bool blocked = false;
      for (std::uint32_t k : ring) {
        if (k == ia || k == ib || k == ic) continue;
        if (inside_triangle(polygon[k], a, b, c)) {
          blocked = true;
          break;
        }
      }
      if (!blocked) ear = i;
    }
    // Degenerate input (collinear runs): clip the first vertex and move on.
    if (ear == m) ear = 0;
    tris.push_back({ring[(ear + m - 1) % m], ring[ear], ring[(ear + 1) % m]});
    ring.erase(ring.begin() + static_cast<std::ptrdiff_t>(ear));
  }
  tris.push_back({ring[0], ring[1], ring[2]});
  return tris;
}

Mesh extrusion_mesh(const Profile& profile, const SketchPlane& plane, double depth, double scale) {
  Mesh mesh;
  const auto poly = profile.polygon();
  const auto n = static_cast<std::uint32_t>(poly.size());
  if (n < 3) return mesh;
  const double top = depth * scale;
  mesh.vertices.reserve(2 * n);
  for (const Vec2& p : poly) mesh.vertices.push_back(plane.to_world(p.x * scale, p.y * scale, 0.0));
  for (const Vec2& p : poly) mesh.vertices.push_back(plane.to_world(p.x * scale, p.y * scale, top));

  for (auto t : triangulate(poly)) {
    mesh.triangles.push_back({t[2], t[1], t[0]});
    mesh.triangles.push_back({t[0] + n, t[1] + n, t[2] + n});
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    std::uint32_t j = (i + 1) % n;
    mesh.triangles.push_back({i, j, j + n});
    mesh.triangles.push_back({i, j + n, i + n});
  }
  return mesh;
}

}  // namespace cadseq
