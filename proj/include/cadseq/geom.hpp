#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "cadseq/dsl.hpp"
#include "cadseq/vec.hpp"
#include "cadseq/vector_rep.hpp"

namespace cadseq {

inline constexpr double kCloseEpsilon = 1e-6;
// Predicted programs may miss closure by quantization noise; gaps up to two
// coordinate bins are snapped shut.
inline constexpr double kSnapTolerance = 2.0 * (2.0 / kQuantLevels);
inline constexpr int kArcChords = 64;
inline constexpr int kCircleSegments = 64;
inline constexpr double kLatticeMargin = 2.0;
inline constexpr int kDefaultResolution = 64;

struct SketchPlane {
  Plane id = Plane::XY;
  Vec3 u;
  Vec3 v;
  Vec3 normal;

  static SketchPlane canonical(Plane id);
  Vec3 to_world(double u_coord, double v_coord, double w_coord) const;
};

struct Profile {
  enum class Kind { Loop, Circle };
  Kind kind = Kind::Loop;
  std::vector<ChainedCurve> segments;
  Vec2 center;
  double radius = 0.0;
  double closure_gap = 0.0;

  // Closed polygon (no repeated first vertex), arcs at 64 chords and circles
  // at 64 segments, counter-clockwise order not guaranteed.
  std::vector<Vec2> polygon() const;
};

// One profile per circle and per maximal Line/Arc chain. Throws OpenProfile
// for chains that do not close (or lines-only loops under three segments)
// and SelfIntersecting when non-adjacent polygon edges touch.
std::vector<Profile> build_profiles(std::span<const ChainedCurve> curves);

// Even-odd test; points on left/bottom edges are inside, right/top outside.
bool point_in_polygon(Vec2 p, std::span<const Vec2> polygon);
bool point_in_profile(Vec2 p, const Profile& profile);

struct Lattice {
  int resolution = kDefaultResolution;
  double half_extent = kDefaultScale + kLatticeMargin;

  static Lattice for_scale(double scale, int resolution);
  double pitch() const { return 2.0 * half_extent / resolution; }
  double cell_center(int i) const { return -half_extent + (i + 0.5) * pitch(); }
  friend bool operator==(const Lattice&, const Lattice&) = default;
};

class VoxelGrid {
 public:
  VoxelGrid() = default;
  explicit VoxelGrid(Lattice lattice);

  const Lattice& lattice() const { return lattice_; }
  int resolution() const { return lattice_.resolution; }
  std::size_t index(int i, int j, int k) const {
    auto r = static_cast<std::size_t>(lattice_.resolution);
    return (static_cast<std::size_t>(k) * r + static_cast<std::size_t>(j)) * r + static_cast<std::size_t>(i);
  }
  bool at(int i, int j, int k) const { return cells_[index(i, j, k)] != 0; }
  void set(int i, int j, int k, bool value) { cells_[index(i, j, k)] = value ? 1 : 0; }
  std::span<const std::uint8_t> cells() const { return cells_; }
  std::span<std::uint8_t> cells() { return cells_; }

  std::size_t count() const;
  double cell_volume() const;
  double volume() const { return static_cast<double>(count()) * cell_volume(); }

  // Throw LatticeMismatch for grids on different lattices.
  void unite(const VoxelGrid& other);
  void subtract(const VoxelGrid& other);
  void intersect(const VoxelGrid& other);

  friend bool operator==(const VoxelGrid&, const VoxelGrid&) = default;

 private:
  Lattice lattice_;
  std::vector<std::uint8_t> cells_;
};

struct Mesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  void append(const Mesh& other);
};

struct Body {
  VoxelGrid voxels;
  Mesh mesh;
};

struct SolidScene {
  Lattice lattice;
  double scale = kDefaultScale;
  std::vector<Body> bodies;

  static SolidScene empty(double scale, int resolution);
  VoxelGrid occupancy() const;
  bool has_solid() const;
};

// Voxelizes the profile swept along the plane normal by depth * scale.
VoxelGrid rasterize_extrusion(const Profile& profile, const SketchPlane& plane, double depth, double scale,
                              const Lattice& lattice);
Mesh extrusion_mesh(const Profile& profile, const SketchPlane& plane, double depth, double scale);

// Combines an extrusion into the scene. Throws OpenProfile for bad input and
// EmptyResult when the boolean leaves nothing.
SolidScene extrude(const Profile& profile, const SketchPlane& plane, double depth, BooleanOp boolean_op,
                   double scale, SolidScene scene);

// Throws ParseFailure whose cause is InvalidProgram, OpenProfile,
// SelfIntersecting, DegenerateChord or EmptyResult.
SolidScene evaluate_program(const CadProgram& program, int resolution = kDefaultResolution);

// Triangulates a simple polygon by ear clipping.
std::vector<std::array<std::uint32_t, 3>> triangulate(std::span<const Vec2> polygon);

}  // namespace cadseq
