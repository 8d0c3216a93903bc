#pragma once

#include <array>
#include <span>
#include <vector>

#include "cadseq/dsl.hpp"
#include "cadseq/vec.hpp"

namespace cadseq {

inline constexpr int kQuantLevels = 256;
inline constexpr int kUnused = -1;
inline constexpr int kParamCount = 6;

struct QuantRange {
  double lo = -1.0;
  double hi = 1.0;
};

inline constexpr QuantRange kCoordRange{-1.0, 1.0};
// Sweep and radius live in (0, 1]; they are quantized over [0, 1].
inline constexpr QuantRange kUnitRange{0.0, 1.0};
inline constexpr QuantRange kDepthRange{-1.0, 1.0};

// bin = min(255, floor((v - lo) / (hi - lo) * 256)). RangeError outside [lo, hi].
int quantize_value(double v, QuantRange range);
// Bin center. RangeError for bins outside 0..255.
double dequantize_value(int bin, QuantRange range);
// quantize followed by dequantize.
double snap_value(double v, QuantRange range);

// Parameter slots following the type code, in row order [I, x, y, alpha, r, d].
enum class Slot : int { Plane = 0, X = 1, Y = 2, Sweep = 3, Radius = 4, Depth = 5 };

// Which slots an operation type engages.
std::array<bool, kParamCount> used_slots(OpType type);

struct OpVector {
  int t = static_cast<int>(OpType::End);
  std::array<int, kParamCount> params{kUnused, kUnused, kUnused, kUnused, kUnused, kUnused};

  int operator[](Slot s) const { return params[static_cast<int>(s)]; }
  friend bool operator==(const OpVector&, const OpVector&) = default;
};

struct FeatureMatrix {
  std::array<OpVector, kMaxProgramRows> rows{};

  // Number of rows through the first end mark, inclusive (10 if none).
  int length() const;
  friend bool operator==(const FeatureMatrix&, const FeatureMatrix&) = default;
};

// Throws ProgramTooLong or InvalidProgram.
FeatureMatrix vectorize(const CadProgram& program);
// Throws MalformedRow. Rows after the first end mark are ignored.
CadProgram devectorize(const FeatureMatrix& matrix);
// Every continuous parameter moved to its bin center.
CadProgram snap_to_bins(const CadProgram& program);

struct ArcGeometry {
  Vec2 center;
  double radius = 0.0;
};

inline constexpr double kMinSweepDegrees = 1e-6;

// Center on the left of the directed chord start->end; the counter-clockwise
// arc from start to end about it subtends sweep_deg.
// Throws DegenerateChord when start == end, RangeError for sweeps outside
// [1e-6, 180].
ArcGeometry arc_center(Vec2 start, Vec2 end, double sweep_deg);

// A sketch curve with its chained start point. Circles carry center/radius
// and take no part in chaining.
struct ChainedCurve {
  std::size_t op_index = 0;
  OpType type = OpType::Line;
  Vec2 start;
  Vec2 end;
  double sweep_deg = 0.0;
  Vec2 center;
  double radius = 0.0;
};

// Curves of a span of operations with chaining applied: each sketch's first
// curve starts at the origin, Line/Arc start at the previous endpoint, and a
// Circle resets the chain to the origin. Indices are relative to `ops`.
std::vector<ChainedCurve> chain_curves(std::span<const CadOp> ops);

// Line/Arc segments of a whole program (indices into program.ops).
std::vector<ChainedCurve> chain_points(const CadProgram& program);

}  // namespace cadseq
