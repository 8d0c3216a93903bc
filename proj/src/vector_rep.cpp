#include "cadseq/vector_rep.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "cadseq/error.hpp"

namespace cadseq {

int quantize_value(double v, QuantRange range) {
  if (!(v >= range.lo && v <= range.hi)) {
    throw Error(ErrorCode::RangeError, "value " + format_real(v) + " outside quantization range [" +
                                           format_real(range.lo) + ", " + format_real(range.hi) + "]");
  }
  double scaled = (v - range.lo) / (range.hi - range.lo) * kQuantLevels;
  int bin = static_cast<int>(std::floor(scaled));
  return std::min(kQuantLevels - 1, bin);
}

double dequantize_value(int bin, QuantRange range) {
  if (bin < 0 || bin >= kQuantLevels) {
    throw Error(ErrorCode::RangeError, "bin " + std::to_string(bin) + " outside 0..255");
  }
  return range.lo + (bin + 0.5) / kQuantLevels * (range.hi - range.lo);
}

double snap_value(double v, QuantRange range) { return dequantize_value(quantize_value(v, range), range); }

std::array<bool, kParamCount> used_slots(OpType type) {
  switch (type) {
    case OpType::Sketch: return {true, false, false, false, false, false};
    case OpType::Line: return {false, true, true, false, false, false};
    case OpType::Arc: return {false, true, true, true, false, false};
    case OpType::Circle: return {false, true, true, false, true, false};
    case OpType::Extrude: return {false, false, false, false, false, true};
    case OpType::Start:
    case OpType::End: break;
  }
  return {false, false, false, false, false, false};
}

int FeatureMatrix::length() const {
  for (int i = 0; i < kMaxProgramRows; ++i) {
    if (rows[i].t == static_cast<int>(OpType::End)) return i + 1;
  }
  return kMaxProgramRows;
}

namespace {

OpVector op_vector(const CadOp& op) {
  OpVector row;
  row.t = static_cast<int>(op.type);
  auto set = [&](Slot s, int v) { row.params[static_cast<int>(s)] = v; };
  switch (op.type) {
    case OpType::Sketch:
      set(Slot::Plane, static_cast<int>(*op.plane));
      break;
    case OpType::Arc:
      set(Slot::Sweep, quantize_value(*op.sweep, kUnitRange));
      [[fallthrough]];
    case OpType::Line:
      set(Slot::X, quantize_value(*op.x, kCoordRange));
      set(Slot::Y, quantize_value(*op.y, kCoordRange));
      break;
    case OpType::Circle:
      set(Slot::X, quantize_value(*op.x, kCoordRange));
      set(Slot::Y, quantize_value(*op.y, kCoordRange));
      set(Slot::Radius, quantize_value(*op.radius, kUnitRange));
      break;
    case OpType::Extrude:
      set(Slot::Depth, quantize_value(*op.depth, kDepthRange));
      break;
    case OpType::Start:
    case OpType::End:
      break;
  }
  return row;
}

}  // namespace

FeatureMatrix vectorize(const CadProgram& program) {
  auto report = validate_grammar(program);
  for (const auto& v : report.violations) {
    if (v.rule == "too-long") throw Error(ErrorCode::ProgramTooLong, v.message);
  }
  if (!report.ok) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::InvalidProgram, v.rule + " at operation " + std::to_string(v.index) + ": " + v.message);
  }
  FeatureMatrix m;
  std::size_t i = 0;
  for (; i < program.ops.size() && program.ops[i].type != OpType::End; ++i) m.rows[i] = op_vector(program.ops[i]);
  // Remaining rows keep the default end-mark vector.
  return m;
}

CadProgram devectorize(const FeatureMatrix& matrix) {
  CadProgram program;
  for (int r = 0; r < kMaxProgramRows; ++r) {
    const OpVector& row = matrix.rows[r];
    if (row.t < 0 || row.t >= kOpTypeCount) {
      throw Error(ErrorCode::MalformedRow, "row " + std::to_string(r) + ": type code " + std::to_string(row.t));
    }
    auto type = static_cast<OpType>(row.t);
    if (type == OpType::End) break;
    auto used = used_slots(type);
    for (int k = 0; k < kParamCount; ++k) {
      if (used[k] && (row.params[k] < 0 || row.params[k] >= kQuantLevels)) {
        throw Error(ErrorCode::MalformedRow, "row " + std::to_string(r) + " (" + op_type_name(type) + "): slot " +
                                                 std::to_string(k + 1) + " holds " + std::to_string(row.params[k]));
      }
    }
    auto coord = [&](Slot s) { return dequantize_value(row[s], kCoordRange); };
    switch (type) {
      case OpType::Sketch:
        if (row[Slot::Plane] > 2) {
          throw Error(ErrorCode::MalformedRow,
                      "row " + std::to_string(r) + ": plane id " + std::to_string(row[Slot::Plane]));
        }
        program.ops.push_back(CadOp::sketch(static_cast<Plane>(row[Slot::Plane])));
        break;
      case OpType::Line:
        program.ops.push_back(CadOp::line(coord(Slot::X), coord(Slot::Y)));
        break;
      case OpType::Arc:
        program.ops.push_back(
            CadOp::arc(coord(Slot::X), coord(Slot::Y), dequantize_value(row[Slot::Sweep], kUnitRange)));
        break;
      case OpType::Circle:
        program.ops.push_back(
            CadOp::circle(coord(Slot::X), coord(Slot::Y), dequantize_value(row[Slot::Radius], kUnitRange)));
        break;
      case OpType::Extrude:
        program.ops.push_back(CadOp::extrude(dequantize_value(row[Slot::Depth], kDepthRange)));
        break;
      case OpType::Start:
        program.ops.push_back(CadOp::start());
        break;
      case OpType::End:
        break;
    }
  }
  program.ops.push_back(CadOp::end());
  return program;
}

CadProgram snap_to_bins(const CadProgram& program) {
  CadProgram out = program;
  for (CadOp& op : out.ops) {
    if (op.x) op.x = snap_value(*op.x, kCoordRange);
    if (op.y) op.y = snap_value(*op.y, kCoordRange);
    if (op.sweep) op.sweep = snap_value(*op.sweep, kUnitRange);
    if (op.radius) op.radius = snap_value(*op.radius, kUnitRange);
    if (op.depth) op.depth = snap_value(*op.depth, kDepthRange);
  }
  return out;
}

ArcGeometry arc_center(Vec2 start, Vec2 end, double sweep_deg) {
  if (start == end) throw Error(ErrorCode::DegenerateChord, "arc start and end coincide");
  if (!(sweep_deg >= kMinSweepDegrees && sweep_deg <= 180.0)) {
    throw Error(ErrorCode::RangeError, "arc sweep " + format_real(sweep_deg) + " degrees outside [1e-6, 180]");
  }
  Vec2 chord = end - start;
  double chord_len = length(chord);
  double half = sweep_deg * std::numbers::pi / 360.0;
  double radius = chord_len / (2.0 * std::sin(half));
  // Signed distance from chord midpoint to center; zero for a half circle.
  double offset = chord_len / (2.0 * std::tan(half));
  Vec2 left{-chord.y / chord_len, chord.x / chord_len};
  Vec2 mid = 0.5 * (start + end);
  return {mid + offset * left, radius};
}

std::vector<ChainedCurve> chain_curves(std::span<const CadOp> ops) {
  std::vector<ChainedCurve> curves;
  Vec2 cursor{};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const CadOp& op = ops[i];
    switch (op.type) {
      case OpType::Sketch:
      case OpType::Extrude:
        cursor = {};
        break;
      case OpType::Line:
      case OpType::Arc: {
        ChainedCurve c;
        c.op_index = i;
        c.type = op.type;
        c.start = cursor;
        c.end = {op.x.value_or(0.0), op.y.value_or(0.0)};
        if (op.type == OpType::Arc) c.sweep_deg = op.sweep.value_or(0.0) * 180.0;
        curves.push_back(c);
        cursor = c.end;
        break;
      }
      case OpType::Circle: {
        ChainedCurve c;
        c.op_index = i;
        c.type = OpType::Circle;
        c.center = {op.x.value_or(0.0), op.y.value_or(0.0)};
        c.start = c.end = c.center;
        c.radius = op.radius.value_or(0.0);
        curves.push_back(c);
        cursor = {};
        break;
      }
      case OpType::Start:
      case OpType::End:
        break;
    }
  }
  return curves;
}

std::vector<ChainedCurve> chain_points(const CadProgram& program) {
  std::vector<ChainedCurve> out;
  for (const auto& c : chain_curves(program.ops)) {
    if (c.type != OpType::Circle) out.push_back(c);
  }
  return out;
}

}  // namespace cadseq
