#include <string>

#include "cadseq/dsl.hpp"
#include "cadseq/error.hpp"
#include "cadseq/vector_rep.hpp"

namespace cadseq {

namespace {

const char* feature_operation(BooleanOp op) {
  switch (op) {
    case BooleanOp::Join: return "JoinFeatureOperation";
    case BooleanOp::Cut: return "CutFeatureOperation";
    case BooleanOp::Intersect: return "IntersectFeatureOperation";
    case BooleanOp::Add: return "NewBodyFeatureOperation";
  }
  return "NewBodyFeatureOperation";
}

std::string point(Vec2 p, double scale) {
  return "{\"x\": " + format_real(p.x * scale) + ", \"y\": " + format_real(p.y * scale) + "}";
}

}  // namespace

std::string emit_gallery_script(const CadProgram& program) {
  auto report = validate_grammar(program);
  if (!report.ok) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::InvalidProgram, v.rule + " at operation " + std::to_string(v.index) + ": " + v.message);
  }
  const double scale = program.scale();
  std::string out;
  out += "from fusion360gym_client import Fusion360GymClient\n";
  out += "\n";
  out += "client = Fusion360GymClient(\"http://127.0.0.1:8080\")\n";
  out += "client.clear()\n";

  auto curves = chain_curves(program.ops);
  std::size_t next_curve = 0;
  int sketch_no = 0;
  int extrude_no = 0;
  std::string sketch_var;
  for (std::size_t i = 0; i < program.ops.size(); ++i) {
    const CadOp& op = program.ops[i];
    switch (op.type) {
      case OpType::Sketch:
        sketch_var = "sketch_" + std::to_string(++sketch_no);
        out += "\n";
        out += "response = client.add_sketch(\"" + std::string(plane_name(*op.plane)) + "\")\n";
        out += sketch_var + " = response.json()[\"data\"][\"sketch_name\"]\n";
        break;
      case OpType::Line:
      case OpType::Arc:
      case OpType::Circle: {
        while (next_curve < curves.size() && curves[next_curve].op_index < i) ++next_curve;
        const ChainedCurve& c = curves[next_curve];
        if (op.type == OpType::Line) {
          out += "response = client.add_line(" + sketch_var + ", " + point(c.start, scale) + ", " +
                 point(c.end, scale) + ")\n";
        } else if (op.type == OpType::Arc) {
          ArcGeometry g;
          try {
            g = arc_center(c.start, c.end, c.sweep_deg);
          } catch (const Error& e) {
            throw Error(ErrorCode::InvalidProgram, "arc at operation " + std::to_string(i) + ": " + e.what());
          }
          out += "response = client.add_arc(" + sketch_var + ", " + point(c.start, scale) + ", " +
                 point(g.center, scale) + ", " + format_real(c.sweep_deg) + ")\n";
        } else {
          out += "response = client.add_circle(" + sketch_var + ", " + point(c.center, scale) + ", " +
                 format_real(c.radius * scale) + ")\n";
        }
        break;
      }
      case OpType::Extrude: {
        std::string profile = "profile_" + std::to_string(++extrude_no);
        out += "profiles = response.json()[\"data\"][\"profiles\"]\n";
        out += profile + " = list(profiles.keys())[" + std::to_string(op.profile_index) + "]\n";
        out += "response = client.add_extrude(" + sketch_var + ", " + profile + ", " +
               format_real(*op.depth * op.scale) + ", \"" + feature_operation(op.boolean_op) + "\")\n";
        break;
      }
      case OpType::Start:
      case OpType::End:
        break;
    }
  }
  out += "\n";
  out += "client.detach()\n";
  return out;
}

}  // namespace cadseq
