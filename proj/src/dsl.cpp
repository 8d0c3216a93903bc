#include "cadseq/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <variant>

#include "cadseq/error.hpp"

namespace cadseq {

const char* op_type_name(OpType type) noexcept {
  switch (type) {
    case OpType::Sketch: return "sketch";
    case OpType::Line: return "line";
    case OpType::Arc: return "arc";
    case OpType::Circle: return "circle";
    case OpType::Extrude: return "extrude";
    case OpType::Start: return "start";
    case OpType::End: return "end";
  }
  return "unknown";
}

const char* plane_name(Plane plane) noexcept {
  switch (plane) {
    case Plane::XY: return "XY";
    case Plane::XZ: return "XZ";
    case Plane::YZ: return "YZ";
  }
  return "??";
}

std::optional<Plane> plane_from_name(std::string_view name) noexcept {
  if (name == "XY") return Plane::XY;
  if (name == "XZ") return Plane::XZ;
  if (name == "YZ") return Plane::YZ;
  return std::nullopt;
}

bool is_curve(OpType type) noexcept {
  return type == OpType::Line || type == OpType::Arc || type == OpType::Circle;
}

CadOp CadOp::start() { return CadOp{}; }

CadOp CadOp::end() {
  CadOp op;
  op.type = OpType::End;
  return op;
}

CadOp CadOp::sketch(Plane plane) {
  CadOp op;
  op.type = OpType::Sketch;
  op.plane = plane;
  return op;
}

CadOp CadOp::line(double x, double y) {
  CadOp op;
  op.type = OpType::Line;
  op.x = x;
  op.y = y;
  return op;
}

CadOp CadOp::arc(double x, double y, double sweep) {
  CadOp op;
  op.type = OpType::Arc;
  op.x = x;
  op.y = y;
  op.sweep = sweep;
  return op;
}

CadOp CadOp::circle(double x, double y, double radius) {
  CadOp op;
  op.type = OpType::Circle;
  op.x = x;
  op.y = y;
  op.radius = radius;
  return op;
}

CadOp CadOp::extrude(double depth, BooleanOp boolean_op) {
  CadOp op;
  op.type = OpType::Extrude;
  op.depth = depth;
  op.boolean_op = boolean_op;
  return op;
}

CadProgram CadProgram::from_body(std::vector<CadOp> body) {
  CadProgram program;
  program.ops.reserve(body.size() + 2);
  program.ops.push_back(CadOp::start());
  for (auto& op : body) program.ops.push_back(std::move(op));
  program.ops.push_back(CadOp::end());
  return program;
}

std::span<const CadOp> CadProgram::body() const {
  std::size_t first = (!ops.empty() && ops.front().type == OpType::Start) ? 1 : 0;
  std::size_t last = first;
  while (last < ops.size() && ops[last].type != OpType::End) ++last;
  return std::span<const CadOp>(ops).subspan(first, last - first);
}

double CadProgram::scale() const {
  for (const auto& op : ops) {
    if (op.type == OpType::Extrude) return op.scale;
  }
  return kDefaultScale;
}

namespace {

bool in_coord_range(double v) { return std::isfinite(v) && v >= -1.0 && v <= 1.0; }
bool in_unit_range(double v) { return std::isfinite(v) && v > 0.0 && v <= 1.0; }
bool in_depth_range(double v) { return in_coord_range(v) && v != 0.0; }

// ---------------------------------------------------------------------------
// Text parsing

using Arg = std::variant<double, std::string>;

struct Call {
  std::string name;
  std::vector<Arg> args;
};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view strip_comment(std::string_view line) {
  char quote = 0;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#') {
      return line.substr(0, i);
    }
  }
  return line;
}

Arg parse_arg(std::string_view token, int line_no) {
  token = trim(token);
  if (token.empty()) throw Error(ErrorCode::SyntaxError, "empty argument", line_no);
  char q = token.front();
  if (q == '"' || q == '\'') {
    if (token.size() < 2 || token.back() != q) {
      throw Error(ErrorCode::SyntaxError, "unterminated string literal", line_no);
    }
    return std::string(token.substr(1, token.size() - 2));
  }
  std::string_view digits = token;
  if (digits.front() == '+') digits.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size() || !std::isfinite(value)) {
    throw Error(ErrorCode::SyntaxError, "malformed number '" + std::string(token) + "'", line_no);
  }
  return value;
}

Call parse_call(std::string_view line, int line_no) {
  std::size_t i = 0;
  auto is_ident = [](char c, bool first) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
           (!first && std::isdigit(static_cast<unsigned char>(c)));
  };
  while (i < line.size() && is_ident(line[i], i == 0)) ++i;
  if (i == 0) throw Error(ErrorCode::SyntaxError, "expected a function name", line_no);
  Call call{std::string(line.substr(0, i)), {}};
  std::string_view rest = trim(line.substr(i));
  if (rest.empty() || rest.front() != '(') {
    throw Error(ErrorCode::SyntaxError, "expected '(' after '" + call.name + "'", line_no);
  }
  if (rest.back() != ')') throw Error(ErrorCode::SyntaxError, "expected ')' at end of call", line_no);
  std::string_view inner = trim(rest.substr(1, rest.size() - 2));
  if (inner.empty()) return call;

  char quote = 0;
  std::size_t start = 0;
  for (std::size_t k = 0; k <= inner.size(); ++k) {
    if (k < inner.size()) {
      char c = inner[k];
      if (quote) {
        if (c == quote) quote = 0;
        continue;
      }
      if (c == '"' || c == '\'') {
        quote = c;
        continue;
      }
      if (c == '(' || c == ')') throw Error(ErrorCode::SyntaxError, "unexpected parenthesis", line_no);
      if (c != ',') continue;
    }
    call.args.push_back(parse_arg(inner.substr(start, k - start), line_no));
    start = k + 1;
  }
  if (quote) throw Error(ErrorCode::SyntaxError, "unterminated string literal", line_no);
  return call;
}

double number_arg(const Call& call, std::size_t index, int line_no) {
  if (const double* v = std::get_if<double>(&call.args[index])) return *v;
  throw Error(ErrorCode::SyntaxError,
              call.name + ": argument " + std::to_string(index + 1) + " must be a number", line_no);
}

int integer_arg(const Call& call, std::size_t index, int line_no) {
  double v = number_arg(call, index, line_no);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw Error(ErrorCode::RangeError,
                call.name + ": argument " + std::to_string(index + 1) + " must be an integer", line_no);
  }
  return static_cast<int>(v);
}

void expect_arity(const Call& call, std::size_t lo, std::size_t hi, int line_no) {
  std::size_t n = call.args.size();
  if (n < lo || n > hi) {
    std::string want = lo == hi ? std::to_string(lo) : std::to_string(lo) + "-" + std::to_string(hi);
    throw Error(ErrorCode::ArityError,
                call.name + " takes " + want + " argument(s), got " + std::to_string(n), line_no);
  }
}

void check_range(bool ok, const Call& call, const char* what, double value, int line_no) {
  if (!ok) {
    throw Error(ErrorCode::RangeError,
                call.name + ": " + what + " " + format_real(value) + " is out of range", line_no);
  }
}

Plane plane_arg(const Call& call, int line_no) {
  if (const auto* s = std::get_if<std::string>(&call.args[0])) {
    if (auto p = plane_from_name(*s)) return *p;
    throw Error(ErrorCode::RangeError, "add_sketch: unknown plane '" + *s + "'", line_no);
  }
  int id = integer_arg(call, 0, line_no);
  if (id < 0 || id > 2) {
    throw Error(ErrorCode::RangeError, "add_sketch: plane id " + std::to_string(id) + " is out of range",
                line_no);
  }
  return static_cast<Plane>(id);
}

BooleanOp boolean_arg(const Call& call, std::size_t index, int line_no) {
  if (const auto* s = std::get_if<std::string>(&call.args[index])) {
    if (*s == "join") return BooleanOp::Join;
    if (*s == "cut") return BooleanOp::Cut;
    if (*s == "intersect") return BooleanOp::Intersect;
    if (*s == "add") return BooleanOp::Add;
    throw Error(ErrorCode::RangeError, "add_extrude: unknown boolean operation '" + *s + "'", line_no);
  }
  int id = integer_arg(call, index, line_no);
  if (id < 0 || id > 3) {
    throw Error(ErrorCode::RangeError,
                "add_extrude: boolean operation " + std::to_string(id) + " is out of range", line_no);
  }
  return static_cast<BooleanOp>(id);
}

CadOp op_from_call(const Call& call, int line_no) {
  if (call.name == "add_sketch") {
    expect_arity(call, 1, 1, line_no);
    return CadOp::sketch(plane_arg(call, line_no));
  }
  if (call.name == "add_line") {
    expect_arity(call, 2, 2, line_no);
    double x = number_arg(call, 0, line_no), y = number_arg(call, 1, line_no);
    check_range(in_coord_range(x), call, "x", x, line_no);
    check_range(in_coord_range(y), call, "y", y, line_no);
    return CadOp::line(x, y);
  }
  if (call.name == "add_arc") {
    expect_arity(call, 3, 3, line_no);
    double x = number_arg(call, 0, line_no), y = number_arg(call, 1, line_no);
    double sweep = number_arg(call, 2, line_no);
    check_range(in_coord_range(x), call, "x", x, line_no);
    check_range(in_coord_range(y), call, "y", y, line_no);
    check_range(in_unit_range(sweep), call, "sweep", sweep, line_no);
    return CadOp::arc(x, y, sweep);
  }
  if (call.name == "add_circle") {
    expect_arity(call, 3, 3, line_no);
    double x = number_arg(call, 0, line_no), y = number_arg(call, 1, line_no);
    double r = number_arg(call, 2, line_no);
    check_range(in_coord_range(x), call, "x", x, line_no);
    check_range(in_coord_range(y), call, "y", y, line_no);
    check_range(in_unit_range(r), call, "radius", r, line_no);
    return CadOp::circle(x, y, r);
  }
  if (call.name == "add_extrude") {
    expect_arity(call, 2, 3, line_no);
    int profile = integer_arg(call, 0, line_no);
    if (profile < 0) {
      throw Error(ErrorCode::RangeError, "add_extrude: profile index must be non-negative", line_no);
    }
    double depth = number_arg(call, 1, line_no);
    check_range(in_depth_range(depth), call, "depth", depth, line_no);
    BooleanOp op = call.args.size() == 3 ? boolean_arg(call, 2, line_no) : kDefaultBooleanOp;
    // The profile argument is accepted but the index stays at its default.
    return CadOp::extrude(depth, op);
  }
  throw Error(ErrorCode::UnknownFunction, "unknown function '" + call.name + "'", line_no);
}

// ---------------------------------------------------------------------------
// Validation

void add_violation(ValidationReport& report, std::size_t index, std::string rule, std::string message) {
  report.ok = false;
  report.violations.push_back({index, std::move(rule), std::move(message)});
}

void check_fields(const CadOp& op, std::size_t i, ValidationReport& report) {
  auto need = [&](bool present, const char* field) {
    if (!present) add_violation(report, i, "missing-field", std::string(op_type_name(op.type)) + " needs " + field);
  };
  auto unused = [&](bool present, const char* field) {
    if (present) {
      add_violation(report, i, "unused-field",
                    std::string(op_type_name(op.type)) + " must not carry " + field);
    }
  };
  auto range = [&](const std::optional<double>& v, bool (*ok)(double), const char* field) {
    if (v && !ok(*v)) add_violation(report, i, "range", std::string(field) + " out of range");
  };
  const bool sketch = op.type == OpType::Sketch;
  const bool point = op.type == OpType::Line || op.type == OpType::Arc || op.type == OpType::Circle;
  const bool arc = op.type == OpType::Arc;
  const bool circle = op.type == OpType::Circle;
  const bool extrude = op.type == OpType::Extrude;

  if (sketch) {
    need(op.plane.has_value(), "plane");
  } else {
    unused(op.plane.has_value(), "plane");
  }
  if (op.plane && (static_cast<int>(*op.plane) < 0 || static_cast<int>(*op.plane) > 2)) {
    add_violation(report, i, "range", "plane out of range");
  }
  if (point) {
    need(op.x.has_value(), "x");
    need(op.y.has_value(), "y");
  } else {
    unused(op.x.has_value(), "x");
    unused(op.y.has_value(), "y");
  }
  arc ? need(op.sweep.has_value(), "sweep") : unused(op.sweep.has_value(), "sweep");
  circle ? need(op.radius.has_value(), "radius") : unused(op.radius.has_value(), "radius");
  extrude ? need(op.depth.has_value(), "depth") : unused(op.depth.has_value(), "depth");
  range(op.x, in_coord_range, "x");
  range(op.y, in_coord_range, "y");
  range(op.sweep, in_unit_range, "sweep");
  range(op.radius, in_unit_range, "radius");
  range(op.depth, in_depth_range, "depth");
  int b = static_cast<int>(op.boolean_op);
  if (b < 0 || b > 3) add_violation(report, i, "range", "boolean operation out of range");
  if (!(op.scale > 0.0) || !std::isfinite(op.scale)) add_violation(report, i, "range", "scale must be positive");
  if (op.profile_index != kDefaultProfileIndex) {
    add_violation(report, i, "range", "profile index is fixed at 0");
  }
}

}  // namespace

CadProgram parse_program(std::string_view text) {
  std::vector<CadOp> body;
  int line_no = 0;
  for (;;) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = trim(strip_comment(text.substr(0, nl)));
    if (!line.empty()) body.push_back(op_from_call(parse_call(line, line_no), line_no));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return CadProgram::from_body(std::move(body));
}

ValidationReport validate_grammar(const CadProgram& program) {
  ValidationReport report;
  const auto& ops = program.ops;
  if (ops.empty() || ops.front().type != OpType::Start) {
    add_violation(report, 0, "missing-start", "program must begin with the start mark");
  }
  std::size_t first_end = ops.size();
  for (std::size_t i = 0; i < ops.size(); ++i) {
    int code = static_cast<int>(ops[i].type);
    if (code < 0 || code >= kOpTypeCount) {
      add_violation(report, i, "unknown-op", "operation code " + std::to_string(code) + " is not defined");
    }
    if (ops[i].type == OpType::End) {
      first_end = i;
      break;
    }
  }
  if (first_end == ops.size()) {
    add_violation(report, ops.size(), "missing-end", "program must end with the end mark");
  }
  for (std::size_t i = first_end; i < ops.size(); ++i) {
    if (ops[i].type != OpType::End) add_violation(report, i, "op-after-end", "only end padding may follow the end mark");
  }
  std::size_t rows = first_end == ops.size() ? ops.size() : first_end + 1;
  if (rows > static_cast<std::size_t>(kMaxProgramRows)) {
    add_violation(report, kMaxProgramRows, "too-long",
                  "program has " + std::to_string(rows) + " rows; at most " +
                      std::to_string(kMaxProgramRows) + " are allowed");
  }

  bool in_sketch = false;
  int curves_since_sketch = 0;
  for (std::size_t i = 0; i < std::min(first_end, ops.size()); ++i) {
    const CadOp& op = ops[i];
    check_fields(op, i, report);
    switch (op.type) {
      case OpType::Start:
        if (i != 0) add_violation(report, i, "start-in-body", "start mark may only appear first");
        break;
      case OpType::Sketch:
        in_sketch = true;
        curves_since_sketch = 0;
        break;
      case OpType::Line:
      case OpType::Arc:
      case OpType::Circle:
        if (!in_sketch) add_violation(report, i, "curve-without-sketch", "curve must follow a sketch");
        ++curves_since_sketch;
        break;
      case OpType::Extrude:
        if (curves_since_sketch == 0) {
          add_violation(report, i, "extrude-without-profile", "extrude needs at least one curve since the last sketch");
        }
        in_sketch = false;
        curves_since_sketch = 0;
        break;
      case OpType::End:
        break;
    }
  }
  return report;
}

std::string format_real(double value) {
  char buf[64];
  if (value == 0.0) value = 0.0;  // drop negative zero
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, 6);
  std::string text(buf, res.ptr);
  double back = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), back);
  if (back == value) return text;
  res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

std::string emit_sim_gallery(const CadProgram& program) {
  auto report = validate_grammar(program);
  if (!report.ok) {
    const auto& v = report.violations.front();
    throw Error(ErrorCode::InvalidProgram, v.rule + " at operation " + std::to_string(v.index) + ": " + v.message);
  }
  std::string out;
  for (const CadOp& op : program.body()) {
    switch (op.type) {
      case OpType::Sketch:
        out += "add_sketch(\"";
        out += plane_name(*op.plane);
        out += "\")\n";
        break;
      case OpType::Line:
        out += "add_line(" + format_real(*op.x) + ", " + format_real(*op.y) + ")\n";
        break;
      case OpType::Arc:
        out += "add_arc(" + format_real(*op.x) + ", " + format_real(*op.y) + ", " + format_real(*op.sweep) + ")\n";
        break;
      case OpType::Circle:
        out += "add_circle(" + format_real(*op.x) + ", " + format_real(*op.y) + ", " + format_real(*op.radius) +
               ")\n";
        break;
      case OpType::Extrude:
        out += "add_extrude(" + std::to_string(op.profile_index) + ", " + format_real(*op.depth);
        if (op.boolean_op != kDefaultBooleanOp) out += ", " + std::to_string(static_cast<int>(op.boolean_op));
        out += ")\n";
        break;
      case OpType::Start:
      case OpType::End:
        break;
    }
  }
  return out;
}

}  // namespace cadseq
