#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cadseq {

// Operation codes as stored in the first column of a feature matrix.
enum class OpType : int {
  Sketch = 0,
  Line = 1,
  Arc = 2,
  Circle = 3,
  Extrude = 4,
  Start = 5,
  End = 6,
};

inline constexpr int kOpTypeCount = 7;

enum class Plane : int { XY = 0, XZ = 1, YZ = 2 };

enum class BooleanOp : int { Join = 0, Cut = 1, Intersect = 2, Add = 3 };

inline constexpr double kDefaultScale = 10.0;
inline constexpr int kDefaultProfileIndex = 0;
inline constexpr BooleanOp kDefaultBooleanOp = BooleanOp::Add;

// Rows in a feature matrix; also the longest program counted with its
// start and end marks.
inline constexpr int kMaxProgramRows = 10;

const char* op_type_name(OpType type) noexcept;
const char* plane_name(Plane plane) noexcept;
std::optional<Plane> plane_from_name(std::string_view name) noexcept;
bool is_curve(OpType type) noexcept;

// One CAD operation. Only the fields relevant to `type` are engaged; the
// rest stay empty (or at their fixed defaults for the extrude-only
// profile/boolean/scale triple).
struct CadOp {
  OpType type = OpType::Start;
  std::optional<Plane> plane;
  std::optional<double> x;
  std::optional<double> y;
  std::optional<double> sweep;   // normalized; degrees = sweep * 180
  std::optional<double> radius;  // normalized
  std::optional<double> depth;   // signed, normalized
  int profile_index = kDefaultProfileIndex;
  BooleanOp boolean_op = kDefaultBooleanOp;
  double scale = kDefaultScale;

  static CadOp start();
  static CadOp end();
  static CadOp sketch(Plane plane);
  static CadOp line(double x, double y);
  static CadOp arc(double x, double y, double sweep);
  static CadOp circle(double x, double y, double radius);
  static CadOp extrude(double depth, BooleanOp op = kDefaultBooleanOp);

  friend bool operator==(const CadOp&, const CadOp&) = default;
};

struct CadProgram {
  std::vector<CadOp> ops;

  // Wraps body operations with the start and end marks.
  static CadProgram from_body(std::vector<CadOp> body);

  // Operations strictly between the start mark and the first end mark.
  std::span<const CadOp> body() const;

  // World scale used by the program's extrusions.
  double scale() const;

  friend bool operator==(const CadProgram&, const CadProgram&) = default;
};

struct Violation {
  std::size_t index = 0;
  std::string rule;
  std::string message;
};

struct ValidationReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Text form: one `name(arg, ...)` call per line, `#` comments, blank lines.
// Throws Error with UnknownFunction/ArityError/RangeError/SyntaxError and
// the 1-based line number.
CadProgram parse_program(std::string_view text);

// Throws InvalidProgram when the program fails validate_grammar.
std::string emit_sim_gallery(const CadProgram& program);

// Longer script in the style of the Gallery client API. Text only.
std::string emit_gallery_script(const CadProgram& program);

// Total: never throws, reports every rule violation.
ValidationReport validate_grammar(const CadProgram& program);

// Decimal text that parses back to exactly `value`: six fractional digits
// when that suffices, otherwise the shortest exact fixed representation.
std::string format_real(double value);

}  // namespace cadseq
