#include <doctest.h>

#include <random>

#include "cadseq/dsl.hpp"
#include "cadseq/error.hpp"
#include "cadseq/io.hpp"
#include "cadseq/synth.hpp"
#include "test_helpers.hpp"

using namespace cadseq;

namespace {

ErrorCode parse_error(const std::string& text, int* line = nullptr) {
  try {
    parse_program(text);
  } catch (const Error& e) {
    if (line) *line = e.line();
    return e.code();
  }
  FAIL("expected a parse error for: " << text);
  return ErrorCode::FormatError;
}

bool has_rule(const ValidationReport& r, const std::string& rule) {
  for (const auto& v : r.violations) {
    if (v.rule == rule) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("cylinder text parses to five operations") {
  auto p = parse_program("add_sketch(\"XY\")\nadd_circle(0.0, 0.0, 0.5)\nadd_extrude(0, 1.0)\n");
  REQUIRE(p.ops.size() == 5);
  CHECK(p.ops[0].type == OpType::Start);
  CHECK(p.ops[1] == CadOp::sketch(Plane::XY));
  CHECK(p.ops[2] == CadOp::circle(0.0, 0.0, 0.5));
  CHECK(p.ops[3] == CadOp::extrude(1.0));
  CHECK(p.ops[4].type == OpType::End);
  CHECK(p == test::cylinder());
  CHECK(p.scale() == 10.0);
}

TEST_CASE("empty text is the empty program") {
  auto p = parse_program("");
  REQUIRE(p.ops.size() == 2);
  CHECK(p.ops[0].type == OpType::Start);
  CHECK(p.ops[1].type == OpType::End);
  CHECK(parse_program("\n  # only a comment\n\n") == p);
  CHECK(emit_sim_gallery(p).empty());
}

TEST_CASE("plane accepted by name or id") {
  for (int id = 0; id < 3; ++id) {
    auto by_id = parse_program("add_sketch(" + std::to_string(id) + ")");
    auto by_name = parse_program(std::string("add_sketch(\"") + plane_name(static_cast<Plane>(id)) + "\")");
    CHECK(by_id == by_name);
    CHECK(*by_id.ops[1].plane == static_cast<Plane>(id));
  }
}

TEST_CASE("comments, whitespace and optional boolean argument") {
  auto p = parse_program(
      "  add_sketch( 'YZ' )   # trailing comment\n"
      "add_line(0.5, -0.25)\n"
      "add_arc(0, 0, 0.5)\n"
      "add_extrude(0, -0.5, \"cut\")\n");
  REQUIRE(p.ops.size() == 6);
  CHECK(*p.ops[1].plane == Plane::YZ);
  CHECK(p.ops[4].boolean_op == BooleanOp::Cut);
  CHECK(*p.ops[4].depth == -0.5);
  CHECK(parse_program("add_sketch(0)\nadd_circle(0,0,1)\nadd_extrude(0, 1, 0)").ops[3].boolean_op == BooleanOp::Join);
}

TEST_CASE("parse errors carry codes and 1-based line numbers") {
  int line = 0;
  CHECK(parse_error("add_sketch(\"XY\")\nadd_circle(0,0,1.5)", &line) == ErrorCode::RangeError);
  CHECK(line == 2);
  CHECK(parse_error("\n\nadd_polygon(1)", &line) == ErrorCode::UnknownFunction);
  CHECK(line == 3);
  CHECK(parse_error("add_line(0.1)", &line) == ErrorCode::ArityError);
  CHECK(line == 1);
  CHECK(parse_error("add_line(0.1, 0.2", &line) == ErrorCode::SyntaxError);
  CHECK(parse_error("add_line 0.1, 0.2") == ErrorCode::SyntaxError);
  CHECK(parse_error("add_line(0.1, abc)") == ErrorCode::SyntaxError);
  CHECK(parse_error("add_sketch(\"XW\")") == ErrorCode::RangeError);
  CHECK(parse_error("add_sketch(3)") == ErrorCode::RangeError);
  CHECK(parse_error("add_line(1.5, 0)") == ErrorCode::RangeError);
  CHECK(parse_error("add_arc(0.1, 0.1, 0)") == ErrorCode::RangeError);
  CHECK(parse_error("add_arc(0.1, 0.1, 1.01)") == ErrorCode::RangeError);
  CHECK(parse_error("add_circle(0, 0, 0)") == ErrorCode::RangeError);
  CHECK(parse_error("add_extrude(0, 0)") == ErrorCode::RangeError);
  CHECK(parse_error("add_extrude(0, -1.5)") == ErrorCode::RangeError);
  CHECK(parse_error("add_extrude(0, 1, 7)") == ErrorCode::RangeError);
}

TEST_CASE("emit writes six fractional digits") {
  CHECK(emit_sim_gallery(test::cylinder()) ==
        "add_sketch(\"XY\")\nadd_circle(0.000000, 0.000000, 0.500000)\nadd_extrude(0, 1.000000)\n");
  CHECK(format_real(0.5) == "0.500000");
  CHECK(format_real(-1.0) == "-1.000000");
  CHECK(format_real(0.99609375) == "0.99609375");
}

TEST_CASE("format_real always parses back exactly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    double v = u(rng);
    CHECK(std::stod(format_real(v)) == v);
  }
}

TEST_CASE("text round trip on every template sequence") {
  for (const auto& seq : template_sequences()) {
    for (SynthMode mode : {SynthMode::Random, SynthMode::Rules}) {
      for (std::uint64_t s = 0; s < 20; ++s) {
        Rng rng(sample_seed(s, 99));
        CadProgram raw = draw_template_program(seq, mode, rng);
        CAPTURE(seq.id);
        CHECK(parse_program(emit_sim_gallery(raw)) == raw);
        CadProgram snapped = snap_to_bins(raw);
        CHECK(parse_program(emit_sim_gallery(snapped)) == snapped);
      }
    }
  }
}

TEST_CASE("emit rejects invalid programs") {
  CadProgram bad = CadProgram::from_body({CadOp::extrude(1.0)});
  CHECK_THROWS_AS(emit_sim_gallery(bad), Error);
  try {
    emit_gallery_script(bad);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidProgram);
  }
}

TEST_CASE("grammar validation") {
  CHECK(validate_grammar(test::cylinder()).ok);

  auto r = validate_grammar(CadProgram::from_body({CadOp::extrude(1.0)}));
  CHECK_FALSE(r.ok);
  CHECK(has_rule(r, "extrude-without-profile"));

  // A pure sketch is grammatical; geometry decides it makes no solid.
  CHECK(validate_grammar(CadProgram::from_body(
                             {CadOp::sketch(Plane::XY), CadOp::line(1, 0), CadOp::line(1, 1), CadOp::line(0, 0)}))
            .ok);

  CHECK(has_rule(validate_grammar(CadProgram::from_body({CadOp::line(0.5, 0.5)})), "curve-without-sketch"));
  CHECK(has_rule(validate_grammar(CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::circle(0, 0, 0.5),
                                                         CadOp::extrude(1.0), CadOp::line(0.5, 0.5)})),
                 "curve-without-sketch"));
  CHECK(has_rule(validate_grammar(CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::circle(0, 0, 0.5),
                                                         CadOp::extrude(1.0), CadOp::extrude(1.0)})),
                 "extrude-without-profile"));

  CadProgram no_start = test::cylinder();
  no_start.ops.erase(no_start.ops.begin());
  CHECK(has_rule(validate_grammar(no_start), "missing-start"));

  CadProgram no_end = test::cylinder();
  no_end.ops.pop_back();
  CHECK(has_rule(validate_grammar(no_end), "missing-end"));

  CadProgram padded = test::cylinder();
  padded.ops.push_back(CadOp::end());
  CHECK(validate_grammar(padded).ok);
  padded.ops.push_back(CadOp::line(0.1, 0.1));
  padded.ops.push_back(CadOp::end());
  CHECK(has_rule(validate_grammar(padded), "op-after-end"));

  CadProgram second_start = test::cylinder();
  second_start.ops.insert(second_start.ops.begin() + 2, CadOp::start());
  CHECK(has_rule(validate_grammar(second_start), "start-in-body"));

  std::vector<CadOp> body{CadOp::sketch(Plane::XY)};
  for (int i = 0; i < 7; ++i) body.push_back(CadOp::line(0.1 * i, 0.1));
  body.push_back(CadOp::extrude(1.0));
  CHECK(has_rule(validate_grammar(CadProgram::from_body(body)), "too-long"));

  CadOp unused = CadOp::line(0.1, 0.2);
  unused.radius = 0.3;
  CHECK(has_rule(validate_grammar(CadProgram::from_body({CadOp::sketch(Plane::XY), unused})), "unused-field"));

  CadOp missing = CadOp::line(0.1, 0.2);
  missing.y.reset();
  CHECK(has_rule(validate_grammar(CadProgram::from_body({CadOp::sketch(Plane::XY), missing})), "missing-field"));

  CadOp out_of_range = CadOp::circle(0.0, 0.0, 0.5);
  out_of_range.radius = 2.0;
  CHECK(has_rule(validate_grammar(CadProgram::from_body({CadOp::sketch(Plane::XY), out_of_range})), "range"));
}

TEST_CASE("validation is total over arbitrary operation sequences") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    CadProgram p;
    int n = static_cast<int>(rng() % 14);
    for (int k = 0; k < n; ++k) {
      CadOp op;
      op.type = static_cast<OpType>(rng() % 9);  // includes codes outside 0..6
      if (rng() % 2) op.x = static_cast<double>(rng() % 5) - 2.0;
      if (rng() % 2) op.depth = 0.0;
      p.ops.push_back(op);
    }
    ValidationReport r;
    CHECK_NOTHROW(r = validate_grammar(p));
    CHECK(r.ok == r.violations.empty());
  }
}

TEST_CASE("gallery script for the tri-prism matches the reviewed golden file") {
  auto golden = io::read_text(test::data_path("golden/tri_prism_gallery.py"));
  auto prism = parse_program(io::read_text(test::data_path("data/tri_prism.txt")));
  CHECK(emit_gallery_script(prism) == golden);
}

TEST_CASE("gallery script structure") {
  auto script = emit_gallery_script(test::cylinder());
  CHECK(script.find("client.add_sketch(\"XY\")") != std::string::npos);
  CHECK(script.find("client.add_circle(") != std::string::npos);
  CHECK(script.find("5.000000)") != std::string::npos);
  CHECK(script.find("client.add_extrude(sketch_1, profile_1, 10.000000") != std::string::npos);

  auto empty = emit_gallery_script(parse_program(""));
  CHECK(empty.find("client.clear()") != std::string::npos);
  CHECK(empty.find("client.detach()") != std::string::npos);
  CHECK(empty.find("add_sketch") == std::string::npos);
}
