#pragma once

#include <string>

#include "cadseq/dsl.hpp"

namespace cadseq::test {

inline CadProgram cylinder() {
  return CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::circle(0.0, 0.0, 0.5), CadOp::extrude(1.0)});
}

inline CadProgram tri_prism() {
  return CadProgram::from_body({CadOp::sketch(Plane::XY), CadOp::line(0.8, 0.0), CadOp::line(0.0, 0.8),
                                CadOp::line(0.0, 0.0), CadOp::extrude(0.5)});
}

inline std::string data_path(const std::string& name) { return std::string(CADSEQ_TEST_DIR) + "/" + name; }

}  // namespace cadseq::test
