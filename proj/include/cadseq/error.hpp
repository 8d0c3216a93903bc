#pragma once

#include <stdexcept>
#include <string>

namespace cadseq {

enum class ErrorCode {
  UnknownFunction = 1,
  ArityError,
  RangeError,
  SyntaxError,
  InvalidProgram,
  ProgramTooLong,
  MalformedRow,
  DegenerateChord,
  OpenProfile,
  SelfIntersecting,
  EmptyResult,
  ParseFailure,
  EmptyScene,
  DimensionMismatch,
  EmptyInput,
  LatticeMismatch,
  LengthMismatch,
  SynthesisExhausted,
  IoError,
  FormatError,
};

const char* error_code_name(ErrorCode code) noexcept;

// Domain error. `line` is the 1-based source line for text-format errors
// (0 when not applicable); `cause` refines ParseFailure.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, int line = 0);
  Error(ErrorCode code, ErrorCode cause, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCode cause() const noexcept { return cause_; }
  int line() const noexcept { return line_; }

 private:
  ErrorCode code_;
  ErrorCode cause_;
  int line_ = 0;
};

}  // namespace cadseq
