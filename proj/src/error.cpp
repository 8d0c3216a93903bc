#include "cadseq/error.hpp"

namespace cadseq {

namespace {

std::string decorate(ErrorCode code, const std::string& message, int line) {
  std::string out = error_code_name(code);
  if (line > 0) out += " (line " + std::to_string(line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

const char* error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::ArityError: return "ArityError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::InvalidProgram: return "InvalidProgram";
    case ErrorCode::ProgramTooLong: return "ProgramTooLong";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DegenerateChord: return "DegenerateChord";
    case ErrorCode::OpenProfile: return "OpenProfile";
    case ErrorCode::SelfIntersecting: return "SelfIntersecting";
    case ErrorCode::EmptyResult: return "EmptyResult";
    case ErrorCode::ParseFailure: return "ParseFailure";
    case ErrorCode::EmptyScene: return "EmptyScene";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LatticeMismatch: return "LatticeMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::SynthesisExhausted: return "SynthesisExhausted";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, int line)
    : std::runtime_error(decorate(code, message, line)), code_(code), cause_(code), line_(line) {}

Error::Error(ErrorCode code, ErrorCode cause, const std::string& message)
    : std::runtime_error(decorate(code, message, 0)),
      code_(code),
      cause_(cause) {}

}  // namespace cadseq
