#pragma once

#include <stdexcept>
#include <string>

namespace mono3d {

// Base class for all domain errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonPositiveDepth : Error {
  using Error::Error;
};

struct SingularProjection : Error {
  using Error::Error;
};

struct NonPositiveFocal : Error {
  using Error::Error;
};

struct InvalidFactor : Error {
  using Error::Error;
};

struct NonPositiveSigma : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct DegenerateProposal : Error {
  using Error::Error;
};

struct DegenerateEncoding : Error {
  using Error::Error;
};

struct DegenerateSequence : Error {
  using Error::Error;
};

struct EmptyGroundTruth : Error {
  using Error::Error;
};

struct InsufficientSamples : Error {
  using Error::Error;
};

struct Divergence : Error {
  using Error::Error;
};

// Parse errors carry the 1-based line number of the offending input line.
struct ParseError : Error {
  int line;
  ParseError(int line_, const std::string& msg) : Error(msg), line(line_) {}
};

struct FieldCountError : ParseError {
  int count;
  FieldCountError(int line_, int count_, const std::string& msg)
      : ParseError(line_, msg), count(count_) {}
};

struct NumericParseError : ParseError {
  int field;
  NumericParseError(int line_, int field_, const std::string& msg)
      : ParseError(line_, msg), field(field_) {}
};

struct MissingKey : Error {
  using Error::Error;
};

}  // namespace mono3d
