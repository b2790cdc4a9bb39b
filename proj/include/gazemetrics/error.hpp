#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gazemetrics {

// Every failure surfaced by the library derives from Error. The CLI maps
// IoError to exit code 2 and everything else to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define GAZEMETRICS_DEFINE_ERROR(Name)  \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

GAZEMETRICS_DEFINE_ERROR(IoError);
GAZEMETRICS_DEFINE_ERROR(SchemaError);
GAZEMETRICS_DEFINE_ERROR(UnknownAoiName);
GAZEMETRICS_DEFINE_ERROR(DegeneratePolygon);
GAZEMETRICS_DEFINE_ERROR(ConfigError);
GAZEMETRICS_DEFINE_ERROR(AllMissing);
GAZEMETRICS_DEFINE_ERROR(WindowOutOfRange);
GAZEMETRICS_DEFINE_ERROR(MissingGeometry);
GAZEMETRICS_DEFINE_ERROR(UnsupportedOrder);
GAZEMETRICS_DEFINE_ERROR(LevelTooDeep);
GAZEMETRICS_DEFINE_ERROR(DegenerateInput);
GAZEMETRICS_DEFINE_ERROR(SegmentTooShort);
GAZEMETRICS_DEFINE_ERROR(RankDeficient);
GAZEMETRICS_DEFINE_ERROR(InsufficientData);
GAZEMETRICS_DEFINE_ERROR(SpecError);

#undef GAZEMETRICS_DEFINE_ERROR

// Errors tied to an input line; line numbers are 1-based and count the header.
class LineError : public Error {
 public:
  LineError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class ParseError : public LineError {
 public:
  using LineError::LineError;
};

class MonotonicityError : public LineError {
 public:
  using LineError::LineError;
};

}  // namespace gazemetrics
