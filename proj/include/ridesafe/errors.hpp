#pragma once

#include <stdexcept>
#include <string>

namespace ridesafe {

// Every error raised by the library derives from Error so that callers can
// catch the family and still switch on the concrete type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RIDESAFE_ERROR(name)              \
  class name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

RIDESAFE_ERROR(DomainError);
RIDESAFE_ERROR(SequencingError);
RIDESAFE_ERROR(ConfigError);
RIDESAFE_ERROR(FramingError);
RIDESAFE_ERROR(ChecksumError);
RIDESAFE_ERROR(UnsupportedSentence);
RIDESAFE_ERROR(FieldError);
RIDESAFE_ERROR(RangeError);
RIDESAFE_ERROR(EncodeError);
RIDESAFE_ERROR(NoData);
RIDESAFE_ERROR(NoLocation);
RIDESAFE_ERROR(NoComponents);

#undef RIDESAFE_ERROR

// Malformed trace record; carries the 1-based line number.
class TraceError : public Error {
 public:
  TraceError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace ridesafe
