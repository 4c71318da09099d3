#pragma once

#include <stdexcept>
#include <string>

namespace descfilt {

enum class ErrorKind {
  InvalidMatrix,
  DimensionMismatch,
  InconsistentDynamics,
  NumericalBreakdown,
  InconsistentData,
  OutsideObservable,
  SingularMatrix,
  ParseError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base of every exception thrown by the library. `kind()` lets callers
/// (the CLI in particular) map failures onto stable exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define DESCFILT_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what)                             \
        : Error(ErrorKind::Name, what) {}                              \
  };

DESCFILT_DEFINE_ERROR(InvalidMatrix)
DESCFILT_DEFINE_ERROR(DimensionMismatch)
DESCFILT_DEFINE_ERROR(InconsistentDynamics)
DESCFILT_DEFINE_ERROR(NumericalBreakdown)
DESCFILT_DEFINE_ERROR(InconsistentData)
DESCFILT_DEFINE_ERROR(OutsideObservable)
DESCFILT_DEFINE_ERROR(SingularMatrix)
DESCFILT_DEFINE_ERROR(ParseError)

#undef DESCFILT_DEFINE_ERROR

}  // namespace descfilt
