#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace causalsel {

enum class ErrorKind {
  kConfig,
  kData,
  kShape,
  kNumerical,
  kDegenerateInput,
  kDomain,
  kIo,
  kUnsupported,
};

std::string_view to_string(ErrorKind kind);

// Base of every error raised by the library. The kind is stable and is what
// the CLI prints as the machine-parseable part of its one-line error.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define CAUSALSEL_DEFINE_ERROR(Name, Kind)                                 \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& message) : Error(Kind, message) {}    \
  };

CAUSALSEL_DEFINE_ERROR(ConfigError, ErrorKind::kConfig)
CAUSALSEL_DEFINE_ERROR(DataError, ErrorKind::kData)
CAUSALSEL_DEFINE_ERROR(ShapeError, ErrorKind::kShape)
CAUSALSEL_DEFINE_ERROR(NumericalError, ErrorKind::kNumerical)
CAUSALSEL_DEFINE_ERROR(DegenerateInputError, ErrorKind::kDegenerateInput)
CAUSALSEL_DEFINE_ERROR(DomainError, ErrorKind::kDomain)
CAUSALSEL_DEFINE_ERROR(IoError, ErrorKind::kIo)
CAUSALSEL_DEFINE_ERROR(UnsupportedError, ErrorKind::kUnsupported)

#undef CAUSALSEL_DEFINE_ERROR

}  // namespace causalsel
