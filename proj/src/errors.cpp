#include "causalsel/errors.hpp"

namespace causalsel {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kConfig:
      return "config";
    case ErrorKind::kData:
      return "data";
    case ErrorKind::kShape:
      return "shape";
    case ErrorKind::kNumerical:
      return "numerical";
    case ErrorKind::kDegenerateInput:
      return "degenerate_input";
    case ErrorKind::kDomain:
      return "domain";
    case ErrorKind::kIo:
      return "io";
    case ErrorKind::kUnsupported:
      return "unsupported";
  }
  return "unknown";
}

}  // namespace causalsel
