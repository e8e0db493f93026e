#include "mespot/error.hpp"

namespace mespot {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Argument: return "argument error";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Validation: return "validation error";
    case ErrorKind::Reference: return "reference error";
    case ErrorKind::Geometry: return "geometry error";
    case ErrorKind::Coverage: return "coverage error";
    case ErrorKind::SequenceTooShort: return "sequence too short";
    case ErrorKind::UndefinedMetric: return "undefined metric";
    case ErrorKind::Configuration: return "configuration error";
    case ErrorKind::Io: return "I/O error";
    case ErrorKind::Training: return "training error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace mespot
