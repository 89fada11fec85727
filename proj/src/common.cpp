#include "symcover/common.hpp"

namespace symcover {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::EmptyBody: return "EmptyBody";
    case ErrorKind::Unbounded: return "Unbounded";
    case ErrorKind::DimMismatch: return "DimMismatch";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::OriginNotInterior: return "OriginNotInterior";
    case ErrorKind::UnsupportedBodyKind: return "UnsupportedBodyKind";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::NotIsotropic: return "NotIsotropic";
    case ErrorKind::NotCentered: return "NotCentered";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::UncoverableWitness: return "UncoverableWitness";
    case ErrorKind::SolverStall: return "SolverStall";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::ConfigParse: return "ConfigParse";
    case ErrorKind::BodyParse: return "BodyParse";
    case ErrorKind::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace symcover
