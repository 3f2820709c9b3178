#include "pathind/error.hpp"

namespace pathind {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorKind::ArityError: return "ArityError";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::UnboundVariable: return "UnboundVariable";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::UnstableParameters: return "UnstableParameters";
    case ErrorKind::NonPositiveW: return "NonPositiveW";
    case ErrorKind::ZeroDiffusion: return "ZeroDiffusion";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

std::string format_syntax(std::size_t offset,
                          const std::vector<std::string>& expected,
                          const std::string& message) {
  std::string out = "at offset " + std::to_string(offset) + ": " + message;
  if (!expected.empty()) {
    out += " (expected one of:";
    for (const auto& e : expected) out += " " + e;
    out += ")";
  }
  return out;
}

}  // namespace

SyntaxError::SyntaxError(std::size_t offset, std::vector<std::string> expected,
                         const std::string& message)
    : Error(ErrorKind::SyntaxError, format_syntax(offset, expected, message)),
      offset_(offset),
      expected_(std::move(expected)) {}

}  // namespace pathind
