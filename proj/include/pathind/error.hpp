#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pathind {

enum class ErrorKind {
  SingularMatrix,
  DimensionMismatch,
  NonFiniteValue,
  SyntaxError,
  UnknownIdentifier,
  ArityError,
  DomainError,
  UnboundVariable,
  NonFiniteState,
  UnstableParameters,
  NonPositiveW,
  ZeroDiffusion,
  QuadratureFailure,
  ConfigError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failure with the byte offset into the source text and the set of
// tokens that would have been accepted there.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected,
              const std::string& message);

  [[nodiscard]] std::size_t offset() const { return offset_; }
  [[nodiscard]] const std::vector<std::string>& expected() const {
    return expected_;
  }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

}  // namespace pathind
