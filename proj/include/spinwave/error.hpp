#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spinwave {

enum class ErrorKind {
  Contract,
  Index,
  DegenerateMetric,
  Parse,
  Weight,
  IllPosedIdentity,
  UnsupportedExpression,
  UnboundKernel,
  InvalidRule,
  Bivector,
  Spinor,
  Grid,
  Domain,
  IntegrationFailure,
  Config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure carrying the character offset into the input.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& what)
      : Error(ErrorKind::Parse,
              "at position " + std::to_string(position) + ": " + what),
        position_(position),
        detail_(what) {}

  std::size_t position() const { return position_; }
  const std::string& detail() const { return detail_; }

 private:
  std::size_t position_;
  std::string detail_;
};

}  // namespace spinwave
