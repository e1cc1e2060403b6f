#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace naloss {

enum class ErrorKind {
  InvalidDimension,
  OutOfRangeInteraction,
  InvalidCircuit,
  InvalidSize,
  InsufficientAtoms,
  RoutingFailure,
  CircuitTooLarge,
  NotEnoughDisjointTiles,
  EmptyInput,
  InvalidConfig,
  NonterminatingConfig,
};

std::string_view toString(ErrorKind kind);

/// Exception carrying a machine-checkable failure category.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(toString(kind)) + ": " + what),
        kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  /// True for errors caused by bad user input rather than a failed run.
  [[nodiscard]] bool isValidation() const noexcept {
    switch (kind_) {
    case ErrorKind::InvalidDimension:
    case ErrorKind::InvalidCircuit:
    case ErrorKind::InvalidSize:
    case ErrorKind::EmptyInput:
    case ErrorKind::InvalidConfig:
    case ErrorKind::NonterminatingConfig:
    case ErrorKind::CircuitTooLarge:
    case ErrorKind::NotEnoughDisjointTiles:
      return true;
    default:
      return false;
    }
  }

private:
  ErrorKind kind_;
};

inline std::string_view toString(ErrorKind kind) {
  switch (kind) {
  case ErrorKind::InvalidDimension:
    return "invalid-dimension";
  case ErrorKind::OutOfRangeInteraction:
    return "out-of-range-interaction";
  case ErrorKind::InvalidCircuit:
    return "invalid-circuit";
  case ErrorKind::InvalidSize:
    return "invalid-size";
  case ErrorKind::InsufficientAtoms:
    return "insufficient-atoms";
  case ErrorKind::RoutingFailure:
    return "routing-failure";
  case ErrorKind::CircuitTooLarge:
    return "circuit-too-large";
  case ErrorKind::NotEnoughDisjointTiles:
    return "not-enough-disjoint-tiles";
  case ErrorKind::EmptyInput:
    return "empty-input";
  case ErrorKind::InvalidConfig:
    return "invalid-config";
  case ErrorKind::NonterminatingConfig:
    return "nonterminating-config";
  }
  return "unknown";
}

} // namespace naloss
