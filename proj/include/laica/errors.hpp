#pragma once

#include <stdexcept>
#include <string>

namespace laica {

struct LaicaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when an environment is stepped with an action that the registry has
// not yet released. Always a scheduling bug upstream.
struct ActionUnavailable : LaicaError {
  explicit ActionUnavailable(int action_id)
      : LaicaError("action not yet available: " + std::to_string(action_id)), action_id(action_id) {}
  int action_id;
};

struct NoAvailableActions : LaicaError {
  NoAvailableActions() : LaicaError("no available actions") {}
};

// Non-finite TD error, parameter, or network output.
struct Divergence : LaicaError {
  using LaicaError::LaicaError;
};

struct ShapeError : LaicaError {
  using LaicaError::LaicaError;
};

struct DomainError : LaicaError {
  using LaicaError::LaicaError;
};

// Configuration problems carry the offending field path for the CLI diagnostic.
struct ConfigError : LaicaError {
  ConfigError(std::string field, const std::string& what)
      : LaicaError(field.empty() ? what : field + ": " + what), field(std::move(field)) {}
  std::string field;
};

}  // namespace laica
