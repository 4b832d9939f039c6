#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pairscale {

// Base classes map 1:1 onto CLI exit codes: validation -> 2,
// endpoint -> 3, estimation -> 4.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EndpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyRosterError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class DuplicateIdError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class NonPositiveCovariateError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class TooFewEntitiesError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownEntityError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class LengthMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ConstantVectorError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class MissingCovariateError : public ValidationError {
 public:
  MissingCovariateError(const std::string& entity_id, const std::string& field)
      : ValidationError("missing covariate '" + field + "' for entity '" +
                        entity_id + "'"),
        entity_id(entity_id),
        field(field) {}

  std::string entity_id;
  std::string field;
};

class DegenerateOutcomeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class CacheError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class EndpointUnreachableError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

class AuthFailureError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

// The comparison graph splits into more than one component; abilities are
// only jointly identifiable within a component.
class DisconnectedGraphError : public EstimationError {
 public:
  DisconnectedGraphError(std::string message,
                         std::vector<std::vector<std::string>> components)
      : EstimationError(std::move(message)), components(std::move(components)) {}

  std::vector<std::vector<std::string>> components;
};

// Some group of entities is never beaten (or never wins); its
// maximum-likelihood ability is infinite.
class SeparationError : public EstimationError {
 public:
  SeparationError(std::string message, std::vector<std::string> undefeated,
                  std::vector<std::string> winless)
      : EstimationError(std::move(message)),
        undefeated(std::move(undefeated)),
        winless(std::move(winless)) {}

  // For logistic regression: the predictor driving the divergence.
  SeparationError(std::string message, std::string predictor)
      : EstimationError(std::move(message)), predictor(std::move(predictor)) {}

  std::vector<std::string> undefeated;
  std::vector<std::string> winless;
  std::string predictor;
};

class SingularInformationError : public EstimationError {
 public:
  using EstimationError::EstimationError;
};

}  // namespace pairscale
