#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace abcmc {

// Invalid values: probabilities outside their range, empty inputs, bad sizes.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Mismatched dimensions between vectors, matrices or specs.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A requested capability does not exist, e.g. a model without an analytic
// mean map for the statistic in question.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Rejection step kept no rows for a model that is still needed downstream.
class InsufficientAcceptanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unusable experiment configuration. Carries the path of the offending
// field, e.g. "abc.tolerance_quantile".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field_path, const std::string& message)
      : std::runtime_error(field_path + ": " + message),
        field_path_(std::move(field_path)) {}

  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

}  // namespace abcmc
