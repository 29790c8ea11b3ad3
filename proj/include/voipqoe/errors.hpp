#pragma once

#include <stdexcept>
#include <string>

namespace voipqoe {

/// Input outside a model's validity domain (negative delay, loss > 10 % without
/// extrapolation, MOS outside [1, 4.5] for the inverse conversion, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid codec profile or model configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Least-squares fit could not be carried out (too few samples, rank deficiency).
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or invalid input data (CSV rows, metric lines, MAPE inputs).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace voipqoe
