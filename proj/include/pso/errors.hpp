#pragma once

#include <stdexcept>
#include <string>

namespace pso {

/// Invalid problem, run configuration or strategy parameters.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The objective returned a non-finite value, or a position went non-finite.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed external problem file or results file.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A report was requested over a result table with missing cells.
class IncompleteDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pso
