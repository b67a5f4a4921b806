#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace adam3 {

/// Invalid dimensions, hyperparameters, or game parameters.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A coordinate of the second-moment scaler reached zero, so the
/// inverse-square-root direction is undefined.
class degenerate_scaling_error : public std::runtime_error {
 public:
  explicit degenerate_scaling_error(std::size_t coordinate, std::uint64_t iteration)
      : std::runtime_error("degenerate scaling: v-tilde coordinate " +
                           std::to_string(coordinate) + " is zero at iteration " +
                           std::to_string(iteration)),
        coordinate(coordinate),
        iteration(iteration) {}

  std::size_t coordinate;
  std::uint64_t iteration;
};

/// Hyperparameters outside the admissible region of the bound calculators.
class infeasible_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Filesystem failure while writing run artifacts.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration text; carries the 1-based source position.
class parse_error : public std::runtime_error {
 public:
  parse_error(std::string msg, std::size_t line, std::size_t column)
      : std::runtime_error(std::move(msg)), line(line), column(column) {}

  std::size_t line;
  std::size_t column;
};

}  // namespace adam3
