#ifndef PMJP_ERRORS_HPP
#define PMJP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pmjp {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model file syntax or validation failure. line is 1-based, 0 when unknown.
struct parse_error : error {
  parse_error(int line_, const std::string& msg)
      : error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
        line(line_) {}
  int line;
};

struct validation_error : error {
  using error::error;
};

struct dimension_error : error {
  using error::error;
};

// Enumeration or simulation would exceed a configured cap.
struct resource_error : error {
  using error::error;
};

// Observations cannot be represented in the given state space.
struct infeasible_error : error {
  using error::error;
};

}  // namespace pmjp

#endif
