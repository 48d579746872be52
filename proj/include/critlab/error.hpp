#pragma once

#include <stdexcept>
#include <string>

namespace critlab {

enum class ErrorCode {
  invalid_argument,
  empty_domain,
  disconnected_domain,
  marker_outside,
  truncated_exhaustion,
  ellipticity,
  non_finite,
  nonpositive,
  indefinite,
  not_converged,
  no_admissible_level,
  io,
  schema,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace critlab
