#pragma once

#include <span>
#include <string>

namespace critlab {

/**
 * Tail model s_N = s_inf + c N^{-gamma} for a level sequence N = 1..K.
 * gamma comes from a log-log regression of the last three increments
 * (|s_{N+1} - s_N| ~ N^{-(1+gamma)}); s_inf and c from least squares over
 * the last three levels.  gamma <= 0 means non-summable increments and the
 * limit is reported as +-inf in the direction of travel.
 */
struct Extrapolation {
  double gamma = 0.0;
  double limit = 0.0;
  double c = 0.0;
  double residual = 0.0;
  bool finite = true;
  bool terminal = false;  // last level is the whole domain; no extrapolation
  static constexpr const char* model = "s_N = s_inf + c*N^(-gamma)";
};

Extrapolation extrapolate(std::span<const double> seq);

// exhaustions that reach the domain at level K: the limit is the last value
Extrapolation terminal_value(std::span<const double> seq);

inline Extrapolation level_limit(std::span<const double> seq, bool terminal) {
  return terminal ? terminal_value(seq) : extrapolate(seq);
}

}  // namespace critlab
