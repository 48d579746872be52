#pragma once

#include <string>

#include "critlab/config.hpp"
#include "critlab/grid.hpp"
#include "critlab/operator.hpp"

namespace testing {

using namespace critlab;

inline Domain line(double lo, double hi, double h) {
  return build_domain(GridSpec::make(1, {lo, 0, 0}, {hi, 0, 0}, h, false), Shape::box());
}

inline DiscreteOperator laplacian(const Domain& d, double A = 1.0) {
  return DiscreteOperator(d, CoefficientField::constant(d, A), Potential::free(d));
}

// (-R, R) with levels around 0
inline Exhaustion line_exhaustion(double R, double h, Schedule s, double x1 = 0.5) {
  const GridSpec g = GridSpec::make(1, {-R, 0, 0}, {R, 0, 0}, h, false);
  return Exhaustion(g, Family{}, s, Markers{{0, 0, 0}, {x1, 0, 0}, {}});
}

// (0, 1) with inset levels, the last one being the whole interval
inline Exhaustion unit_interval(double h, int K = 4, double x0 = 0.5, double x1 = 0.25) {
  const GridSpec g = GridSpec::make(1, {0, 0, 0}, {1, 0, 0}, h, false);
  Family f;
  f.kind = Family::Kind::inset;
  return Exhaustion(g, f, Schedule{K, 0.125, Growth::inset}, Markers{{x0, 0, 0}, {x1, 0, 0}, {}});
}

inline Problem load(const std::string& name) {
  return build_problem(load_config(std::string(CRITLAB_SOURCE_DIR) + "/configs/" + name));
}

}  // namespace testing
