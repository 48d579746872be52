#pragma once

#include <string>
#include <vector>

#include "critlab/criticality.hpp"
#include "critlab/grid.hpp"
#include "critlab/operator.hpp"
#include "critlab/solver.hpp"

namespace critlab {

struct VariationalProblem {
  GridFunction W0;  // nonnegative, positive mass on interior(Omega_K)
  double p = 4.0;   // > 2
  double tol = 1e-10;           // relative energy decrease
  int window = 10;              // consecutive small decreases to stop
  int max_iterations = 100000;
};

struct Minimizer {
  double kappa = 0.0;
  GridFunction v;  // on the largest level, sum W0 |v|^p h^d = 1
  int iterations = 0;
  bool converged = false;
  double constraint_residual = 0.0;  // |sum W0 v^p h^d - 1|
  double stationarity = 0.0;         // max |L v - kappa W0 v^{p-1} h^d| / max |L v|
  std::vector<double> history;  // energy after each accepted step, start included
  std::string warning;
};

/**
 * Minimizes a_h[u] subject to sum W0 |u|^p h^d = 1 on the largest level by
 * projected gradient descent.  The tangent direction kappa z - u uses
 * z = L^{-1}(W0 u^{p-1} h^d); each trial step is replaced by its absolute
 * value and renormalized, and a step is accepted when the energy does not
 * increase.  Starts from the principal eigenvector of (a_h, W0).
 */
Minimizer minimize_constrained(const DiscreteOperator& op, const VariationalProblem& problem,
                               const Exhaustion& ex, const EigOptions& opts = {},
                               const ClassificationReport* verdict = nullptr);

// W_i = kappa W0_i v_i^{p-2}; v must be positive where W0 > 0 inside the level
GridFunction build_critical_potential(double kappa, const GridFunction& v,
                                      const GridFunction& W0, double p,
                                      const Exhaustion& ex);

struct RefinementCheck {
  NonnegativityReport nonneg;
  ClassificationReport classification;
  GroundState ground_state;
  double residual = 0.0;        // max |(L - W) v| / max |L v| inside the largest level
  double gs_mismatch = 0.0;     // max relative gap between v/v(x1) and phi on the window
  bool nonnegative = false;
  bool critical = false;
  bool ground_state_match = false;
  bool passed = false;
  std::vector<std::string> diagnostics;
};

RefinementCheck verify_refinement(const DiscreteOperator& op, const GridFunction& W,
                                  const Exhaustion& ex, const GridFunction& v,
                                  const Thresholds& th = {}, const EigOptions& opts = {},
                                  double residual_tol = 1e-6, double match_tol = 2e-2);

}  // namespace critlab
