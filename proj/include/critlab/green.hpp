#pragma once

#include <vector>

#include "critlab/fit.hpp"
#include "critlab/grid.hpp"
#include "critlab/operator.hpp"
#include "critlab/solver.hpp"

namespace critlab {

struct GreenColumn {
  int level = 0;
  std::size_t source = 0;
  GridFunction g;  // over the largest level, zero outside interior(Omega_N)
  SolveStatus status = SolveStatus::converged;
  int iterations = 0;
};

// Solves L_h g = e_{x0} on interior(Omega_N); throws on an indefinite form.
GreenColumn green_column(const DiscreteOperator& op, const Exhaustion& ex, int N,
                         std::size_t x0, const SolveOptions& opts = {});

struct GreenGrowth {
  std::vector<double> values;      // g_N(x1), N = 1..K
  std::vector<double> increments;  // g_{N+1}(x1) - g_N(x1)
  std::vector<double> ratios;      // g_{N+1}(x1) / g_N(x1)
  std::vector<SolveStatus> status;
  Extrapolation fit;
  bool increasing = true;
};

/**
 * g_N(x1) over all levels.  With allow_singular a level whose solve fails
 * (indefinite or stalled on a numerically singular form) is recorded as
 * +inf instead of throwing.
 */
GreenGrowth green_growth(const DiscreteOperator& op, const Exhaustion& ex,
                         std::size_t x0, std::size_t x1, const SolveOptions& opts = {},
                         bool allow_singular = false);

struct Lambda0Estimate {
  std::vector<double> lambda;  // lambda_N, N = 1..K
  std::vector<EigStatus> status;
  Extrapolation fit;
  bool monotone = true;  // nonincreasing up to 1e-10 relative slack
};

// lambda_N = bottom of a_h[u] / sum W u^2 h^d on Omega_N; W > 0 on interior(Omega_K).
Lambda0Estimate lambda0(const DiscreteOperator& op, const GridFunction& W,
                        const Exhaustion& ex, const EigOptions& opts = {});

// mass vector W h^d restricted to the unknowns of a level operator
std::vector<double> level_mass(const LevelOperator& A, const GridFunction& W, double cell);

bool nonincreasing(const std::vector<double>& s, double rel_slack = 1e-10);

// CSV: N,value
std::string sequence_csv(const std::vector<double>& s);

}  // namespace critlab
