#include "critlab/green.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "critlab/error.hpp"
#include "format.hpp"
#include "parallel.hpp"

namespace critlab {

GreenColumn green_column(const DiscreteOperator& op, const Exhaustion& ex, int N,
                         std::size_t x0, const SolveOptions& opts) {
  if (N < 1 || N > ex.levels()) throw Error(ErrorCode::invalid_argument, "level out of range");
  if (!ex.interior(N, x0))
    throw Error(ErrorCode::invalid_argument, "source is not an interior node of the level");
  const LevelOperator A(op, ex, N);
  std::vector<double> e(A.size(), 0.0);
  e[static_cast<std::size_t>(A.position(x0))] = 1.0;
  SolveResult sr = solve_spd(A, e, opts);
  if (sr.status == SolveStatus::indefinite)
    throw Error(ErrorCode::indefinite,
                "form is not nonnegative on level " + std::to_string(N));
  GreenColumn col;
  col.level = N;
  col.source = x0;
  col.g = A.expand(sr.x);
  col.status = sr.status;
  col.iterations = sr.iterations;
  return col;
}

GreenGrowth green_growth(const DiscreteOperator& op, const Exhaustion& ex,
                         std::size_t x0, std::size_t x1, const SolveOptions& opts,
                         bool allow_singular) {
  const int K = ex.levels();
  GreenGrowth out;
  out.values.assign(K, 0.0);
  out.status.assign(K, SolveStatus::converged);
  parallel_for(K, [&](int i) {
    const int N = i + 1;
    const LevelOperator A(op, ex, N);
    std::vector<double> e(A.size(), 0.0);
    e[static_cast<std::size_t>(A.position(x0))] = 1.0;
    const SolveResult sr = solve_spd(A, e, opts);
    out.status[i] = sr.status;
    if (sr.status == SolveStatus::converged) {
      out.values[i] = sr.x[static_cast<std::size_t>(A.position(x1))];
    } else if (allow_singular) {
      out.values[i] = std::numeric_limits<double>::infinity();
    } else {
      throw Error(sr.status == SolveStatus::indefinite ? ErrorCode::indefinite
                                                       : ErrorCode::not_converged,
                  "Green solve failed on level " + std::to_string(N) + ": " +
                      to_string(sr.status));
    }
  });
  for (int N = 1; N < K; ++N) {
    out.increments.push_back(out.values[N] - out.values[N - 1]);
    out.ratios.push_back(out.values[N] / out.values[N - 1]);
    if (!(out.values[N] > out.values[N - 1])) out.increasing = false;
  }
  out.fit = level_limit(out.values, ex.terminates());
  return out;
}

std::vector<double> level_mass(const LevelOperator& A, const GridFunction& W, double cell) {
  std::vector<double> m(A.size());
  for (std::size_t r = 0; r < A.size(); ++r) m[r] = W[A.unknowns()[r]] * cell;
  return m;
}

bool nonincreasing(const std::vector<double>& s, double rel_slack) {
  for (std::size_t i = 1; i < s.size(); ++i)
    if (s[i] > s[i - 1] + rel_slack * std::max(std::abs(s[i - 1]), 1e-300)) return false;
  return true;
}

Lambda0Estimate lambda0(const DiscreteOperator& op, const GridFunction& W,
                        const Exhaustion& ex, const EigOptions& opts) {
  const int K = ex.levels();
  if (W.size() != ex.size()) throw Error(ErrorCode::invalid_argument, "weight size mismatch");
  for (std::size_t l = 0; l < ex.size(); ++l)
    if (ex.interior(K, l) && !(W[l] > 0.0))
      throw Error(ErrorCode::nonpositive, "weight must be positive on the largest level");
  Lambda0Estimate out;
  out.lambda.assign(K, 0.0);
  out.status.assign(K, EigStatus::converged);
  parallel_for(K, [&](int i) {
    const LevelOperator A(op, ex, i + 1);
    const auto B = level_mass(A, W, op.cell_volume());
    const EigResult r = smallest_eig(A, B, opts);
    out.lambda[i] = r.lambda;
    out.status[i] = r.status;
  });
  for (auto s : out.status)
    if (s == EigStatus::not_converged)
      throw Error(ErrorCode::not_converged, "eigensolver did not converge");
  out.monotone = nonincreasing(out.lambda);
  out.fit = level_limit(out.lambda, ex.terminates());
  return out;
}

std::string sequence_csv(const std::vector<double>& s) {
  std::ostringstream os;
  os << "N,value\n";
  for (std::size_t i = 0; i < s.size(); ++i) os << i + 1 << ',' << fmt_num(s[i]) << '\n';
  return os.str();
}

}  // namespace critlab
