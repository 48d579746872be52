#include "critlab/varcrit.hpp"

#include <algorithm>
#include <cmath>

#include "critlab/error.hpp"

namespace critlab {

namespace {

double constraint(const std::vector<double>& w0, const std::vector<double>& u, double p) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += w0[i] * std::pow(std::abs(u[i]), p);
  return s;
}

double energy(const LevelOperator& A, const std::vector<double>& u) {
  std::vector<double> Au(u.size());
  A.apply(u, Au);
  return dot(u, Au);
}

}  // namespace

Minimizer minimize_constrained(const DiscreteOperator& op, const VariationalProblem& pb,
                               const Exhaustion& ex, const EigOptions& opts,
                               const ClassificationReport* verdict) {
  if (verdict && verdict->verdict != Verdict::subcritical)
    throw Error(ErrorCode::invalid_argument,
                std::string("constrained minimization needs a subcritical operator, got ") +
                    to_string(verdict->verdict));
  if (!(pb.p > 2.0)) throw Error(ErrorCode::invalid_argument, "exponent p must exceed 2");
  if (pb.W0.size() != ex.size())
    throw Error(ErrorCode::invalid_argument, "W0 does not match the exhaustion");
  const int K = ex.levels();
  const int d = ex.grid().dim;
  const double cell = op.cell_volume();
  Minimizer out;
  if (d >= 3 && pb.p > 2.0 * d / (d - 2))
    out.warning = "p exceeds the critical Sobolev exponent 2d/(d-2); the energy space "
                  "need not embed into L^p and the minimum may not be attained";

  const LevelOperator A(op, ex, K);
  const std::size_t n = A.size();
  std::vector<double> w0(n);
  double mass = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double w = pb.W0[A.unknowns()[r]];
    if (!(w >= 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::invalid_argument, "W0 must be nonnegative and finite");
    w0[r] = w * cell;
    mass += w0[r];
  }
  if (!(mass > 0.0)) throw Error(ErrorCode::invalid_argument, "W0 has no mass on the level");

  auto normalize = [&](std::vector<double>& u) {
    for (auto& v : u) v = std::abs(v);
    const double c = std::pow(constraint(w0, u, pb.p), 1.0 / pb.p);
    for (auto& v : u) v /= c;
  };

  const EigResult start = smallest_eig(A, w0, opts);
  if (start.status != EigStatus::converged)
    throw Error(ErrorCode::not_converged, "principal eigenvector for the start failed");
  std::vector<double> u = start.u;
  normalize(u);
  double E = energy(A, u);
  out.history.push_back(E);

  std::vector<double> rhs(n), trial(n);
  double tau = 1.0;
  int small = 0;
  for (int it = 1; it <= pb.max_iterations; ++it) {
    out.iterations = it;
    for (std::size_t r = 0; r < n; ++r) rhs[r] = w0[r] * std::pow(u[r], pb.p - 1.0);
    const SolveResult sr = solve_spd(A, rhs, opts.inner);
    if (sr.status != SolveStatus::converged)
      throw Error(ErrorCode::not_converged, "inner solve failed during minimization");
    // direction kappa z - u, tangent to the constraint at u
    std::vector<double> dir(n);
    for (std::size_t r = 0; r < n; ++r) dir[r] = E * sr.x[r] - u[r];

    double Et = E;
    bool accepted = false;
    tau = std::min(1.0, 2.0 * tau);
    for (int k = 0; k < 40; ++k) {
      for (std::size_t r = 0; r < n; ++r) trial[r] = u[r] + tau * dir[r];
      normalize(trial);
      Et = energy(A, trial);
      if (Et <= E) {
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      // no descent left at working precision
      out.converged = true;
      break;
    }
    const double dec = (E - Et) / std::abs(E);
    u.swap(trial);
    E = Et;
    out.history.push_back(E);
    small = dec < pb.tol ? small + 1 : 0;
    if (small >= pb.window) {
      out.converged = true;
      break;
    }
  }

  out.v = A.expand(u);
  out.kappa = op.quadratic_form(out.v);
  out.constraint_residual = std::abs(constraint(w0, u, pb.p) - 1.0);
  std::vector<double> Au(n);
  A.apply(u, Au);
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    num = std::max(num, std::abs(Au[r] - out.kappa * w0[r] * std::pow(u[r], pb.p - 1.0)));
    den = std::max(den, std::abs(Au[r]));
  }
  out.stationarity = den > 0.0 ? num / den : num;
  return out;
}

GridFunction build_critical_potential(double kappa, const GridFunction& v,
                                      const GridFunction& W0, double p,
                                      const Exhaustion& ex) {
  if (!(p > 2.0)) throw Error(ErrorCode::invalid_argument, "exponent p must exceed 2");
  if (!(kappa > 0.0)) throw Error(ErrorCode::nonpositive, "kappa must be positive");
  if (v.size() != ex.size() || W0.size() != ex.size())
    throw Error(ErrorCode::invalid_argument, "v and W0 must live on the largest level");
  const int K = ex.levels();
  GridFunction W(ex.size(), 0.0);
  for (std::size_t l = 0; l < ex.size(); ++l) {
    if (!ex.interior(K, l)) continue;
    if (!(v[l] > 0.0))
      throw Error(ErrorCode::nonpositive, "v is not positive at an interior node");
    W[l] = kappa * W0[l] * std::pow(v[l], p - 2.0);
  }
  return W;
}

RefinementCheck verify_refinement(const DiscreteOperator& op, const GridFunction& W,
                                  const Exhaustion& ex, const GridFunction& v,
                                  const Thresholds& th, const EigOptions& opts,
                                  double residual_tol, double match_tol) {
  GridFunction minusW(W.size());
  for (std::size_t l = 0; l < W.size(); ++l) minusW[l] = -W[l];
  const DiscreteOperator P = op.shifted(minusW);
  const int K = ex.levels();
  RefinementCheck out;

  out.nonneg = check_nonnegativity(P, ex, th, opts);
  out.nonnegative = out.nonneg.nonnegative;
  if (!out.nonnegative)
    out.diagnostics.push_back("L - W is negative on level " +
                              std::to_string(out.nonneg.first_negative_level));

  if (out.nonnegative) {
    out.classification = classify(P, ex, th, opts);
    out.critical = out.classification.verdict == Verdict::critical;
    if (!out.critical)
      out.diagnostics.push_back(std::string("L - W classified ") +
                                to_string(out.classification.verdict) + ": " +
                                out.classification.reason);
  } else {
    out.classification.verdict = Verdict::supercritical;
    out.classification.nonneg = out.nonneg;
    out.classification.reason = "nonnegativity failed";
  }

  const GridFunction Pv = P.apply(v);
  const GridFunction Lv = op.apply(v);
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < ex.size(); ++l) {
    if (!ex.interior(K, l)) continue;
    num = std::max(num, std::abs(Pv[l]));
    den = std::max(den, std::abs(Lv[l]));
  }
  out.residual = den > 0.0 ? num / den : num;
  bool residual_ok = out.residual <= residual_tol;
  if (!residual_ok)
    out.diagnostics.push_back("v leaves a relative residual " + std::to_string(out.residual));

  if (out.nonnegative) {
    out.ground_state = ground_state(P, ex, opts.inner, 1e-2, true);
    const double excl = 3.0 * ex.grid().h * (1.0 + 1e-9);
    const double vx1 = v[ex.x1()];
    for (std::size_t l = 0; l < ex.size(); ++l) {
      if (!ex.active(K - 2, l) || ex.dist_x0(l) <= excl) continue;
      const double ref = v[l] / vx1;
      if (!(ref > 0.0)) continue;
      out.gs_mismatch = std::max(out.gs_mismatch,
                                 std::abs(out.ground_state.phi[l] - ref) / ref);
    }
    out.ground_state_match = residual_ok && out.gs_mismatch <= match_tol;
    if (out.gs_mismatch > match_tol)
      out.diagnostics.push_back("v differs from the Green-ratio ground state by " +
                                std::to_string(out.gs_mismatch));
  }
  out.passed = out.nonnegative && out.critical && out.ground_state_match;
  return out;
}

}  // namespace critlab
