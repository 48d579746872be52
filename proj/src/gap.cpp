#include "critlab/gap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "critlab/error.hpp"
#include "parallel.hpp"

namespace critlab {

const char* to_string(GapVerdict v) {
  switch (v) {
    case GapVerdict::gap: return "gap";
    case GapVerdict::no_gap: return "no-gap";
    case GapVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

const char* to_string(PoincareVerdict v) {
  switch (v) {
    case PoincareVerdict::certified: return "certified";
    case PoincareVerdict::failed: return "failed";
    case PoincareVerdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

GapCertificate verify_gap(const DiscreteOperator& op, const GridFunction& W,
                          const Exhaustion& ex, const Thresholds& th,
                          const EigOptions& opts) {
  GapCertificate cert;
  cert.W = W;
  cert.thresholds = th;
  const Lambda0Estimate est = lambda0(op, W, ex, opts);
  cert.nu = est.lambda;
  cert.fit = est.fit;
  cert.monotone = est.monotone;
  cert.nu_inf = est.fit.limit;
  const double nu1 = cert.nu.front();
  if (cert.nu_inf > th.sub * nu1) {
    cert.verdict = GapVerdict::gap;
    cert.note = "gap inequality holds on every level with W scaled by nu_inf; "
                "the limit is extrapolated from the exhaustion";
  } else if (cert.nu_inf < th.crit * nu1) {
    cert.verdict = GapVerdict::no_gap;
    cert.note = "nu_N extrapolates to zero";
  } else {
    cert.verdict = GapVerdict::inconclusive;
    cert.note = "nu_inf lies between the thresholds";
  }
  return cert;
}

WeightConstruction construct_weight(const DiscreteOperator& op, const Exhaustion& ex,
                                    const EigOptions& opts,
                                    const ClassificationReport* verdict) {
  if (verdict && verdict->verdict != Verdict::subcritical)
    throw Error(ErrorCode::invalid_argument,
                std::string("weight synthesis needs a subcritical operator, got ") +
                    to_string(verdict->verdict));
  const int K = ex.levels();
  const double cell = op.cell_volume();
  const LevelOperator A(op, ex, K);
  WeightConstruction out;

  // u = 1 + y with L_h y = -L_h 1 on the unknowns
  {
    const GridFunction ones(ex.size(), 1.0);
    const GridFunction r = op.apply(ones);
    std::vector<double> b = A.restrict_to(r);
    for (auto& v : b) v = -v;
    const SolveResult sr = solve_spd(A, b, opts.inner);
    if (sr.status != SolveStatus::converged)
      throw Error(sr.status == SolveStatus::indefinite ? ErrorCode::indefinite
                                                       : ErrorCode::not_converged,
                  "harmonic extension failed on the largest level");
    out.u = A.expand(sr.x);
    for (std::size_t l = 0; l < ex.size(); ++l) {
      if (ex.active(K, l)) out.u[l] += 1.0;
      if (ex.active(K, l) && !(out.u[l] > 0.0))
        throw Error(ErrorCode::nonpositive, "harmonic extension is not positive");
    }
  }

  out.chi = annulus_partition(ex);
  out.C.assign(K, 0.0);
  out.eps.assign(K, 0.0);
  std::vector<std::vector<double>> y(K);
  parallel_for(K, [&](int i) {
    std::vector<double> b(A.size());
    for (std::size_t r = 0; r < A.size(); ++r) {
      const std::size_t l = A.unknowns()[r];
      b[r] = out.chi[i][l] * out.u[l] * cell;
    }
    const SolveResult sr = solve_spd(A, b, opts.inner);
    if (sr.status != SolveStatus::converged)
      throw Error(ErrorCode::not_converged, "Green accumulation failed for annulus " +
                                                std::to_string(i + 1));
    y[i] = sr.x;
  });
  for (int N = 1; N <= K; ++N) {
    double c = 0.0;
    for (std::size_t r = 0; r < A.size(); ++r)
      c = std::max(c, y[N - 1][r] / out.u[A.unknowns()[r]]);
    if (!(c > 0.0))
      throw Error(ErrorCode::nonpositive, "empty annulus " + std::to_string(N));
    out.C[N - 1] = c;
    out.eps[N - 1] = std::ldexp(1.0, -N) / c;
  }

  out.W.assign(ex.size(), 0.0);
  for (int N = 1; N <= K; ++N)
    for (std::size_t l = 0; l < ex.size(); ++l) out.W[l] += out.eps[N - 1] * out.chi[N - 1][l];

  std::vector<double> s(A.size(), 0.0);
  for (int N = 1; N <= K; ++N)
    for (std::size_t r = 0; r < A.size(); ++r) s[r] += out.eps[N - 1] * y[N - 1][r];
  out.green_sum = A.expand(s);
  out.min_slack = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < A.size(); ++r) {
    const std::size_t l = A.unknowns()[r];
    out.min_slack = std::min(out.min_slack, out.u[l] - s[r]);
  }

  out.positive = true;
  for (std::size_t l = 0; l < ex.size(); ++l)
    if (ex.active(K - 1, l) && !(out.W[l] > 0.0)) out.positive = false;
  out.lambda0 = lambda0(op, out.W, ex, opts);
  return out;
}

PoincareCertificate poincare_certificate(const DiscreteOperator& op, const Exhaustion& ex,
                                         const GroundState& gs, const GridFunction& psi,
                                         const GridFunction& W, double C,
                                         const Thresholds& th, const EigOptions& opts) {
  if (gs.phi.size() != ex.size())
    throw Error(ErrorCode::invalid_argument, "ground state is missing or does not match");
  if (psi.size() != ex.size() || W.size() != ex.size())
    throw Error(ErrorCode::invalid_argument, "psi and W must live on the largest level");
  if (!(C > 0.0)) throw Error(ErrorCode::invalid_argument, "C must be positive");
  const int K = ex.levels();
  const double cell = op.cell_volume();
  PoincareCertificate cert;
  cert.psi = psi;
  cert.W = W;
  cert.C = C;
  for (std::size_t l = 0; l < ex.size(); ++l) cert.pairing += psi[l] * gs.phi[l] * cell;

  cert.nu.assign(K, 0.0);
  std::vector<EigStatus> st(K);
  parallel_for(K, [&](int i) {
    const LevelOperator A(op, ex, i + 1);
    const auto B = level_mass(A, W, cell);
    auto q = A.restrict_to(psi);
    for (auto& v : q) v *= cell;
    const EigResult r = smallest_eig_rank_one(A, B, q, C, opts);
    cert.nu[i] = r.lambda;
    st[i] = r.status;
  });
  for (auto s : st)
    if (s != EigStatus::converged)
      throw Error(ErrorCode::not_converged, "augmented eigenproblem did not converge");
  cert.fit = level_limit(cert.nu, ex.terminates());
  cert.floor = std::min({cert.nu[K - 1], cert.nu[K - 2], cert.nu[K - 3]});
  const double ref = cert.nu.front();
  if (cert.fit.limit > th.sub * ref && cert.floor > th.sub * ref) {
    cert.verdict = PoincareVerdict::certified;
    cert.note = "floor extrapolated from the exhaustion, not proven on the whole domain";
  } else if (cert.fit.limit < th.crit * ref) {
    cert.verdict = PoincareVerdict::failed;
    cert.note = std::abs(cert.pairing) <= 1e-10 * cert.C
                    ? "psi is orthogonal to the ground state; the augmented form vanishes "
                      "along the null sequence"
                    : "augmented ratios extrapolate to zero";
  } else {
    cert.verdict = PoincareVerdict::inconclusive;
    cert.note = "augmented ratios lie between the thresholds";
  }
  return cert;
}

std::vector<PairingPoint> pairing_along_sequence(const NullSequenceReport& ns,
                                                 const GridFunction& psi, double cell) {
  std::vector<PairingPoint> out;
  for (const auto& e : ns.entries) {
    if (e.u.size() != psi.size())
      throw Error(ErrorCode::invalid_argument,
                  "null sequence functions were not kept or do not match psi");
    PairingPoint p;
    p.N = e.N;
    p.energy = e.energy;
    for (std::size_t l = 0; l < psi.size(); ++l) p.pairing += psi[l] * e.u[l] * cell;
    out.push_back(p);
  }
  return out;
}

}  // namespace critlab
