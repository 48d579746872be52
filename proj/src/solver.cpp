#include "critlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "critlab/error.hpp"

namespace critlab {

double LinearOperator::lower_bound(std::span<const double>) const {
  return std::numeric_limits<double>::quiet_NaN();
}

bool LinearOperator::tridiagonal(std::vector<double>&) const { return false; }

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::indefinite: return "indefinite";
    case SolveStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

const char* to_string(EigStatus s) {
  switch (s) {
    case EigStatus::converged: return "converged";
    case EigStatus::indefinite: return "indefinite";
    case EigStatus::not_converged: return "not_converged";
  }
  return "unknown";
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

namespace {

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

class ShiftedOperator : public LinearOperator {
 public:
  ShiftedOperator(const LinearOperator& A, std::span<const double> B, double sigma)
      : A_(A), B_(B), sigma_(sigma) {}
  std::size_t size() const override { return A_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override {
    A_.apply(x, y);
    if (sigma_ != 0.0)
      for (std::size_t i = 0; i < x.size(); ++i) y[i] -= sigma_ * B_[i] * x[i];
  }
  std::vector<double> diagonal() const override {
    auto d = A_.diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] -= sigma_ * B_[i];
    return d;
  }
  bool z_matrix() const override { return A_.z_matrix(); }
  const LinearOperator& base() const { return A_; }
  std::span<const double> mass() const { return B_; }
  double sigma() const { return sigma_; }

 private:
  const LinearOperator& A_;
  std::span<const double> B_;
  double sigma_;
};

class RankOneOperator : public LinearOperator {
 public:
  RankOneOperator(const LinearOperator& A, std::span<const double> q, double C)
      : A_(A), q_(q), C_(C) {}
  std::size_t size() const override { return A_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override {
    A_.apply(x, y);
    const double s = C_ * dot(q_, x);
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * q_[i];
  }
  std::vector<double> diagonal() const override {
    auto d = A_.diagonal();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += C_ * q_[i] * q_[i];
    return d;
  }
  double lower_bound(std::span<const double> massB) const override {
    return A_.lower_bound(massB);
  }
  const LinearOperator& base() const { return A_; }
  std::span<const double> vector() const { return q_; }
  double weight() const { return C_; }

 private:
  const LinearOperator& A_;
  std::span<const double> q_;
  double C_;
};

// T + C qq' with T tridiagonal, recovered through the wrappers above
struct Banded {
  std::vector<double> diag, upper, q;
  double C = 0.0;
};

bool banded(const LinearOperator& A, Banded& s) {
  if (const auto* S = dynamic_cast<const ShiftedOperator*>(&A)) {
    if (!banded(S->base(), s)) return false;
    const auto B = S->mass();
    for (std::size_t i = 0; i < s.diag.size(); ++i) s.diag[i] -= S->sigma() * B[i];
    return true;
  }
  if (const auto* R = dynamic_cast<const RankOneOperator*>(&A)) {
    if (!banded(R->base(), s) || !s.q.empty()) return false;
    s.q.assign(R->vector().begin(), R->vector().end());
    s.C = R->weight();
    return true;
  }
  s.diag = A.diagonal();
  return A.tridiagonal(s.upper);
}

enum class Direct { unavailable, solved, indefinite };

// LDL' of the tridiagonal part; Sherman-Morrison for the rank-one term
Direct solve_banded(const LinearOperator& A, std::span<const double> b, std::vector<double>& x) {
  Banded s;
  if (!banded(A, s)) return Direct::unavailable;
  const std::size_t n = s.diag.size();
  std::vector<double> d(n), l(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = s.diag[i];
    if (i > 0) {
      l[i] = s.upper[i - 1] / d[i - 1];
      d[i] -= l[i] * s.upper[i - 1];
    }
    if (!(d[i] > 0.0)) return s.q.empty() ? Direct::indefinite : Direct::unavailable;
  }
  auto tsolve = [&](std::span<const double> rhs, std::vector<double>& y) {
    y.assign(rhs.begin(), rhs.end());
    for (std::size_t i = 1; i < n; ++i) y[i] -= l[i] * y[i - 1];
    for (std::size_t i = 0; i < n; ++i) y[i] /= d[i];
    for (std::size_t i = n - 1; i-- > 0;) y[i] -= l[i + 1] * y[i + 1];
  };
  tsolve(b, x);
  if (!s.q.empty() && s.C != 0.0) {
    std::vector<double> z;
    tsolve(s.q, z);
    const double f = s.C * dot(s.q, x) / (1.0 + s.C * dot(s.q, z));
    for (std::size_t i = 0; i < n; ++i) x[i] -= f * z[i];
  }
  return Direct::solved;
}

void check_mass(std::span<const double> B, std::size_t n) {
  if (B.size() != n)
    throw Error(ErrorCode::invalid_argument, "mass vector does not match operator");
  double total = 0.0;
  for (double b : B) {
    if (!(b >= 0.0) || !std::isfinite(b))
      throw Error(ErrorCode::invalid_argument, "mass must be nonnegative and finite");
    total += b;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::invalid_argument, "mass has zero support");
}

double b_norm(std::span<const double> B, std::span<const double> u) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += B[i] * u[i] * u[i];
  return std::sqrt(s);
}

struct IterState {
  std::vector<double> u;
  double rho = 0.0;
};

/**
 * Shifted inverse iteration.  With certify set, a shift is accepted only if
 * the solve is positive, which proves A - sigma B is an M-matrix and so
 * sigma lies below the bottom eigenvalue.
 */
EigResult inverse_iteration(const LinearOperator& A, std::span<const double> B,
                            double sigma, bool certify, const EigOptions& opts) {
  const std::size_t n = A.size();
  EigResult res;
  std::vector<double> u(n, 1.0);
  {
    const double nb = b_norm(B, u);
    for (auto& v : u) v /= nb;
  }
  auto quotient = [&](const std::vector<double>& v) {
    std::vector<double> Av(n);
    A.apply(v, Av);
    return dot(v, Av) / (b_norm(B, v) * b_norm(B, v));
  };
  double rho = quotient(u);

  double lo = std::numeric_limits<double>::quiet_NaN();  // certified shift
  double hi = std::numeric_limits<double>::quiet_NaN();  // rejected shift
  double step = 0.0;
  double floor = 0.0;  // quotients below this count as zero for the stopping test
  {
    const auto d = A.diagonal();
    double dmax = 0.0, bmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dmax = std::max(dmax, std::abs(d[i]));
      bmax = std::max(bmax, B[i]);
    }
    step = bmax > 0.0 ? 1e-3 * dmax / bmax : 1.0;
    floor = 1e-6 * step * 1e3;
  }

  std::vector<double> Bu(n), Av(n), r(n);
  int stalls = 0;
  for (int it = 1; it <= opts.max_outer; ++it) {
    res.outer_iterations = it;
    for (std::size_t i = 0; i < n; ++i) Bu[i] = B[i] * u[i];
    ShiftedOperator S(A, B, sigma);
    SolveOptions so = opts.inner;
    bool all_pos = true;
    for (double dv : S.diagonal()) all_pos = all_pos && dv > 0.0;
    if (!all_pos) so.precond = Preconditioner::none;
    SolveResult sr = solve_spd(S, Bu, so, u);
    res.inner_iterations += sr.iterations;

    double xmax = 0.0, xmin = 0.0;
    for (double v : sr.x) {
      xmax = std::max(xmax, v);
      xmin = std::min(xmin, v);
    }
    const bool rejected = sr.status == SolveStatus::indefinite ||
                          (certify && (xmax <= 0.0 || xmin < -1e-6 * xmax));
    if (rejected) {
      if (!certify) {
        res.status = EigStatus::indefinite;
        res.lambda = rho;
        res.u = u;
        res.shift = sigma;
        return res;
      }
      hi = sigma;
      if (std::isnan(lo)) {
        sigma -= step;
        step *= 2.0;
        if (!std::isfinite(sigma) || step > 1e30) {
          res.status = EigStatus::indefinite;
          res.lambda = rho;
          res.u = u;
          res.shift = sigma;
          return res;
        }
      } else {
        sigma = 0.5 * (lo + hi);
        if (hi - lo <= 1e-14 * std::max(1.0, std::abs(hi))) ++stalls;
        if (stalls > 3) break;
      }
      continue;
    }
    // a stalled solve near the eigenvalue is still a usable inexact step, but
    // it certifies nothing and the shift stays put
    const bool inexact = sr.status != SolveStatus::converged;
    if (inexact && (!certify || sr.rel_residual > 1e-3)) {
      res.status = EigStatus::not_converged;
      break;
    }
    if (certify && !inexact) lo = sigma;

    std::vector<double> x = std::move(sr.x);
    if (certify)
      for (auto& v : x) v = std::max(v, 0.0);
    const double nb = b_norm(B, x);
    if (!(nb > 0.0) || !std::isfinite(nb)) {
      res.status = EigStatus::not_converged;
      break;
    }
    for (auto& v : x) v /= nb;
    const double rho_new = quotient(x);

    // eigen-residual of the new iterate
    A.apply(x, Av);
    double rn = 0.0, an = 0.0, bn = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = Av[i] - rho_new * B[i] * x[i];
      rn += r[i] * r[i];
      an += Av[i] * Av[i];
      bn += B[i] * x[i] * B[i] * x[i];
    }
    rn = std::sqrt(rn);
    const double scale = std::sqrt(an) + std::max(std::abs(rho_new), floor) * std::sqrt(bn);
    const double drho = std::abs(rho_new - rho);
    u = std::move(x);
    rho = rho_new;
    const double ref = std::max(std::abs(rho), floor);
    if (it >= 2 && drho <= opts.tol * ref && rn <= std::sqrt(opts.tol) * scale) {
      res.status = EigStatus::converged;
      break;
    }
    if (it == opts.max_outer) res.status = EigStatus::not_converged;

    if (certify && opts.rayleigh_shift && !inexact) {
      double next = sigma + 0.5 * (rho - sigma);
      if (!std::isnan(hi) && next >= hi) next = 0.5 * (sigma + hi);
      sigma = next;
    }
  }
  res.u = std::move(u);
  res.shift = std::isnan(lo) ? sigma : lo;
  res.lambda = quotient(res.u);
  res.nonnegative = std::all_of(res.u.begin(), res.u.end(), [](double v) { return v >= 0.0; });
  return res;
}

}  // namespace

SolveResult solve_spd(const LinearOperator& A, std::span<const double> b,
                      const SolveOptions& opts, std::span<const double> x0) {
  const std::size_t n = A.size();
  if (b.size() != n)
    throw Error(ErrorCode::invalid_argument, "right-hand side does not match operator");
  if (!(opts.tol > 0.0 && opts.tol < 1.0))
    throw Error(ErrorCode::invalid_argument, "solve tolerance must lie in (0,1)");
  const int maxit = opts.max_iterations > 0 ? opts.max_iterations
                                            : static_cast<int>(4 * n + 1000);
  SolveResult res;
  res.x.assign(n, 0.0);
  const double bn = norm2(b);
  if (bn == 0.0) return res;

  if (opts.direct && n > 0) {
    const Direct dr = solve_banded(A, b, res.x);
    if (dr == Direct::indefinite) {
      res.status = SolveStatus::indefinite;
      return res;
    }
    if (dr == Direct::solved) {
      std::vector<double> r(n);
      A.apply(res.x, r);
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];
      res.rel_residual = norm2(r) / bn;
      return res;
    }
    res.x.assign(n, 0.0);
  }

  std::vector<double> minv(n, 1.0);
  if (opts.precond == Preconditioner::diagonal) {
    const auto d = A.diagonal();
    for (std::size_t i = 0; i < n; ++i) minv[i] = d[i] > 0.0 ? 1.0 / d[i] : 1.0;
  }

  std::vector<double> r(b.begin(), b.end()), z(n), p(n), Ap(n);
  if (x0.size() == n) {
    // warm start, kept only if it does not increase the residual
    A.apply(x0, Ap);
    double rn0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) rn0 += (b[i] - Ap[i]) * (b[i] - Ap[i]);
    if (std::sqrt(rn0) < bn) {
      res.x.assign(x0.begin(), x0.end());
      for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    }
  }

  int restarts = 0;
  int it = 0;
  while (true) {
    for (std::size_t i = 0; i < n; ++i) z[i] = minv[i] * r[i];
    p = z;
    double rz = dot(r, z);
    double rel = norm2(r) / bn;
    while (rel > opts.tol && it < maxit) {
      ++it;
      A.apply(p, Ap);
      const double pAp = dot(p, Ap);
      if (!(pAp > 0.0)) {
        res.status = SolveStatus::indefinite;
        res.iterations = it;
        res.rel_residual = rel;
        return res;
      }
      const double alpha = rz / pAp;
      for (std::size_t i = 0; i < n; ++i) {
        res.x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
      }
      rel = norm2(r) / bn;
      for (std::size_t i = 0; i < n; ++i) z[i] = minv[i] * r[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    // recompute the true residual to guard against drift
    A.apply(res.x, Ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - Ap[i];
    rel = norm2(r) / bn;
    res.rel_residual = rel;
    res.iterations = it;
    if (rel <= opts.tol) return res;
    if (it >= maxit || ++restarts > 5) {
      res.status = SolveStatus::max_iterations;
      return res;
    }
  }
}

double rayleigh_quotient(const LinearOperator& A, std::span<const double> massB,
                         std::span<const double> u) {
  std::vector<double> Au(A.size());
  A.apply(u, Au);
  double den = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) den += massB[i] * u[i] * u[i];
  return dot(u, Au) / den;
}

EigResult smallest_eig(const LinearOperator& A, std::span<const double> massB,
                       const EigOptions& opts) {
  check_mass(massB, A.size());
  double sigma = A.lower_bound(massB);
  if (std::isnan(sigma)) sigma = 0.0;
  return inverse_iteration(A, massB, sigma, A.z_matrix(), opts);
}

EigResult smallest_eig_rank_one(const LinearOperator& A, std::span<const double> massB,
                                std::span<const double> q, double C,
                                const EigOptions& opts) {
  check_mass(massB, A.size());
  if (q.size() != A.size())
    throw Error(ErrorCode::invalid_argument, "rank-one vector does not match operator");
  if (C < 0.0) throw Error(ErrorCode::invalid_argument, "rank-one weight C must be >= 0");
  const bool trivial = C == 0.0 || std::all_of(q.begin(), q.end(), [](double v) { return v == 0.0; });
  EigResult base = smallest_eig(A, massB, opts);
  if (trivial || base.status == EigStatus::indefinite) return base;
  // A + C qq' >= A, so a shift certified for A is safe here as well.
  const RankOneOperator R(A, q, C);
  return inverse_iteration(R, massB, base.shift, false, opts);
}

}  // namespace critlab
