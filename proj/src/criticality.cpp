#include "critlab/criticality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "critlab/error.hpp"
#include "parallel.hpp"

namespace critlab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::critical: return "critical";
    case Verdict::subcritical: return "subcritical";
    case Verdict::supercritical: return "supercritical";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

const char* to_string(NullCutoff c) {
  switch (c) {
    case NullCutoff::automatic: return "automatic";
    case NullCutoff::ramp: return "ramp";
    case NullCutoff::log: return "log";
    case NullCutoff::pole: return "pole";
  }
  return "unknown";
}

NonnegativityReport check_nonnegativity(const DiscreteOperator& op, const Exhaustion& ex,
                                        const Thresholds& th, const EigOptions& opts) {
  const int K = ex.levels();
  NonnegativityReport rep;
  rep.tol_neg = th.neg * op.max_diagonal() / op.cell_volume();
  rep.lambda_min.assign(K, 0.0);
  rep.status.assign(K, EigStatus::converged);
  parallel_for(K, [&](int i) {
    const LevelOperator A(op, ex, i + 1);
    const std::vector<double> B(A.size(), op.cell_volume());
    const EigResult r = smallest_eig(A, B, opts);
    rep.lambda_min[i] = r.lambda;
    rep.status[i] = r.status;
  });
  for (int N = 1; N <= K; ++N) {
    if (rep.status[N - 1] == EigStatus::not_converged)
      throw Error(ErrorCode::not_converged,
                  "eigensolver did not converge on level " + std::to_string(N));
    if (rep.lambda_min[N - 1] < -rep.tol_neg && rep.first_negative_level == 0) {
      rep.nonnegative = false;
      rep.first_negative_level = N;
    }
  }
  rep.monotone = nonincreasing(rep.lambda_min);
  return rep;
}

ClassificationReport classify(const DiscreteOperator& op, const Exhaustion& ex,
                              const Thresholds& th, const EigOptions& opts) {
  const int K = ex.levels();
  if (K < 4) throw Error(ErrorCode::invalid_argument, "classification needs K >= 4");
  ClassificationReport rep;
  rep.thresholds = th;
  rep.nonneg = check_nonnegativity(op, ex, th, opts);
  if (!rep.nonneg.nonnegative) {
    rep.verdict = Verdict::supercritical;
    rep.reason = "lambda_min < -tol_neg on level " +
                 std::to_string(rep.nonneg.first_negative_level);
    return rep;
  }

  rep.mu.assign(K, 0.0);
  std::vector<EigStatus> st(K);
  parallel_for(K, [&](int i) {
    const LevelOperator A(op, ex, i + 1);
    std::vector<double> B(A.size());
    for (std::size_t r = 0; r < A.size(); ++r)
      B[r] = ex.b0()[A.unknowns()[r]] ? op.cell_volume() : 0.0;
    const EigResult r = smallest_eig(A, B, opts);
    rep.mu[i] = r.lambda;
    st[i] = r.status;
  });
  for (int N = 1; N <= K; ++N)
    if (st[N - 1] == EigStatus::not_converged)
      throw Error(ErrorCode::not_converged,
                  "localized eigenproblem did not converge on level " + std::to_string(N));
  rep.mu_monotone = nonincreasing(rep.mu);
  rep.mu_fit = level_limit(rep.mu, ex.terminates());
  rep.green = green_growth(op, ex, ex.x0(), ex.x1(), opts.inner, true);
  if (ex.terminates() && rep.nonneg.lambda_min[K - 1] <= rep.nonneg.tol_neg) {
    // the form is numerically singular on the whole domain
    rep.green.values[K - 1] = std::numeric_limits<double>::infinity();
    rep.green.fit = terminal_value(rep.green.values);
  }

  rep.eps_crit = th.crit * rep.mu[0];
  rep.eps_sub = th.sub * rep.mu[0];
  rep.mu_vanishing = rep.mu_fit.limit < rep.eps_crit;
  rep.mu_bounded_below = rep.mu_fit.limit > rep.eps_sub;
  rep.green_diverging = !rep.green.fit.finite;
  rep.green_cauchy = rep.green.fit.finite;

  if (rep.mu_vanishing && rep.green_diverging) {
    rep.verdict = Verdict::critical;
    rep.reason = "mu_inf below eps_crit and g_N diverging";
  } else if (rep.mu_bounded_below && rep.green_cauchy) {
    rep.verdict = Verdict::subcritical;
    rep.reason = "mu_inf above eps_sub and g_N Cauchy";
  } else {
    rep.verdict = Verdict::inconclusive;
    rep.reason = std::string("diagnostics disagree or sit between thresholds: mu ") +
                 (rep.mu_vanishing ? "vanishing" : rep.mu_bounded_below ? "bounded" : "between") +
                 ", g_N " + (rep.green_diverging ? "diverging" : "Cauchy");
  }
  return rep;
}

GroundState ground_state(const DiscreteOperator& op, const Exhaustion& ex,
                         const SolveOptions& opts, double settle_tol, bool allow_singular) {
  const int K = ex.levels();
  GroundState gs;
  gs.settle_tol = settle_tol;
  std::vector<GridFunction> psi(K);
  std::vector<double> gx1(K, 0.0);
  std::vector<int> ok(K, 0);
  parallel_for(K, [&](int i) {
    GreenColumn col;
    try {
      col = green_column(op, ex, i + 1, ex.x0(), opts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::indefinite) throw;
      return;
    }
    if (col.status != SolveStatus::converged) return;
    const double g1 = col.g[ex.x1()];
    if (!(g1 > 0.0)) return;
    gx1[i] = g1;
    psi[i] = std::move(col.g);
    for (auto& v : psi[i]) v /= g1;
    ok[i] = 1;
  });
  int used = K;
  if (!ok[K - 1] && allow_singular) {
    // A form singular on the largest level: the Green ratios tend to its null
    // vector as the bottom eigenvalue goes to zero, so use it when the solve
    // broke down on roundoff rather than on a genuinely negative level.
    const LevelOperator A(op, ex, K);
    const std::vector<double> B(A.size(), op.cell_volume());
    const EigResult r = smallest_eig(A, B);
    const double tol = Thresholds{}.neg * op.max_diagonal() / op.cell_volume();
    GridFunction u = A.expand(r.u);
    if (u[ex.x1()] < 0.0)
      for (auto& v : u) v = -v;
    bool positive = r.status == EigStatus::converged && std::abs(r.lambda) <= tol;
    for (std::size_t l = 0; l < ex.size() && positive; ++l)
      if (ex.interior(K, l) && !(u[l] > 0.0)) positive = false;
    if (positive) {
      const double u1 = u[ex.x1()];
      for (auto& v : u) v /= u1;
      psi[K - 1] = std::move(u);
      gx1[K - 1] = std::numeric_limits<double>::infinity();
      ok[K - 1] = 1;
    } else {
      used = K - 1;
    }
  }
  for (int N = 1; N <= used; ++N)
    if (!ok[N - 1])
      throw Error(ErrorCode::not_converged,
                  "Green solve failed on level " + std::to_string(N));
  if (used < 3) throw Error(ErrorCode::invalid_argument, "too few regular levels");
  psi.resize(used);
  gx1.resize(used);
  gs.psi = std::move(psi);
  gs.g_x1 = std::move(gx1);
  gs.levels_used = used;
  gs.phi = gs.psi.back();
  gs.phi[ex.x1()] = 1.0;
  gs.phi_x0 = gs.phi[ex.x0()];

  const double excl = 3.0 * ex.grid().h * (1.0 + 1e-9);
  const int W = K - 2;
  auto in_window = [&](std::size_t l) {
    return ex.active(W, l) && ex.dist_x0(l) > excl;
  };
  for (int N = 1; N < used; ++N) {
    double m = 0.0;
    for (std::size_t l = 0; l < ex.size(); ++l)
      if (in_window(l) && ex.interior(N, l))
        m = std::max(m, std::abs(gs.psi[N - 1][l] - gs.psi[N][l]));
    gs.diffs.push_back(m);
  }
  const GridFunction res = op.apply(gs.phi);
  for (std::size_t l = 0; l < ex.size(); ++l)
    if (in_window(l) && ex.interior(W, l)) gs.residual = std::max(gs.residual, std::abs(res[l]));

  const double last = gs.diffs.back();
  const double prev = gs.diffs.size() > 1 ? gs.diffs[gs.diffs.size() - 2] : last;
  gs.converged = last <= settle_tol && last <= prev;
  if (!gs.converged)
    gs.diagnostic = "Green ratios not settled: last level change " + std::to_string(last) +
                    " (tolerance " + std::to_string(settle_tol) + ")";
  return gs;
}

double cutoff(int dim, double r, double N, std::optional<double> M) {
  if (dim < 2)
    throw Error(ErrorCode::invalid_argument,
                "singularity cutoffs need d >= 2; use far-field ramps in d = 1");
  if (!(N >= 2.0)) throw Error(ErrorCode::invalid_argument, "cutoff index N must be >= 2");
  if (dim >= 3) {
    if (r < 1.0 / N) return 0.0;
    if (r > 2.0 / N) return 1.0;
    return N * (r - 1.0 / N);
  }
  const double m = M.value_or(std::sqrt(N));
  if (!(m < N) || !(m > 0.0))
    throw Error(ErrorCode::invalid_argument, "d = 2 cutoff needs 0 < M < N");
  if (r <= 1.0 / N) return 0.0;
  if (r >= 1.0 / m) return 1.0;
  return std::log(r * N) / std::log(N / m);
}

std::vector<double> cutoff(const GridSpec& grid, const Point& center, double N,
                           std::optional<double> M, double unit) {
  std::vector<double> a(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i)
    a[i] = cutoff(grid.dim, distance(grid.coord(i), center, grid.dim) / unit, N, M);
  return a;
}

double cutoff_energy_closed_form(int dim, double N, std::optional<double> M, double unit) {
  if (dim == 2) {
    const double m = M.value_or(std::sqrt(N));
    return 2.0 * std::numbers::pi / std::log(N / m);
  }
  if (dim < 2) throw Error(ErrorCode::invalid_argument, "no singularity cutoff in d = 1");
  // N^2 |S^{d-1}| ((2/N)^d - (1/N)^d) / d, scaled by unit^{d-2}
  const double sphere = dim == 3 ? 4.0 * std::numbers::pi
                                 : 2.0 * std::pow(std::numbers::pi, dim / 2.0) /
                                       std::tgamma(dim / 2.0);
  return N * N * sphere * (std::pow(2.0 / N, dim) - std::pow(1.0 / N, dim)) / dim *
         std::pow(unit, dim - 2);
}

GridFunction ramp_cutoff(const Exhaustion& ex, double core, double width) {
  GridFunction a(ex.size());
  for (std::size_t l = 0; l < ex.size(); ++l)
    a[l] = std::clamp(1.0 - (ex.level_coordinate(l) - core) / width, 0.0, 1.0);
  return a;
}

GridFunction log_cutoff(const Exhaustion& ex, double N, double unit) {
  const double M = std::sqrt(N);
  GridFunction a(ex.size());
  for (std::size_t l = 0; l < ex.size(); ++l) {
    const double t = ex.level_coordinate(l);
    if (t <= unit * M) a[l] = 1.0;
    else if (t >= unit * N) a[l] = 0.0;
    else a[l] = std::log(unit * N / t) / std::log(N / M);
  }
  return a;
}

double dirichlet_energy(const Domain& d, const GridFunction& a) {
  const double w = std::pow(d.grid().h, d.grid().dim - 2);
  double s = 0.0;
  for (std::size_t l = 0; l < d.size(); ++l)
    for (int k = 1; k < d.degree(); k += 2) {
      const long j = d.neighbor(l, k);
      if (j >= 0) s += w * (a[l] - a[j]) * (a[l] - a[j]);
    }
  return s;
}

namespace {

double ramp_closed_form(const Exhaustion& ex, double core, double width) {
  const int d = ex.grid().dim;
  const bool half = ex.family().kind == Family::Kind::half_space;
  if (d == 1) return (half ? 1.0 : 2.0) / width;
  const double sphere = d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  const double shell = (std::pow(core + width, d) - std::pow(core, d)) / d;
  return (half ? 0.5 : 1.0) * sphere * shell / (width * width);
}

// integral of |S| t^{d-1} / (t log(N/M))^2 over unit M <= t <= unit N
double log_closed_form(const Exhaustion& ex, double N, double unit) {
  const int d = ex.grid().dim;
  const bool half = ex.family().kind == Family::Kind::half_space;
  const double M = std::sqrt(N);
  const double L = std::log(N / M);
  const double sphere = d == 1 ? 2.0 : d == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
  double radial = 0.0;
  if (d == 1) radial = (1.0 / M - 1.0 / N) / unit;
  else if (d == 2) radial = std::log(N / M);
  else radial = unit * (N - M);
  return (half ? 0.5 : 1.0) * sphere * radial / (L * L);
}

}  // namespace

NullSequenceReport null_sequence(const DiscreteOperator& op, const Exhaustion& ex,
                                 const GroundState& gs, const NullSequenceOptions& opts) {
  const int d = ex.grid().dim;
  if (gs.psi.empty() || gs.phi.size() != ex.size())
    throw Error(ErrorCode::invalid_argument, "ground state does not match the exhaustion");
  const int L = static_cast<int>(gs.psi.size());
  if (opts.N.empty()) throw Error(ErrorCode::invalid_argument, "no cutoff indices given");
  NullSequenceReport rep;
  rep.kind = opts.kind;
  if (rep.kind == NullCutoff::automatic)
    rep.kind = d == 1 ? NullCutoff::ramp : d == 2 ? NullCutoff::log : NullCutoff::pole;
  if (rep.kind == NullCutoff::pole && d < 2)
    throw Error(ErrorCode::invalid_argument,
                "singularity cutoffs need d >= 2; use far-field ramps in d = 1");

  const double unit = opts.unit;
  for (std::size_t l = 0; l < ex.size(); ++l)
    if (ex.dist_x0(l) <= unit) rep.C = std::max(rep.C, gs.phi[l]);

  double core = 0.0;
  if (opts.core) {
    core = *opts.core;
  } else {
    core = ex.level_coordinate(ex.x1());
    for (std::size_t l = 0; l < ex.size(); ++l)
      if (ex.b0()[l]) core = std::max(core, ex.level_coordinate(l));
  }

  const double phi_x1 = 1.0;
  const double cell = op.cell_volume();
  int M = 1;
  for (double N : opts.N) {
    GridFunction a;
    double closed = 0.0;
    switch (rep.kind) {
      case NullCutoff::ramp:
        a = ramp_cutoff(ex, core, N);
        closed = ramp_closed_form(ex, core, N);
        break;
      case NullCutoff::log:
        a = log_cutoff(ex, N, unit);
        closed = log_closed_form(ex, N, unit);
        break;
      default: {
        a.resize(ex.size());
        for (std::size_t l = 0; l < ex.size(); ++l)
          a[l] = cutoff(d, ex.dist_x0(l) / unit, N);
        closed = cutoff_energy_closed_form(d, N, std::nullopt, unit);
      }
    }

    int chosen = 0;
    for (int m = M; m <= L && !chosen; ++m) {
      bool ok = true;
      for (std::size_t l = 0; l < ex.size() && ok; ++l) {
        // boundary nodes of the outer domain carry zero data anyway
        if (a[l] != 0.0 && !ex.interior(m, l) && ex.outer().interior(l)) ok = false;
        const double r = ex.dist_x0(l);
        if (r >= unit / N && r <= unit && phi_x1 * gs.psi[m - 1][l] > 2.0 * rep.C) ok = false;
      }
      if (ok) chosen = m;
    }
    if (!chosen)
      throw Error(ErrorCode::no_admissible_level,
                  "no admissible level for cutoff index " + std::to_string(N) +
                      "; extend the exhaustion");
    M = chosen;

    NullSequenceEntry e;
    e.N = N;
    e.M = M;
    GridFunction u(ex.size());
    for (std::size_t l = 0; l < ex.size(); ++l) u[l] = a[l] * phi_x1 * gs.psi[M - 1][l];
    e.energy = op.quadratic_form(u);
    e.cutoff_energy = dirichlet_energy(ex.outer(), a);
    e.cutoff_closed_form = closed;
    double s = 0.0;
    for (std::size_t l = 0; l < ex.size(); ++l)
      if (ex.b0()[l]) s += u[l] * u[l] * cell;
    e.l2_b0 = std::sqrt(s);
    if (opts.keep_functions) e.u = std::move(u);
    rep.entries.push_back(std::move(e));
  }

  const std::size_t n = rep.entries.size();
  std::size_t run = 1;
  while (run < n && rep.entries[n - run].energy < rep.entries[n - run - 1].energy) ++run;
  rep.energies_eventually_decreasing = run >= std::min<std::size_t>(3, n);
  return rep;
}

}  // namespace critlab
