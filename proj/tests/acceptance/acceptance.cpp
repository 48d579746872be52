// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "critlab/config.hpp"
#include "critlab/criticality.hpp"
#include "critlab/gap.hpp"
#include "critlab/green.hpp"
#include "critlab/varcrit.hpp"
#include "oracles.hpp"

using namespace critlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

std::string f(const char* fmt, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, fmt, a, b, c);
  return buf;
}

Problem load(const std::string& name) {
  return build_problem(load_config(std::string(CRITLAB_SOURCE_DIR) + "/configs/" + name));
}

// Dirichlet monotonicity records gathered while the other criteria run
struct Monotone {
  std::string where;
  bool ok;
};
std::vector<Monotone> monotone_log;

void log_nonneg(const std::string& where, const NonnegativityReport& r) {
  monotone_log.push_back({where + " lambda_min", r.monotone});
}
void log_nu(const std::string& where, const std::vector<double>& nu) {
  monotone_log.push_back({where + " nu", nonincreasing(nu, 1e-8)});
}

Exhaustion interval(double h, int K, double r0, double x0, double x1) {
  const GridSpec g = GridSpec::make(1, {0, 0, 0}, {1, 0, 0}, h, false);
  Family fam;
  fam.kind = Family::Kind::inset;
  return Exhaustion(g, fam, Schedule{K, r0, Growth::inset}, Markers{{x0, 0, 0}, {x1, 0, 0}, {}});
}

DiscreteOperator laplacian(const Domain& d) {
  return DiscreteOperator(d, CoefficientField::constant(d, 1.0), Potential::free(d));
}

Outcome green_exactness() {
  Outcome o;
  const Exhaustion ex = interval(1.0 / 64, 4, 0.125, 0.5, 0.25);
  const DiscreteOperator op = laplacian(ex.outer());
  const GreenColumn g = green_column(op, ex, ex.levels(), ex.x0());
  double err = 0.0;
  for (std::size_t l = 0; l < ex.size(); ++l)
    err = std::max(err, std::abs(g.g[l] - oracle::interval_green(ex.outer().coord(l)[0], 0.5)));
  o.require(err <= 1e-10, f("max |g - x(1-y)| = %.2e", err));
  log_nonneg("interval", check_nonnegativity(op, ex));
  return o;
}

Outcome free_dichotomy() {
  Outcome o;
  const char* names[] = {"laplace_d1.json", "laplace_d2.json", "laplace_d3.json"};
  const Verdict want[] = {Verdict::critical, Verdict::critical, Verdict::subcritical};
  for (int i = 0; i < 3; ++i) {
    const Problem p = load(names[i]);
    const ClassificationReport r =
        classify(p.op, p.ex, p.config.tol.thresholds, eig_options(p.config.tol));
    log_nonneg(names[i], r.nonneg);
    o.require(r.verdict == want[i],
              "d=" + std::to_string(i + 1) + " " + to_string(r.verdict));
    if (i == 2) {
      const double ref = oracle::green_r3(1.0);
      const double gK = r.green.values.back();
      const double ginf = r.green.fit.limit;
      o.require(std::abs(ginf - ref) <= 0.1 * ref,
                f("d=3 G(|x1-x0|=1) extrapolated %.4f vs 1/(4pi) = %.4f (last level %.4f)",
                  ginf, ref, gK));
    }
  }
  return o;
}

Outcome hardy_trichotomy() {
  Outcome o;
  {
    const Problem p = load("hardy_c030.json");
    const ClassificationReport r =
        classify(p.op, p.ex, p.config.tol.thresholds, eig_options(p.config.tol));
    log_nonneg("hardy 0.30", r.nonneg);
    o.require(r.verdict == Verdict::supercritical && r.nonneg.first_negative_level > 0,
              std::string("c=0.30 ") + to_string(r.verdict) + " (negative from level " +
                  std::to_string(r.nonneg.first_negative_level) + ")");
  }
  {
    const Problem p = load("hardy_c020.json");
    const auto eo = eig_options(p.config.tol);
    const ClassificationReport r = classify(p.op, p.ex, p.config.tol.thresholds, eo);
    log_nonneg("hardy 0.20", r.nonneg);
    o.require(r.verdict == Verdict::subcritical, std::string("c=0.20 ") + to_string(r.verdict));
    // W = 0.05/x^2 sits exactly at the borderline with c = 0.20
    GridFunction W(p.ex.size(), 0.0);
    for (std::size_t l = 0; l < p.ex.size(); ++l) {
      const double x = p.ex.outer().coord(l)[0];
      W[l] = x > 0.0 ? 0.05 / (x * x) : 0.0;
    }
    const GapCertificate g = verify_gap(p.op, W, p.ex, p.config.tol.thresholds, eo);
    log_nu("hardy 0.20 gap", g.nu);
    const double nu_min = *std::min_element(g.nu.begin(), g.nu.end());
    o.require(nu_min >= 1.0 - 1e-6, f("min nu_N = %.4f", nu_min));
  }
  {
    const Problem p = load("hardy_c025.json");
    const ClassificationReport r =
        classify(p.op, p.ex, p.config.tol.thresholds, eig_options(p.config.tol));
    log_nonneg("hardy 0.25", r.nonneg);
    o.require(r.verdict == Verdict::critical, std::string("c=0.25 ") + to_string(r.verdict));
    const GroundState gs = ground_state(p.op, p.ex, solve_options(p.config.tol),
                                        p.config.tol.settle, true);
    const double x1 = p.config.markers.x1[0];
    double err = 0.0;
    for (std::size_t l = 0; l < p.ex.size(); ++l) {
      const double x = p.ex.outer().coord(l)[0];
      if (x < x1 - 1e-12 || x > 4 * x1 + 1e-12) continue;
      const double ref = std::sqrt(x / x1);
      err = std::max(err, std::abs(gs.phi[l] - ref) / ref);
    }
    o.require(err <= 0.02, f("ground state vs sqrt(x/x1) on [x1,4x1]: %.2e", err));
  }
  return o;
}

// checks shared by every critical null sequence
void check_null_sequence(Outcome& o, const std::string& name, const NullSequenceReport& ns,
                         const std::function<double(double)>& closed,
                         const std::function<bool(double)>& resolved, double closed_tol) {
  const auto& e = ns.entries;
  const double ratio = e.back().energy / e.front().energy;
  o.require(ns.energies_eventually_decreasing && ratio <= 0.1,
            name + f(" energy %.3g -> %.3g (ratio %.3f)", e.front().energy, e.back().energy,
                     ratio));
  double worst = 0.0;
  int checked = 0;
  for (const auto& x : e) {
    if (!resolved(x.N)) continue;
    ++checked;
    const double ref = closed(x.N);
    worst = std::max(worst, std::abs(x.cutoff_energy - ref) / ref);
  }
  o.require(checked >= 3 && worst <= closed_tol,
            name + f(" cutoff energies vs closed form: worst %.3f over %g entries", worst,
                     checked));
  double lo = 1e300, hi = 0.0;
  for (const auto& x : e) {
    lo = std::min(lo, x.l2_b0 / e.front().l2_b0);
    hi = std::max(hi, x.l2_b0 / e.front().l2_b0);
  }
  o.require(lo >= 0.5 && hi <= 2.0, name + f(" L2(B0) envelope [%.3f, %.3f]", lo, hi));
}

NullSequenceReport run_null_sequence(const Problem& p, bool keep = false) {
  const GroundState gs =
      ground_state(p.op, p.ex, solve_options(p.config.tol), p.config.tol.settle, true);
  NullSequenceOptions no;
  no.N = p.config.nullseq.N;
  no.kind = p.config.nullseq.kind;
  no.unit = p.config.nullseq.unit;
  no.core = p.config.nullseq.core;
  no.keep_functions = keep;
  return null_sequence(p.op, p.ex, gs, no);
}

Outcome null_sequences() {
  Outcome o;
  {
    const Problem p = load("laplace_d1.json");
    check_null_sequence(o, "d=1", run_null_sequence(p), [](double N) { return 2.0 / N; },
                        [](double) { return true; }, 0.05);
  }
  {
    const Problem p = load("laplace_d2.json");
    const double unit = p.config.nullseq.unit, h = p.config.h;
    check_null_sequence(
        o, "d=2", run_null_sequence(p),
        [](double N) { return 2.0 * std::numbers::pi / std::log(N / std::sqrt(N)); },
        // the log ramp must span at least two cells to be seen by the grid
        [=](double N) { return unit * (N - std::sqrt(N)) >= 2.0 * h; }, 0.2);
  }
  {
    const Problem p = load("hardy_c025.json");
    const double unit = p.config.nullseq.unit;
    // one-sided 1D log ramp between unit sqrt(N) and unit N
    check_null_sequence(
        o, "hardy", run_null_sequence(p),
        [=](double N) {
          const double L = std::log(std::sqrt(N));
          return (1.0 / std::sqrt(N) - 1.0 / N) / (unit * L * L);
        },
        [](double) { return true; }, 0.2);
  }
  return o;
}

Exhaustion line_exhaustion(double R, double h, Schedule s) {
  const GridSpec g = GridSpec::make(1, {-R, 0, 0}, {R, 0, 0}, h, false);
  return Exhaustion(g, Family{}, s, Markers{{0, 0, 0}, {0.5, 0, 0}, {}});
}

GridFunction bump(const Exhaustion& ex, double radius, bool odd) {
  GridFunction psi(ex.size());
  for (std::size_t l = 0; l < ex.size(); ++l) {
    const double x = ex.outer().coord(l)[0];
    const double s = std::abs(x) / radius;
    psi[l] = s < 1.0 ? (1 - s * s) * (1 - s * s) : 0.0;
    if (odd) psi[l] *= x > 0 ? 1.0 : x < 0 ? -1.0 : 0.0;
  }
  return psi;
}

Outcome poincare_dichotomy() {
  Outcome o;
  const Exhaustion ex = line_exhaustion(32, 0.25, Schedule{32, 1.0, Growth::linear});
  const DiscreteOperator op = laplacian(ex.outer());
  const GroundState gs = ground_state(op, ex, {}, 1e-2, true);
  GridFunction W(ex.size());
  for (std::size_t l = 0; l < ex.size(); ++l) W[l] = ex.b0()[l] ? 1.0 : 0.0;
  for (bool odd : {false, true}) {
    const GridFunction psi = bump(ex, 1.0, odd);
    const PoincareCertificate c = poincare_certificate(op, ex, gs, psi, W, 1.0);
    log_nu(odd ? "poincare odd" : "poincare even", c.nu);
    const double n4 = c.nu[3];
    if (!odd) {
      const double floor = std::min({c.nu[7], c.nu[15], c.nu[31]});
      o.require(floor >= 0.5 * n4,
                f("symmetric psi: min(nu8,nu16,nu32) = %.4f vs nu4 = %.4f", floor, n4));
    } else {
      o.require(c.nu[31] <= n4 / 4,
                f("odd psi (pairing %.1e): nu32 = %.4g vs nu4 = %.4g", c.pairing, c.nu[31], n4));
    }
  }

  // pairing along a null sequence on a longer line
  const Exhaustion ex2 = line_exhaustion(1024, 0.5, Schedule{10, 2.0, Growth::geometric});
  const DiscreteOperator op2 = laplacian(ex2.outer());
  const GroundState gs2 = ground_state(op2, ex2, {}, 1e-2, true);
  NullSequenceOptions no;
  for (double N = 2; N <= 256; N *= 2) no.N.push_back(N);
  no.kind = NullCutoff::ramp;
  no.keep_functions = true;
  const NullSequenceReport ns = null_sequence(op2, ex2, gs2, no);
  const GridFunction psi = bump(ex2, 1.0, false);
  const double cell = op2.cell_volume();
  double pair_phi = 0.0, phi_b0 = 0.0;
  for (std::size_t l = 0; l < ex2.size(); ++l) {
    pair_phi += psi[l] * gs2.phi[l] * cell;
    if (ex2.b0()[l]) phi_b0 += gs2.phi[l] * gs2.phi[l] * cell;
  }
  // u_N -> c phi on B0
  const double c_est = ns.entries.back().l2_b0 / std::sqrt(phi_b0);
  const auto pts = pairing_along_sequence(ns, psi, cell);
  int small = 0;
  bool ok = true;
  double worst = 1e300;
  for (const auto& pt : pts) {
    if (pt.energy > 1e-2) continue;
    ++small;
    worst = std::min(worst, std::abs(pt.pairing));
    ok = ok && std::abs(pt.pairing) >= 0.5 * std::abs(pair_phi * c_est);
  }
  o.require(small > 0 && ok,
            f("pairing %.4f >= 0.5 |<psi,phi> c| = %.4f at energies <= 1e-2 (final energy %.2e)",
              worst, 0.5 * std::abs(pair_phi * c_est), pts.back().energy));
  return o;
}

Outcome weight_synthesis() {
  Outcome o;
  const Problem p = load("laplace_d3.json");
  const auto eo = eig_options(p.config.tol);
  const ClassificationReport r = classify(p.op, p.ex, p.config.tol.thresholds, eo);
  const WeightConstruction w = construct_weight(p.op, p.ex, eo, &r);
  log_nu("d=3 constructed weight", w.lambda0.lambda);
  o.require(w.positive, "W > 0 on the second largest level");
  o.require(w.min_slack >= -1e-10, f("min(u - sum G W u) = %.3e", w.min_slack));
  o.require(w.lambda0.fit.limit > 0.0, f("lambda_inf = %.4f", w.lambda0.fit.limit));
  return o;
}

Outcome critical_refinement() {
  Outcome o;
  const Problem p = load("interval_refine.json");
  const auto eo = eig_options(p.config.tol);
  const ClassificationReport r = classify(p.op, p.ex, p.config.tol.thresholds, eo);
  VariationalProblem vp;
  vp.W0 = evaluate_field(p.config.refine.W0, p.ex);
  vp.p = p.config.refine.p;
  const Minimizer m = minimize_constrained(p.op, vp, p.ex, eo, &r);
  const double ref = oracle::shooting_kappa();
  o.require(std::abs(m.kappa - ref) <= 1e-3 * ref,
            f("kappa %.8f vs shooting %.8f", m.kappa, ref));
  o.require(m.constraint_residual <= 1e-10, f("constraint residual %.1e", m.constraint_residual));
  // energy by explicit differences over the active nodes
  const double h = p.config.h;
  double energy = 0.0;
  for (std::size_t l = 0; l + 1 < p.ex.size(); ++l) {
    const double dv = m.v[l + 1] - m.v[l];
    energy += dv * dv / h;
  }
  o.require(std::abs(energy - m.kappa) <= 1e-10 * m.kappa,
            f("|a_h[v] - kappa| = %.1e", std::abs(energy - m.kappa)));

  const GridFunction W = build_critical_potential(m.kappa, m.v, vp.W0, vp.p, p.ex);
  const RefinementCheck chk = verify_refinement(p.op, W, p.ex, m.v, p.config.tol.thresholds, eo,
                                                p.config.tol.residual, p.config.tol.match);
  log_nonneg("refined L - W", chk.nonneg);
  o.require(chk.nonnegative && chk.critical && chk.ground_state_match,
            f("refinement nonneg %g critical %g ground state %g", chk.nonnegative, chk.critical,
              chk.ground_state_match));

  const double t = 3.0;
  VariationalProblem scaled = vp;
  for (auto& x : scaled.W0) x *= t;
  const Minimizer ms = minimize_constrained(p.op, scaled, p.ex, eo, &r);
  const double want = m.kappa * std::pow(t, -2.0 / vp.p);
  o.require(std::abs(ms.kappa - want) <= 1e-8 * want,
            f("scaled kappa %.10f vs %.10f", ms.kappa, want));
  return o;
}

Domain random_box(int dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n(4, dim == 1 ? 40 : 12);
  Point hi{0, 0, 0};
  const double h = 0.25;
  for (int a = 0; a < dim; ++a) hi[a] = h * n(rng);
  return build_domain(GridSpec::make(dim, {0, 0, 0}, hi, h, false), Shape::box());
}

Outcome identities() {
  Outcome o;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double worst_transform = 0.0, worst_sym = 0.0;
  int abs_fail = 0;
  for (int dim : {1, 2}) {
    for (int trial = 0; trial < 100; ++trial) {
      const Domain d = random_box(dim, rng);
      CoefficientField A{GridFunction(d.size())};
      GridFunction phi(d.size()), v(d.size(), 0.0), u(d.size()), w(d.size());
      for (std::size_t l = 0; l < d.size(); ++l) {
        A.a[l] = 0.5 + U(rng);
        phi[l] = 0.5 + U(rng);
        if (d.interior(l)) v[l] = 2 * U(rng) - 1;
        u[l] = 2 * U(rng) - 1;
        w[l] = 2 * U(rng) - 1;
      }
      const Potential V = synthesize_potential(d, A, phi);
      const DiscreteOperator op(d, A, V);
      const TransformCheck tc = ground_state_transform_check(op, phi, v);
      worst_transform = std::max(worst_transform, std::abs(tc.lhs - tc.rhs) / std::abs(tc.rhs));

      const double b1 = op.bilinear_form(u, w), b2 = op.bilinear_form(w, u);
      worst_sym = std::max(worst_sym, std::abs(b1 - b2) / std::max(std::abs(b1), 1e-300));
      GridFunction au(u);
      for (auto& x : au) x = std::abs(x);
      if (op.quadratic_form(au) > op.quadratic_form(u) * (1 + 1e-14) + 1e-14) ++abs_fail;
    }
  }
  o.require(worst_transform <= 1e-12, f("ground-state transform rel. error %.1e", worst_transform));
  o.require(worst_sym <= 1e-12, f("bilinear asymmetry %.1e", worst_sym));
  o.require(abs_fail == 0, f("a[|u|] > a[u] in %g of 200 cases", abs_fail));

  int bad = 0;
  std::string which;
  for (const auto& m : monotone_log)
    if (!m.ok) {
      ++bad;
      which += " " + m.where;
    }
  o.require(bad == 0, f("Dirichlet monotonicity over %g sequences", monotone_log.size()) + which);
  return o;
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* title;
    Outcome (*run)();
  };
  const Item items[] = {
      {1, "interval Green function", green_exactness},
      {2, "free Laplacian dichotomy", free_dichotomy},
      {3, "half-line Hardy trichotomy", hardy_trichotomy},
      {4, "null sequences", null_sequences},
      {5, "augmented Poincare inequality", poincare_dichotomy},
      {6, "weight synthesis", weight_synthesis},
      {7, "variational critical refinement", critical_refinement},
      {8, "exact identities and monotonicity", identities},
  };
  int failed = 0;
  for (const auto& it : items) {
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %d %s: %s (%s)\n", it.id, it.title, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
