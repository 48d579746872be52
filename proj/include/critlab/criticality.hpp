#pragma once

#include <optional>
#include <string>
#include <vector>

#include "critlab/fit.hpp"
#include "critlab/green.hpp"
#include "critlab/grid.hpp"
#include "critlab/operator.hpp"
#include "critlab/solver.hpp"

namespace critlab {

enum class Verdict { critical, subcritical, supercritical, inconclusive };

const char* to_string(Verdict v);

struct Thresholds {
  double crit = 1e-3;  // eps_crit = crit * mu_1
  double sub = 1e-1;   // eps_sub = sub * mu_1
  double neg = 1e-9;   // tol_neg = neg * max_i L_ii / h^d
};

struct NonnegativityReport {
  std::vector<double> lambda_min;  // per level, unit mass h^d
  std::vector<EigStatus> status;
  double tol_neg = 0.0;
  bool nonnegative = true;
  int first_negative_level = 0;  // 0 when none
  bool monotone = true;
};

NonnegativityReport check_nonnegativity(const DiscreteOperator& op, const Exhaustion& ex,
                                        const Thresholds& th = {},
                                        const EigOptions& opts = {});

struct ClassificationReport {
  Verdict verdict = Verdict::inconclusive;
  NonnegativityReport nonneg;
  std::vector<double> mu;  // bottom of a_h[u] / sum_{B0} u^2 h^d per level
  Extrapolation mu_fit;
  GreenGrowth green;
  Thresholds thresholds;
  double eps_crit = 0.0;
  double eps_sub = 0.0;
  bool mu_vanishing = false;
  bool mu_bounded_below = false;
  bool green_diverging = false;
  bool green_cauchy = false;
  bool mu_monotone = true;
  std::string reason;
};

ClassificationReport classify(const DiscreteOperator& op, const Exhaustion& ex,
                              const Thresholds& th = {}, const EigOptions& opts = {});

struct GroundState {
  GridFunction phi;                // psi_K = g_K / g_K(x1), phi(x1) = 1
  std::vector<GridFunction> psi;   // psi_N for N = 1..K
  std::vector<double> g_x1;        // g_N(x1)
  double phi_x0 = 0.0;
  std::vector<double> diffs;       // max |psi_N - psi_{N+1}| over the metric window
  double residual = 0.0;           // max |apply(phi)| on Omega_{K-2} outside ball(x0, 3h)
  bool converged = false;
  double settle_tol = 0.0;
  int levels_used = 0;             // phi = psi_{levels_used}
  std::string diagnostic;
};

/**
 * Green-ratio ground state.  The convergence window is Omega_{K-2} minus the
 * ball of radius 3h around x0; ratios that fail to settle are reported, not
 * thrown.  With allow_singular a failed solve on the largest level (a form
 * that is singular there) is dropped and phi comes from level K-1.
 */
GroundState ground_state(const DiscreteOperator& op, const Exhaustion& ex,
                         const SolveOptions& opts = {}, double settle_tol = 1e-2,
                         bool allow_singular = false);

// Singularity cutoffs around a point, lengths measured in units of `unit`.
// d >= 3: a_N; d = 2: a_{N,M} with M defaulting to sqrt(N).  Values over all
// grid nodes in grid order.  d = 1 throws.
std::vector<double> cutoff(const GridSpec& grid, const Point& center, double N,
                           std::optional<double> M = std::nullopt, double unit = 1.0);
double cutoff(int dim, double r, double N, std::optional<double> M = std::nullopt);

// closed form of the cutoff's Dirichlet integral
double cutoff_energy_closed_form(int dim, double N, std::optional<double> M = std::nullopt,
                                 double unit = 1.0);

enum class NullCutoff { automatic, ramp, log, pole };

const char* to_string(NullCutoff c);

struct NullSequenceOptions {
  std::vector<double> N;           // cutoff indices, increasing
  NullCutoff kind = NullCutoff::automatic;  // d=1 ramp, d=2 log, d>=3 pole
  double unit = 1.0;               // length of the unit ball around x0
  std::optional<double> core;      // ramp plateau in the level coordinate
  bool keep_functions = false;
};

struct NullSequenceEntry {
  double N = 0.0;
  int M = 0;
  double energy = 0.0;
  double cutoff_energy = 0.0;       // sum of h^{d-2} (a_i - a_j)^2
  double cutoff_closed_form = 0.0;
  double l2_b0 = 0.0;
  GridFunction u;
};

struct NullSequenceReport {
  NullCutoff kind = NullCutoff::automatic;
  double C = 0.0;
  std::vector<NullSequenceEntry> entries;
  bool energies_eventually_decreasing = false;
};

/**
 * u_N = a_N phi(x1) psi_{M_N}.  M_N is the smallest level not below
 * M_{N-1} with phi(x1) psi_M <= 2C on the annulus unit/N <= |x - x0| <= unit
 * and with a_N vanishing outside interior(Omega_M).  ramp and log are
 * far-field cutoffs in the level coordinate; pole is the singularity cutoff.
 */
NullSequenceReport null_sequence(const DiscreteOperator& op, const Exhaustion& ex,
                                 const GroundState& gs, const NullSequenceOptions& opts);

// far-field cutoffs over the largest level
GridFunction ramp_cutoff(const Exhaustion& ex, double core, double width);
GridFunction log_cutoff(const Exhaustion& ex, double N, double unit);

// sum over edges of h^{d-2} (a_i - a_j)^2
double dirichlet_energy(const Domain& d, const GridFunction& a);

}  // namespace critlab
