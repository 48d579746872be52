#include <cmath>
#include <numbers>

#include "doctest.h"
#include "critlab/criticality.hpp"
#include "critlab/error.hpp"
#include "helpers.hpp"

using namespace critlab;
using namespace testing;

TEST_CASE("singularity cutoffs") {
  CHECK(cutoff(3, 0.75, 2) == doctest::Approx(0.5));
  CHECK(cutoff(2, 1.0 / 50, 100, 10) == doctest::Approx(0.30103).epsilon(1e-5));
  CHECK(cutoff(3, 0.4, 2) == 0.0);
  for (double r : {1.0, 2.0, 10.0}) CHECK(cutoff(3, r, 2) == 1.0);
  CHECK(cutoff(2, 0.1, 100, 10) == 1.0);
  CHECK(cutoff(2, 0.005, 100, 10) == 0.0);
  CHECK_THROWS_AS(cutoff(1, 0.5, 2), Error);

  const GridSpec g = GridSpec::make(3, {-1, -1, -1}, {1, 1, 1}, 0.25, false);
  const auto a = cutoff(g, {0, 0, 0}, 2);
  CHECK(a[g.linear({7, 4, 4})] == doctest::Approx(0.5));  // |x| = 0.75
  CHECK(a[g.linear({4, 4, 4})] == 0.0);
}

TEST_CASE("cutoff energy closed forms") {
  for (double N : {2.0, 10.0, 50.0})
    CHECK(cutoff_energy_closed_form(3, N) == doctest::Approx(28 * std::numbers::pi / (3 * N)));
  CHECK(cutoff_energy_closed_form(2, 100, 10) == doctest::Approx(2 * std::numbers::pi / std::log(10)));
  CHECK(cutoff_energy_closed_form(2, 16) == doctest::Approx(2 * std::numbers::pi / std::log(4)));
}

TEST_CASE("nonnegativity of the Dirichlet Laplacian") {
  const Exhaustion ex = line_exhaustion(32, 0.5, Schedule{5, 2.0, Growth::geometric});
  const NonnegativityReport r = check_nonnegativity(laplacian(ex.outer()), ex);
  CHECK(r.nonnegative);
  CHECK(r.monotone);
  CHECK(r.first_negative_level == 0);
  for (double l : r.lambda_min) CHECK(l > 0.0);
}

TEST_CASE("half-line Hardy trichotomy") {
  const Problem super = load("hardy_c030.json");
  const ClassificationReport s = classify(super.op, super.ex);
  CHECK(s.verdict == Verdict::supercritical);
  CHECK(s.nonneg.first_negative_level > 0);
  CHECK(s.mu.empty());  // supercritical suppresses the other diagnostics

  const Problem crit = load("hardy_c025.json");
  const ClassificationReport c = classify(crit.op, crit.ex);
  CHECK(c.verdict == Verdict::critical);
  CHECK(c.nonneg.nonnegative);
  CHECK(c.nonneg.lambda_min.back() < 1e-2 * c.nonneg.lambda_min.front());

  const Problem sub = load("hardy_c020.json");
  CHECK(classify(sub.op, sub.ex).verdict == Verdict::subcritical);
}

TEST_CASE("classification is scale invariant") {
  const Exhaustion ex = line_exhaustion(64, 0.5, Schedule{6, 2.0, Growth::geometric});
  const DiscreteOperator op = laplacian(ex.outer());
  const ClassificationReport a = classify(op, ex);
  const double t = 2.5;
  const ClassificationReport b = classify(op.scaled(t), ex);
  CHECK(a.verdict == Verdict::critical);
  CHECK(b.verdict == a.verdict);
  for (std::size_t i = 0; i < a.mu.size(); ++i) {
    CHECK(b.nonneg.lambda_min[i] == doctest::Approx(t * a.nonneg.lambda_min[i]).epsilon(1e-6));
    CHECK(b.mu[i] == doctest::Approx(t * a.mu[i]).epsilon(1e-6));
    CHECK(b.green.values[i] == doctest::Approx(a.green.values[i] / t).epsilon(1e-8));
  }
}

TEST_CASE("classify needs four levels") {
  const Exhaustion ex = line_exhaustion(16, 0.5, Schedule{3, 2.0, Growth::geometric});
  CHECK_THROWS_AS(classify(laplacian(ex.outer()), ex), Error);
}

TEST_CASE("ground state of the Hardy borderline") {
  const Problem p = load("hardy_c025.json");
  const GroundState gs = ground_state(p.op, p.ex);
  CHECK(gs.phi[p.ex.x1()] == doctest::Approx(1.0));
  for (std::size_t l = 0; l < p.ex.size(); ++l) {
    const double x = p.ex.outer().coord(l)[0];
    if (x < 0.25 || x > 1.0) continue;
    CHECK(gs.phi[l] == doctest::Approx(std::sqrt(x / 0.25)).epsilon(0.02));
  }
}

TEST_CASE("ground state recovers a synthesized solution") {
  // left of the source the Green ratio is the solution vanishing at 0
  const GridSpec g = GridSpec::make(1, {0, 0, 0}, {64, 0, 0}, 1.0 / 16, false);
  Family f;
  f.kind = Family::Kind::half_space;
  const Exhaustion ex(g, f, Schedule{5, 4.0, Growth::geometric}, Markers{{1, 0, 0}, {0.25, 0, 0}, 0.5});
  GridFunction phi(ex.size());
  for (std::size_t l = 0; l < ex.size(); ++l) {
    const double x = ex.outer().coord(l)[0];
    phi[l] = std::sqrt(x) * (1 + 0.2 * std::exp(-(x - 0.5) * (x - 0.5)));
  }
  const CoefficientField A = CoefficientField::constant(ex.outer(), 1);
  const DiscreteOperator op(ex.outer(), A, synthesize_potential(ex.outer(), A, phi));
  const GroundState gs = ground_state(op, ex);
  const double p1 = phi[ex.x1()];
  for (std::size_t l = 0; l < ex.size(); ++l) {
    const double x = ex.outer().coord(l)[0];
    if (x < 0.25 || x > 1.0) continue;
    CHECK(std::abs(gs.phi[l] - phi[l] / p1) <= 1e-6);
  }
}

TEST_CASE("ground-state residual on the window stays at solver level") {
  for (int K : {4, 6}) {
    const Exhaustion ex = line_exhaustion(64, 0.5, Schedule{K, 2.0, Growth::geometric});
    const GroundState gs = ground_state(laplacian(ex.outer()), ex);
    CHECK(gs.residual <= 1e-8);
    CHECK(gs.levels_used == K);
    CHECK(gs.diffs.size() == static_cast<std::size_t>(K - 1));
  }
}

TEST_CASE("far-field ramps in d = 1") {
  const Exhaustion ex = line_exhaustion(256, 0.5, Schedule{8, 2.0, Growth::geometric});
  const DiscreteOperator op = laplacian(ex.outer());
  const GroundState gs = ground_state(op, ex);
  NullSequenceOptions o;
  o.N = {10, 100};
  o.kind = NullCutoff::ramp;
  const NullSequenceReport ns = null_sequence(op, ex, gs, o);
  REQUIRE(ns.entries.size() == 2);
  for (const auto& e : ns.entries) {
    CHECK(e.cutoff_energy == doctest::Approx(2.0 / e.N).epsilon(1e-12));
    CHECK(e.cutoff_closed_form == doctest::Approx(2.0 / e.N).epsilon(1e-12));
    CHECK(e.energy == doctest::Approx(2.0 / e.N).epsilon(0.1));
  }
  CHECK(ns.entries[1].M >= ns.entries[0].M);

  o.kind = NullCutoff::pole;
  CHECK_THROWS_AS(null_sequence(op, ex, gs, o), Error);
}

TEST_CASE("pole cutoffs in d = 3") {
  const GridSpec g = GridSpec::make(3, {-6, -6, -6}, {6, 6, 6}, 0.125, false);
  const Exhaustion ex(g, Family{}, Schedule{4, 1.5, Growth::linear}, Markers{{0, 0, 0}, {1, 0, 0}, {}});
  const DiscreteOperator op = laplacian(ex.outer());
  const GroundState gs = ground_state(op, ex);
  NullSequenceOptions o;
  o.N = {2};
  o.unit = 1.0;
  const NullSequenceReport ns = null_sequence(op, ex, gs, o);
  CHECK(ns.kind == NullCutoff::pole);
  const auto& e = ns.entries[0];
  CHECK(e.cutoff_energy == doctest::Approx(e.cutoff_closed_form).epsilon(0.2));
}

TEST_CASE("null sequences vanish on B0 when subcritical") {
  const GridSpec g = GridSpec::make(3, {-6, -6, -6}, {6, 6, 6}, 0.5, false);
  const Exhaustion ex(g, Family{}, Schedule{4, 1.5, Growth::linear}, Markers{{0, 0, 0}, {1, 0, 0}, {}});
  const DiscreteOperator op = laplacian(ex.outer());
  const ClassificationReport r = classify(op, ex);
  REQUIRE(r.verdict == Verdict::subcritical);
  const double cell = op.cell_volume();
  double prev = 1e300;
  for (double N : {1.0, 2.0, 4.0}) {
    // bump of radius 1.5 N scaled to energy 1/N
    GridFunction u(ex.size(), 0.0);
    for (std::size_t l = 0; l < ex.size(); ++l) {
      const double s = ex.dist_x0(l) / (1.5 * N);
      if (s < 1 && ex.interior(ex.levels(), l)) u[l] = (1 - s * s) * (1 - s * s);
    }
    const double scale = std::sqrt(1.0 / (N * op.quadratic_form(u)));
    double l2 = 0.0;
    for (std::size_t l = 0; l < ex.size(); ++l) {
      u[l] *= scale;
      if (ex.b0()[l]) l2 += u[l] * u[l] * cell;
    }
    // Sum_{B0} u^2 h^d <= a[u] / mu_K by definition of mu_K
    CHECK(l2 <= op.quadratic_form(u) / r.mu.back() * (1 + 1e-9));
    CHECK(l2 < prev);
    prev = l2;
  }
}

TEST_CASE("log cutoff shape") {
  const Exhaustion ex = line_exhaustion(64, 0.5, Schedule{5, 4.0, Growth::geometric});
  const GridFunction a = log_cutoff(ex, 16, 1.0);
  const auto at = [&](double x) { return a[ex.outer().local(ex.grid().nearest({x, 0, 0}))]; };
  CHECK(at(2) == 1.0);
  CHECK(at(4) == 1.0);
  CHECK(at(8) == doctest::Approx(0.5));
  CHECK(at(16) == 0.0);
  const GridFunction r = ramp_cutoff(ex, 2.0, 4.0);
  CHECK(r[ex.outer().local(ex.grid().nearest({4, 0, 0}))] == doctest::Approx(0.5));
}
