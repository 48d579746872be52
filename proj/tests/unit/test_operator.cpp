#include <cmath>
#include <random>

#include "doctest.h"
#include "critlab/error.hpp"
#include "helpers.hpp"

using namespace critlab;
using namespace testing;

namespace {
GridFunction indicator(std::size_t n, std::initializer_list<std::size_t> on) {
  GridFunction u(n, 0.0);
  for (auto i : on) u[i] = 1.0;
  return u;
}
}  // namespace

TEST_CASE("assembly weights") {
  const Domain d1 = line(0, 4, 1);
  const DiscreteOperator op1 = laplacian(d1);
  for (std::size_t l = 0; l < d1.size(); ++l)
    for (int k = 0; k < 2; ++k)
      if (d1.neighbor(l, k) >= 0) CHECK(op1.weight(l, k) == 1.0);

  const Domain d3 = build_domain(GridSpec::make(3, {0, 0, 0}, {1, 1, 1}, 0.5, false), Shape::box());
  const DiscreteOperator op3 = laplacian(d3, 2.0);
  const std::size_t c = d3.local(d3.grid().linear({1, 1, 1}));
  for (int k = 0; k < 6; ++k) CHECK(op3.weight(c, k) == doctest::Approx(1.0));

  const Domain dh = line(0, 2, 0.5);
  const DiscreteOperator oph(dh, CoefficientField::constant(dh, 1), Potential::constant(dh, 1.0));
  CHECK(oph.potential_mass(2) == doctest::Approx(0.5));
}

TEST_CASE("harmonic edge means") {
  const Domain d = line(0, 2, 1);
  CoefficientField A{{1.0, 3.0, 1.0}};
  const DiscreteOperator ar(d, A, Potential::free(d));
  const DiscreteOperator hm(d, A, Potential::free(d), EdgeMean::harmonic);
  CHECK(ar.weight(0, 1) == doctest::Approx(2.0));
  CHECK(hm.weight(0, 1) == doctest::Approx(1.5));
  CHECK(ar.weight(0, 0) == 0.0);
}

TEST_CASE("quadratic form by hand") {
  const Domain d = line(0, 4, 1);
  const DiscreteOperator op = laplacian(d);
  CHECK(op.quadratic_form(indicator(5, {2})) == doctest::Approx(2.0));
  CHECK(op.quadratic_form(indicator(5, {1, 2})) == doctest::Approx(2.0));

  const Domain dh = line(0, 2, 0.5);
  const DiscreteOperator oph(dh, CoefficientField::constant(dh, 1), Potential::constant(dh, 1.0));
  CHECK(oph.quadratic_form(indicator(5, {2})) == doctest::Approx(4.5));
}

TEST_CASE("bilinear form") {
  const Domain d = build_domain(GridSpec::make(2, {0, 0, 0}, {2, 2, 0}, 0.25, false), Shape::box());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1, 1);
  GridFunction V(d.size()), u(d.size()), v(d.size()), w(d.size());
  for (std::size_t l = 0; l < d.size(); ++l) {
    V[l] = 4 * U(rng);
    u[l] = U(rng);
    v[l] = U(rng);
    w[l] = U(rng);
  }
  const DiscreteOperator op(d, CoefficientField::constant(d, 1.3), Potential::custom(V));
  const double a = op.bilinear_form(u, v);
  CHECK(std::abs(a - op.bilinear_form(v, u)) <= 1e-13 * std::abs(a));
  GridFunction uw(d.size());
  for (std::size_t l = 0; l < d.size(); ++l) uw[l] = u[l] + w[l];
  CHECK(std::abs(op.bilinear_form(uw, v) - a - op.bilinear_form(w, v)) <= 1e-12);

  // disjoint, non-adjacent supports
  const DiscreteOperator free_op = laplacian(d);
  GridFunction p(d.size(), 0.0), q(d.size(), 0.0);
  p[d.local(d.grid().linear({1, 1, 0}))] = 1.0;
  q[d.local(d.grid().linear({5, 5, 0}))] = 1.0;
  CHECK(free_op.bilinear_form(p, q) == 0.0);
}

TEST_CASE("apply") {
  const Domain d = line(0, 1, 1.0 / 8);
  const DiscreteOperator op = laplacian(d);
  const GridFunction ones(d.size(), 1.0);
  GridFunction lin(d.size()), g(d.size());
  for (std::size_t l = 0; l < d.size(); ++l) {
    const double x = d.coord(l)[0];
    lin[l] = 3 * x - 1;
    g[l] = x < 0.5 ? x * 0.5 : 0.5 * (1 - x);
  }
  const GridFunction a = op.apply(ones), b = op.apply(lin), c = op.apply(g);
  for (std::size_t l = 0; l < d.size(); ++l) {
    if (!d.interior(l)) continue;
    CHECK(a[l] == 0.0);
    CHECK(std::abs(b[l]) <= 1e-12);
    CHECK(c[l] == doctest::Approx(l == 4 ? 1.0 : 0.0));
  }
}

TEST_CASE("quadratic form equals u . apply(u) for zero boundary data") {
  const Domain d = build_domain(GridSpec::make(2, {0, 0, 0}, {1, 1, 0}, 0.125, false), Shape::box());
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-1, 1);
  GridFunction u(d.size(), 0.0), V(d.size());
  for (std::size_t l = 0; l < d.size(); ++l) {
    V[l] = U(rng);
    if (d.interior(l)) u[l] = U(rng);
  }
  const DiscreteOperator op(d, CoefficientField::constant(d, 1), Potential::custom(V));
  const GridFunction Lu = op.apply(u);
  double s = 0.0;
  for (std::size_t l = 0; l < d.size(); ++l) s += u[l] * Lu[l];
  const double a = op.quadratic_form(u);
  CHECK(std::abs(a - s) <= 1e-12 * std::abs(a));
}

TEST_CASE("ground-state transform with phi = 1") {
  const Domain d = line(0, 4, 0.5);
  const DiscreteOperator op = laplacian(d);
  GridFunction v(d.size(), 0.0);
  v[3] = 1.0;
  v[4] = -2.0;
  const TransformCheck t = ground_state_transform_check(op, GridFunction(d.size(), 1.0), v);
  CHECK(t.lhs == doctest::Approx(op.quadratic_form(v)));
  CHECK(t.rhs == doctest::Approx(t.lhs));
  CHECK(t.residual == 0.0);
}

TEST_CASE("ground-state transform with an approximate ground state reports a bound") {
  const Domain d = line(0, 4, 0.25);
  const DiscreteOperator op = laplacian(d);
  GridFunction phi(d.size()), v(d.size(), 0.0);
  for (std::size_t l = 0; l < d.size(); ++l) {
    const double x = d.coord(l)[0];
    phi[l] = 1.0 + 0.01 * std::sin(x);
    if (d.interior(l)) v[l] = std::cos(x);
  }
  const TransformCheck t = ground_state_transform_check(op, phi, v);
  CHECK(t.residual > 0.0);
  CHECK(std::abs(t.lhs - t.rhs) <= t.bound * (1 + 1e-9));
}

TEST_CASE("synthesized potentials") {
  const Domain d = line(0, 6, 1);
  const CoefficientField A = CoefficientField::constant(d, 1);
  const Potential zero = synthesize_potential(d, A, GridFunction(d.size(), 1.0));
  for (double v : zero.values) CHECK(v == 0.0);

  GridFunction pow2(d.size());
  for (std::size_t l = 0; l < d.size(); ++l) pow2[l] = std::ldexp(1.0, static_cast<int>(l));
  const Potential half = synthesize_potential(d, A, pow2);
  for (std::size_t l = 0; l < d.size(); ++l)
    CHECK(half.values[l] == (d.interior(l) ? 0.5 : 0.0));

  const Domain g = line(-3, 3, 0.1);
  GridFunction phi(g.size());
  for (std::size_t l = 0; l < g.size(); ++l) phi[l] = std::exp(-std::pow(g.coord(l)[0], 2));
  const CoefficientField Ag = CoefficientField::constant(g, 1);
  const DiscreteOperator op(g, Ag, synthesize_potential(g, Ag, phi));
  const GridFunction r = op.apply(phi);
  for (std::size_t l = 0; l < g.size(); ++l)
    if (g.interior(l)) CHECK(std::abs(r[l]) <= 1e-14);

  phi[0] = 0.0;  // boundary zeros are allowed
  CHECK_NOTHROW(synthesize_potential(g, Ag, phi));
  phi[5] = 0.0;
  CHECK_THROWS_AS(synthesize_potential(g, Ag, phi), Error);
}

TEST_CASE("consistent half-line inverse square makes sqrt(x) harmonic") {
  const Domain d = line(0, 8, 0.125);
  InverseSquare geo;
  geo.center = InverseSquare::Center::half_space;
  geo.mode = InverseSquare::Mode::consistent;
  const DiscreteOperator op(d, CoefficientField::constant(d, 1),
                            Potential::inverse_square(d, 0.25, geo));
  GridFunction s(d.size());
  for (std::size_t l = 0; l < d.size(); ++l) s[l] = std::sqrt(d.coord(l)[0]);
  const GridFunction r = op.apply(s);
  for (std::size_t l = 0; l < d.size(); ++l)
    if (d.interior(l)) CHECK(std::abs(r[l]) <= 1e-12);

  geo.mode = InverseSquare::Mode::pointwise;
  const Potential p = Potential::inverse_square(d, 0.3, geo);
  CHECK(p.values[8] == doctest::Approx(-0.3));  // x = 1
  CHECK(p.values[0] == 0.0);                    // boundary node at the singularity
}

TEST_CASE("shifted and scaled operators") {
  const Domain d = line(0, 2, 0.5);
  const DiscreteOperator op = laplacian(d);
  const DiscreteOperator s = op.shifted(GridFunction(d.size(), 2.0));
  const GridFunction u = indicator(5, {2});
  CHECK(s.quadratic_form(u) == doctest::Approx(op.quadratic_form(u) + 2.0 * 0.5));
  CHECK(op.scaled(3.0).quadratic_form(u) == doctest::Approx(3.0 * op.quadratic_form(u)));
}

TEST_CASE("ellipticity bounds per level") {
  const Exhaustion ex = line_exhaustion(8, 0.5, Schedule{3, 2.0, Growth::geometric});
  CoefficientField A{GridFunction(ex.size(), 1.0)};
  A.a[ex.outer().local(ex.grid().nearest({7, 0, 0}))] = 0.25;
  const auto b = ellipticity_bounds(A, ex);
  CHECK(b[0] == doctest::Approx(1.0));
  CHECK(b[2] == doctest::Approx(4.0));
}
