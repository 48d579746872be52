#include "critlab/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "critlab/error.hpp"

namespace critlab {

CoefficientField CoefficientField::constant(const Domain& d, double value) {
  return {GridFunction(d.size(), value)};
}

std::vector<double> ellipticity_bounds(const CoefficientField& A, const Exhaustion& ex) {
  if (A.a.size() != ex.size())
    throw Error(ErrorCode::invalid_argument, "coefficient size does not match exhaustion");
  std::vector<double> out;
  for (int N = 1; N <= ex.levels(); ++N) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (std::size_t l = 0; l < ex.size(); ++l) {
      if (!ex.active(N, l)) continue;
      lo = std::min(lo, A.a[l]);
      hi = std::max(hi, A.a[l]);
    }
    if (!(lo > 0.0))
      throw Error(ErrorCode::ellipticity, "coefficient is not positive on level " +
                                              std::to_string(N));
    out.push_back(std::max(hi, 1.0 / lo));
  }
  return out;
}

Potential Potential::free(const Domain& d) {
  return {Preset::free, 0.0, GridFunction(d.size(), 0.0)};
}

Potential Potential::constant(const Domain& d, double c) {
  return {Preset::constant, c, GridFunction(d.size(), c)};
}

Potential Potential::custom(GridFunction values) {
  return {Preset::custom, 0.0, std::move(values)};
}

Potential Potential::inverse_square(const Domain& d, double c, const InverseSquare& geo) {
  const GridSpec& g = d.grid();
  auto rho = [&](const Point& x) {
    if (geo.center == InverseSquare::Center::half_space) return x[geo.axis] - geo.offset;
    return distance(x, geo.point, g.dim);
  };
  Potential p{Preset::inverse_square, c, GridFunction(d.size(), 0.0)};
  const double tiny = 1e-12 * g.h;
  for (std::size_t l = 0; l < d.size(); ++l) {
    const double r = rho(d.coord(l));
    if (r > tiny) {
      p.values[l] = -c / (r * r);
    } else if (d.interior(l)) {
      throw Error(ErrorCode::non_finite,
                  "inverse-square potential is singular at an interior node");
    }
  }
  if (geo.mode == InverseSquare::Mode::pointwise) return p;

  double cstar = 0.25;
  double expo = 0.5;
  if (geo.center == InverseSquare::Center::radial) {
    if (g.dim < 3)
      throw Error(ErrorCode::invalid_argument,
                  "consistent radial inverse-square needs d >= 3");
    cstar = 0.25 * (g.dim - 2) * (g.dim - 2);
    expo = -0.5 * (g.dim - 2);
  }
  auto s = [&](const Point& x) {
    const double r = rho(x);
    return r > tiny ? std::pow(r, expo) : 0.0;
  };
  const double w = std::pow(g.h, g.dim - 2);
  const double cell = g.cell_volume();
  for (std::size_t l = 0; l < d.size(); ++l) {
    if (!d.interior(l)) continue;
    const double si = s(d.coord(l));
    double lap = 0.0;
    for (int k = 0; k < d.degree(); ++k)
      lap += w * (si - s(d.coord(static_cast<std::size_t>(d.neighbor(l, k)))));
    p.values[l] = -(c / cstar) * lap / (si * cell);
  }
  return p;
}

namespace {

double edge_mean(double a, double b, EdgeMean m) {
  return m == EdgeMean::arithmetic ? 0.5 * (a + b) : 2.0 * a * b / (a + b);
}

}  // namespace

DiscreteOperator::DiscreteOperator(const Domain& domain, const CoefficientField& A,
                                   const Potential& V, EdgeMean mean)
    : domain_(std::make_shared<const Domain>(domain)),
      A_(A.a),
      V_(V.values),
      cell_(domain.grid().cell_volume()),
      mean_(mean) {
  const std::size_t n = domain.size();
  if (A_.size() != n || V_.size() != n)
    throw Error(ErrorCode::invalid_argument, "field sizes do not match the domain");
  for (std::size_t l = 0; l < n; ++l) {
    if (!(A_[l] > 0.0) || !std::isfinite(A_[l]))
      throw Error(ErrorCode::ellipticity, "coefficient must be positive and finite");
    if (!std::isfinite(V_[l]))
      throw Error(ErrorCode::non_finite, "potential is not finite at an active node");
  }
  const int deg = domain.degree();
  const double hs = std::pow(domain.grid().h, domain.grid().dim - 2);
  w_.assign(n * deg, 0.0);
  for (std::size_t l = 0; l < n; ++l)
    for (int k = 0; k < deg; ++k) {
      const long j = domain.neighbor(l, k);
      if (j >= 0) w_[l * deg + k] = edge_mean(A_[l], A_[j], mean) * hs;
    }
}

double DiscreteOperator::diagonal(std::size_t local) const {
  const int deg = domain_->degree();
  double s = 0.0;
  for (int k = 0; k < deg; ++k) s += w_[local * deg + k];
  return s + V_[local] * cell_;
}

double DiscreteOperator::max_diagonal() const {
  double m = 0.0;
  for (std::size_t l = 0; l < size(); ++l)
    if (domain_->interior(l)) m = std::max(m, std::abs(diagonal(l)));
  return m;
}

GridFunction DiscreteOperator::apply(const GridFunction& u) const {
  const Domain& d = *domain_;
  const int deg = d.degree();
  GridFunction y(size(), 0.0);
  for (std::size_t l = 0; l < size(); ++l) {
    if (!d.interior(l)) continue;
    double s = V_[l] * cell_ * u[l];
    for (int k = 0; k < deg; ++k)
      s += w_[l * deg + k] * (u[l] - u[static_cast<std::size_t>(d.neighbor(l, k))]);
    y[l] = s;
  }
  return y;
}

double DiscreteOperator::bilinear_form(const GridFunction& u, const GridFunction& v) const {
  if (u.size() != size() || v.size() != size())
    throw Error(ErrorCode::invalid_argument, "grid functions do not match the domain");
  const Domain& d = *domain_;
  const int deg = d.degree();
  double s = 0.0;
  for (std::size_t l = 0; l < size(); ++l) {
    // each edge once, from its lower endpoint along + directions
    for (int k = 1; k < deg; k += 2) {
      const long j = d.neighbor(l, k);
      if (j < 0) continue;
      s += w_[l * deg + k] * (u[l] - u[j]) * (v[l] - v[j]);
    }
    s += V_[l] * cell_ * u[l] * v[l];
  }
  return s;
}

double DiscreteOperator::quadratic_form(const GridFunction& u) const {
  return bilinear_form(u, u);
}

DiscreteOperator DiscreteOperator::shifted(const GridFunction& dV) const {
  DiscreteOperator out(*this);
  for (std::size_t l = 0; l < size(); ++l) out.V_[l] += dV[l];
  return out;
}

DiscreteOperator DiscreteOperator::scaled(double t) const {
  DiscreteOperator out(*this);
  for (auto& a : out.A_) a *= t;
  for (auto& v : out.V_) v *= t;
  for (auto& w : out.w_) w *= t;
  return out;
}

LevelOperator::LevelOperator(const DiscreteOperator& op, const Exhaustion& ex, int N)
    : LevelOperator(op, [&] {
        std::vector<std::uint8_t> m(ex.size(), 0);
        for (std::size_t l = 0; l < ex.size(); ++l) m[l] = ex.interior(N, l);
        return m;
      }()) {}

LevelOperator::LevelOperator(const DiscreteOperator& op,
                             const std::vector<std::uint8_t>& unknown) {
  const Domain& d = op.domain();
  if (unknown.size() != d.size())
    throw Error(ErrorCode::invalid_argument, "unknown mask does not match the domain");
  pos_.assign(d.size(), -1);
  for (std::size_t l = 0; l < d.size(); ++l) {
    if (!unknown[l]) continue;
    if (!d.interior(l))
      throw Error(ErrorCode::invalid_argument, "unknowns must be interior nodes");
    pos_[l] = static_cast<long>(rows_.size());
    rows_.push_back(l);
  }
  const int deg = d.degree();
  ptr_.reserve(rows_.size() + 1);
  ptr_.push_back(0);
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const std::size_t l = rows_[r];
    for (int k = 0; k < deg; ++k) {
      const long j = pos_[static_cast<std::size_t>(d.neighbor(l, k))];
      if (j < 0) continue;
      col_.push_back(static_cast<std::size_t>(j));
      val_.push_back(-op.weight(l, k));
    }
    ptr_.push_back(col_.size());
    diag_.push_back(op.diagonal(l));
    pot_.push_back(op.potential_mass(l));
  }
}

void LevelOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = rows_.size();
  for (std::size_t r = 0; r < n; ++r) {
    double s = diag_[r] * x[r];
    for (std::size_t k = ptr_[r]; k < ptr_[r + 1]; ++k) s += val_[k] * x[col_[k]];
    y[r] = s;
  }
}

double LevelOperator::lower_bound(std::span<const double> massB) const {
  // x'Ax >= sum m_i x_i^2 since the edge part is nonnegative
  double lb = 0.0;
  for (std::size_t r = 0; r < pot_.size(); ++r) {
    if (pot_[r] >= 0.0) continue;
    if (!(massB[r] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    lb = std::min(lb, pot_[r] / massB[r]);
  }
  return lb;
}

bool LevelOperator::tridiagonal(std::vector<double>& upper) const {
  const std::size_t n = rows_.size();
  upper.assign(n > 0 ? n - 1 : 0, 0.0);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t k = ptr_[r]; k < ptr_[r + 1]; ++k) {
      if (col_[k] + 1 == r) continue;
      if (col_[k] != r + 1) return false;
      upper[r] = val_[k];
    }
  return true;
}

std::vector<double> LevelOperator::restrict_to(const GridFunction& u) const {
  std::vector<double> x(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) x[r] = u[rows_[r]];
  return x;
}

GridFunction LevelOperator::expand(std::span<const double> x) const {
  GridFunction u(pos_.size(), 0.0);
  for (std::size_t r = 0; r < rows_.size(); ++r) u[rows_[r]] = x[r];
  return u;
}

TransformCheck ground_state_transform_check(const DiscreteOperator& op,
                                            const GridFunction& phi,
                                            const GridFunction& v) {
  const Domain& d = op.domain();
  const std::size_t n = d.size();
  if (phi.size() != n || v.size() != n)
    throw Error(ErrorCode::invalid_argument, "grid functions do not match the domain");
  for (double p : phi)
    if (!(p > 0.0)) throw Error(ErrorCode::nonpositive, "phi must be positive");
  GridFunction pv(n);
  for (std::size_t l = 0; l < n; ++l) pv[l] = phi[l] * v[l];

  TransformCheck out;
  out.lhs = op.quadratic_form(pv);
  const int deg = d.degree();
  double rhs = 0.0;
  for (std::size_t l = 0; l < n; ++l)
    for (int k = 1; k < deg; k += 2) {
      const long j = d.neighbor(l, k);
      if (j < 0) continue;
      const double dv = v[l] - v[j];
      rhs += op.weight(l, k) * phi[l] * phi[j] * dv * dv;
    }
  out.rhs = rhs;

  const GridFunction res = op.apply(phi);
  double mass = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    if (!d.interior(l) || pv[l] == 0.0) continue;
    out.residual = std::max(out.residual, std::abs(res[l]));
    mass += phi[l] * v[l] * v[l];
  }
  out.bound = out.residual * mass;
  return out;
}

Potential synthesize_potential(const Domain& d, const CoefficientField& A,
                               const GridFunction& phi, EdgeMean mean) {
  if (phi.size() != d.size())
    throw Error(ErrorCode::invalid_argument, "phi does not match the domain");
  // boundary values are data only; a ground state may vanish there
  for (std::size_t l = 0; l < d.size(); ++l)
    if (d.interior(l) ? !(phi[l] > 0.0) : !(phi[l] >= 0.0))
      throw Error(ErrorCode::nonpositive, "phi must be positive inside the domain");
  const DiscreteOperator free_op(d, A, Potential::free(d), mean);
  const GridFunction lap = free_op.apply(phi);
  const double cell = d.grid().cell_volume();
  GridFunction V(d.size(), 0.0);
  for (std::size_t l = 0; l < d.size(); ++l)
    if (d.interior(l)) V[l] = -lap[l] / (phi[l] * cell);
  return Potential::custom(std::move(V));
}

}  // namespace critlab
