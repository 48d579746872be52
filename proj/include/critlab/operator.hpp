#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "critlab/grid.hpp"
#include "critlab/solver.hpp"

namespace critlab {

enum class EdgeMean { arithmetic, harmonic };

// Scalar conductivity A(x) > 0 per active node.
struct CoefficientField {
  GridFunction a;
  static CoefficientField constant(const Domain& d, double value);
};

// Per-level ellipticity constants lambda_N = max(max A, 1/min A) over level N.
std::vector<double> ellipticity_bounds(const CoefficientField& A, const Exhaustion& ex);

struct InverseSquare {
  enum class Center { radial, half_space };
  enum class Mode { pointwise, consistent };
  Center center = Center::radial;
  Point point{0.0, 0.0, 0.0};  // radial center
  int axis = 0;                // half_space distance rho = x[axis] - offset
  double offset = 0.0;
  Mode mode = Mode::pointwise;
};

struct Potential {
  enum class Preset { free, constant, inverse_square, file, custom };
  Preset preset = Preset::free;
  double c = 0.0;
  GridFunction values;  // V per active node (units 1/length^2)

  static Potential free(const Domain& d);
  static Potential constant(const Domain& d, double c);
  static Potential custom(GridFunction values);
  /**
   * V = -c/rho^2.  pointwise samples the formula at nodes.  consistent uses
   * V = (c/c*) (Delta_h s)/s with s the borderline solution (sqrt(rho) on a
   * half-space, |x|^{-(d-2)/2} radially, c* the matching Hardy constant), so
   * that c = c* is exactly critical on the grid.
   */
  static Potential inverse_square(const Domain& d, double c, const InverseSquare& geo);
};

/**
 * L_h u = sum_j w_ij (u_i - u_j) + V_i h^d u_i on interior nodes, zero
 * Dirichlet data outside.  Edge weights w_ij = mean(A_i, A_j) h^{d-2}.
 */
class DiscreteOperator {
 public:
  DiscreteOperator(const Domain& domain, const CoefficientField& A, const Potential& V,
                   EdgeMean mean = EdgeMean::arithmetic);

  const Domain& domain() const { return *domain_; }
  std::size_t size() const { return domain_->size(); }
  double weight(std::size_t local, int k) const {
    return w_[local * static_cast<std::size_t>(domain_->degree()) + k];
  }
  double potential(std::size_t local) const { return V_[local]; }
  double potential_mass(std::size_t local) const { return V_[local] * cell_; }
  double cell_volume() const { return cell_; }
  const GridFunction& coefficient() const { return A_; }
  const GridFunction& potential_values() const { return V_; }
  EdgeMean mean() const { return mean_; }
  double diagonal(std::size_t local) const;
  double max_diagonal() const;

  GridFunction apply(const GridFunction& u) const;
  double quadratic_form(const GridFunction& u) const;
  double bilinear_form(const GridFunction& u, const GridFunction& v) const;

  // Same geometry and conductivity, potential V + dV.
  DiscreteOperator shifted(const GridFunction& dV) const;
  DiscreteOperator scaled(double t) const;  // A -> tA, V -> tV

 private:
  std::shared_ptr<const Domain> domain_;
  GridFunction A_;
  GridFunction V_;
  std::vector<double> w_;
  double cell_ = 1.0;
  EdgeMean mean_ = EdgeMean::arithmetic;
};

/**
 * Principal submatrix of an operator over a set of unknown nodes (the
 * interior of an exhaustion level), with zero Dirichlet values elsewhere.
 * Vectors are compact over the unknowns.
 */
class LevelOperator : public LinearOperator {
 public:
  LevelOperator(const DiscreteOperator& op, const std::vector<std::uint8_t>& unknown);
  LevelOperator(const DiscreteOperator& op, const Exhaustion& ex, int N);

  std::size_t size() const override { return rows_.size(); }
  void apply(std::span<const double> x, std::span<double> y) const override;
  std::vector<double> diagonal() const override { return diag_; }
  bool z_matrix() const override { return true; }
  double lower_bound(std::span<const double> massB) const override;
  bool tridiagonal(std::vector<double>& upper) const override;

  const std::vector<std::size_t>& unknowns() const { return rows_; }
  long position(std::size_t local) const { return pos_[local]; }
  std::vector<double> restrict_to(const GridFunction& u) const;
  GridFunction expand(std::span<const double> x) const;
  std::size_t domain_size() const { return pos_.size(); }

 private:
  std::vector<std::size_t> rows_;
  std::vector<long> pos_;
  std::vector<std::size_t> ptr_;
  std::vector<std::size_t> col_;
  std::vector<double> val_;
  std::vector<double> diag_;
  std::vector<double> pot_;
};

struct TransformCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  // max |apply(phi)| over interior nodes where v phi != 0
  double bound = 0.0;     // residual * sum phi v^2, bounds |lhs - rhs|
};

TransformCheck ground_state_transform_check(const DiscreteOperator& op,
                                            const GridFunction& phi,
                                            const GridFunction& v);

// V with apply(phi) = 0 exactly at interior nodes, 0 on boundary nodes.  phi
// must be positive at interior nodes and may vanish on the boundary.
Potential synthesize_potential(const Domain& d, const CoefficientField& A,
                               const GridFunction& phi,
                               EdgeMean mean = EdgeMean::arithmetic);

constexpr double kTolExact = 1e-10;

}  // namespace critlab
