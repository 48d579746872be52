#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace critlab {

// Symmetric operator acting on compact vectors.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::size_t size() const = 0;
  virtual void apply(std::span<const double> x, std::span<double> y) const = 0;
  virtual std::vector<double> diagonal() const = 0;
  // Nonpositive off-diagonal entries; enables the positivity certificate.
  virtual bool z_matrix() const { return false; }
  // A number known to lie below min x'Ax / x'Bx, or NaN when unknown.
  virtual double lower_bound(std::span<const double> massB) const;
  // Entries A(r, r+1) when the matrix is tridiagonal; enables a direct solve.
  virtual bool tridiagonal(std::vector<double>& upper) const;
};

enum class Preconditioner { none, diagonal };
enum class SolveStatus { converged, indefinite, max_iterations };

const char* to_string(SolveStatus s);

struct SolveOptions {
  double tol = 1e-10;  // relative residual
  int max_iterations = 0;  // 0: 4n + 1000
  Preconditioner precond = Preconditioner::diagonal;
  bool direct = true;  // exact LDL' when the operator is tridiagonal
};

struct SolveResult {
  std::vector<double> x;
  SolveStatus status = SolveStatus::converged;
  int iterations = 0;
  double rel_residual = 0.0;
};

// Preconditioned conjugate gradients.  A direction with p'Ap <= 0 stops the
// iteration with status indefinite.
SolveResult solve_spd(const LinearOperator& A, std::span<const double> b,
                      const SolveOptions& opts = {},
                      std::span<const double> x0 = {});

enum class EigStatus { converged, indefinite, not_converged };

const char* to_string(EigStatus s);

struct EigOptions {
  double tol = 1e-8;  // relative change of the quotient
  int max_outer = 2000;
  bool rayleigh_shift = true;  // move the shift toward the current quotient
  SolveOptions inner{};
};

struct EigResult {
  double lambda = 0.0;
  std::vector<double> u;  // B-normalized
  EigStatus status = EigStatus::converged;
  int outer_iterations = 0;
  long inner_iterations = 0;
  double shift = 0.0;
  bool nonnegative = false;
};

/**
 * Bottom of min x'Ax / x'Bx with B = diag(massB) >= 0.  Shifted inverse
 * iteration from the B-normalized all-ones vector.  For z-matrices the shift
 * follows the Rayleigh quotient and is kept below the bottom eigenvalue by
 * requiring a positive solve (an M-matrix certificate); otherwise the shift
 * stays at a certified lower bound.
 */
EigResult smallest_eig(const LinearOperator& A, std::span<const double> massB,
                       const EigOptions& opts = {});

/**
 * Same quotient with the numerator augmented by C (q'x)^2, q = psi h^d,
 * applied matrix-free.
 */
EigResult smallest_eig_rank_one(const LinearOperator& A, std::span<const double> massB,
                                std::span<const double> q, double C,
                                const EigOptions& opts = {});

double rayleigh_quotient(const LinearOperator& A, std::span<const double> massB,
                         std::span<const double> u);

double dot(std::span<const double> a, std::span<const double> b);

}  // namespace critlab
