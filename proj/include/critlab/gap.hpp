#pragma once

#include <string>
#include <utility>
#include <vector>

#include "critlab/criticality.hpp"
#include "critlab/fit.hpp"
#include "critlab/grid.hpp"
#include "critlab/operator.hpp"
#include "critlab/solver.hpp"

namespace critlab {

enum class GapVerdict { gap, no_gap, inconclusive };

const char* to_string(GapVerdict v);

struct GapCertificate {
  GridFunction W;
  std::vector<double> nu;  // bottom of a_h[u] / sum W u^2 h^d per level
  Extrapolation fit;
  double nu_inf = 0.0;
  bool monotone = true;
  Thresholds thresholds;
  GapVerdict verdict = GapVerdict::inconclusive;
  std::string note;
};

// W > 0 on interior(Omega_K).  Thresholds as in classify, relative to nu_1.
GapCertificate verify_gap(const DiscreteOperator& op, const GridFunction& W,
                          const Exhaustion& ex, const Thresholds& th = {},
                          const EigOptions& opts = {});

struct WeightConstruction {
  GridFunction W;
  GridFunction u;                  // L_h u = 0 inside Omega_K, u = 1 on its boundary
  std::vector<GridFunction> chi;   // partition of unity
  std::vector<double> C;           // C_N
  std::vector<double> eps;         // 2^-N / C_N
  GridFunction green_sum;          // sum_j G(i,j) W_j u_j h^d
  double min_slack = 0.0;          // min over interior nodes of u - green_sum
  bool positive = false;           // W > 0 on Omega_{K-1}
  Lambda0Estimate lambda0;
};

/**
 * Positive weight from a partition of unity with the Green-kernel bound
 * sum_j G(i,j) W_j u_j h^d <= u_i.  Green sums are one solve per annulus by
 * linearity.  Refuses operators already classified as critical.
 */
WeightConstruction construct_weight(const DiscreteOperator& op, const Exhaustion& ex,
                                    const EigOptions& opts = {},
                                    const ClassificationReport* verdict = nullptr);

enum class PoincareVerdict { certified, failed, inconclusive };

const char* to_string(PoincareVerdict v);

struct PoincareCertificate {
  GridFunction psi;
  GridFunction W;
  double pairing = 0.0;  // sum psi phi h^d
  double C = 1.0;
  std::vector<double> nu;  // augmented ratios per level
  Extrapolation fit;
  double floor = 0.0;  // min over the last three levels
  PoincareVerdict verdict = PoincareVerdict::inconclusive;
  std::string note;
};

/**
 * nu~_N = bottom of (a_h[u] + C (sum psi u h^d)^2) / sum W u^2 h^d on each
 * level.  Certified when the extrapolated floor stays above sub * nu~_1,
 * failed below crit * nu~_1.
 */
PoincareCertificate poincare_certificate(const DiscreteOperator& op, const Exhaustion& ex,
                                         const GroundState& gs, const GridFunction& psi,
                                         const GridFunction& W, double C = 1.0,
                                         const Thresholds& th = {},
                                         const EigOptions& opts = {});

struct PairingPoint {
  double N = 0.0;
  double energy = 0.0;
  double pairing = 0.0;  // sum psi u_N h^d
};

// needs the null sequence built with keep_functions
std::vector<PairingPoint> pairing_along_sequence(const NullSequenceReport& ns,
                                                 const GridFunction& psi, double cell);

}  // namespace critlab
