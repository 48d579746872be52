#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "critlab/criticality.hpp"
#include "critlab/grid.hpp"
#include "critlab/operator.hpp"
#include "critlab/solver.hpp"

namespace critlab {

// Geometry of an inverse-square profile c / rho^2.
struct InverseSquareSpec {
  InverseSquare::Center center = InverseSquare::Center::radial;
  Point point{0.0, 0.0, 0.0};
  int axis = 0;
  double offset = 0.0;
  InverseSquare::Mode mode = InverseSquare::Mode::pointwise;
};

/**
 * A scalar field on the outer domain.  Kinds: constant (value),
 * inverse_square (value c, geometry), indicator of B0 (b0), bump of
 * (1 - (r/radius)^2)^2 around center, odd_bump (bump times the sign of
 * x[axis] - center[axis]), file (CSV with index,x[,y[,z]],value), and
 * construct (gap weight synthesis only).
 */
struct FieldSpec {
  enum class Kind { constant, inverse_square, b0, bump, odd_bump, file, construct };
  FieldSpec() = default;
  explicit FieldSpec(Kind k) : kind(k) {}
  Kind kind = Kind::constant;
  double value = 1.0;
  InverseSquareSpec geometry;
  Point center{0.0, 0.0, 0.0};
  double radius = 1.0;
  int axis = 0;
  std::string path;
};

struct PotentialSpec {
  enum class Kind { free, constant, inverse_square, file };
  Kind kind = Kind::free;
  double c = 0.0;
  InverseSquareSpec geometry;
  std::string path;
};

struct Tolerances {
  Thresholds thresholds;
  double solve = 1e-10;
  double eig = 1e-8;
  double settle = 1e-2;
  double residual = 1e-6;  // refinement residual
  double match = 2e-2;     // refinement ground-state match
};

struct NullSeqSpec {
  std::vector<double> N{2, 4, 8, 16, 32};
  NullCutoff kind = NullCutoff::automatic;
  double unit = 1.0;
  std::optional<double> core;
};

struct PoincareSpec {
  FieldSpec psi{FieldSpec::Kind::bump};
  FieldSpec weight{FieldSpec::Kind::b0};
  double C = 1.0;
};

struct RefineSpec {
  FieldSpec W0{FieldSpec::Kind::constant};
  double p = 4.0;
  int max_iterations = 100000;
};

struct ProblemConfig {
  int dim = 1;
  Point lo{0.0, 0.0, 0.0};
  Point hi{0.0, 0.0, 0.0};
  double h = 0.0;
  bool staggered = false;
  Family family;
  Schedule schedule;
  FieldSpec coefficient{FieldSpec::Kind::constant};
  EdgeMean mean = EdgeMean::arithmetic;
  PotentialSpec potential;
  Markers markers;
  Tolerances tol;
  NullSeqSpec nullseq;
  FieldSpec gap_weight{FieldSpec::Kind::construct};
  PoincareSpec poincare;
  RefineSpec refine;
  std::filesystem::path base_dir;  // relative file paths resolve here
};

// Throws Error(schema) on unknown keys, missing fields or bad values.
ProblemConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
ProblemConfig load_config(const std::filesystem::path& file);

// Tolerance overrides: {"crit", "sub", "neg", "solve", "eig", "settle", "residual", "match"}.
void apply_tolerance_overrides(ProblemConfig& cfg, const nlohmann::json& overrides);

// Fully resolved config, every default spelled out.
nlohmann::json to_json(const ProblemConfig& cfg);

struct Problem {
  ProblemConfig config;
  Exhaustion ex;
  DiscreteOperator op;
};

Problem build_problem(const ProblemConfig& cfg);

// Field values over the outer domain of the exhaustion.
GridFunction evaluate_field(const FieldSpec& spec, const Exhaustion& ex,
                            const std::filesystem::path& base_dir = {});

EigOptions eig_options(const Tolerances& t);
SolveOptions solve_options(const Tolerances& t);

}  // namespace critlab
