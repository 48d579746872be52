#include "critlab/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "critlab/error.hpp"
#include "critlab/io.hpp"

namespace critlab {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& msg) {
  throw Error(ErrorCode::schema, where + ": " + msg);
}

// Reads an object and rejects keys nobody asked for.
class Obj {
 public:
  Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) schema(where_, "expected an object");
  }
  ~Obj() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) schema(where_, "unknown key '" + it.key() + "'");
  }
  bool has(const std::string& k) {
    seen_.insert(k);
    return j_.contains(k) && !j_.at(k).is_null();
  }
  const json& at(const std::string& k) {
    if (!has(k)) schema(where_, "missing key '" + k + "'");
    return j_.at(k);
  }
  double num(const std::string& k) {
    const json& v = at(k);
    if (!v.is_number()) schema(where_ + "." + k, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) schema(where_ + "." + k, "must be finite");
    return x;
  }
  double num(const std::string& k, double fallback) { return has(k) ? num(k) : fallback; }
  int integer(const std::string& k) {
    const json& v = at(k);
    if (!v.is_number_integer()) schema(where_ + "." + k, "expected an integer");
    return v.get<int>();
  }
  int integer(const std::string& k, int fallback) { return has(k) ? integer(k) : fallback; }
  bool boolean(const std::string& k, bool fallback) {
    if (!has(k)) return fallback;
    const json& v = j_.at(k);
    if (!v.is_boolean()) schema(where_ + "." + k, "expected true or false");
    return v.get<bool>();
  }
  std::string str(const std::string& k) {
    const json& v = at(k);
    if (!v.is_string()) schema(where_ + "." + k, "expected a string");
    return v.get<std::string>();
  }
  std::string str(const std::string& k, const std::string& fallback) {
    return has(k) ? str(k) : fallback;
  }
  Point point(const std::string& k, int dim) {
    const json& v = at(k);
    if (!v.is_array() || static_cast<int>(v.size()) != dim)
      schema(where_ + "." + k, "expected " + std::to_string(dim) + " coordinates");
    Point p{0.0, 0.0, 0.0};
    for (int a = 0; a < dim; ++a) {
      if (!v[a].is_number()) schema(where_ + "." + k, "coordinates must be numbers");
      p[a] = v[a].get<double>();
    }
    return p;
  }
  Point point(const std::string& k, int dim, const Point& fallback) {
    return has(k) ? point(k, dim) : fallback;
  }
  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <class E>
E pick(const std::string& where, const std::string& s,
       std::initializer_list<std::pair<const char*, E>> options) {
  std::string names;
  for (const auto& [name, value] : options) {
    if (s == name) return value;
    names += names.empty() ? name : std::string("|") + name;
  }
  schema(where, "unknown value '" + s + "', expected " + names);
}

json point_json(const Point& p, int dim) {
  json a = json::array();
  for (int i = 0; i < dim; ++i) a.push_back(p[i]);
  return a;
}

const char* name(InverseSquare::Center c) {
  return c == InverseSquare::Center::radial ? "radial" : "half_space";
}
const char* name(InverseSquare::Mode m) {
  return m == InverseSquare::Mode::pointwise ? "pointwise" : "consistent";
}
const char* name(FieldSpec::Kind k) {
  switch (k) {
    case FieldSpec::Kind::constant: return "constant";
    case FieldSpec::Kind::inverse_square: return "inverse_square";
    case FieldSpec::Kind::b0: return "b0";
    case FieldSpec::Kind::bump: return "bump";
    case FieldSpec::Kind::odd_bump: return "odd_bump";
    case FieldSpec::Kind::file: return "file";
    case FieldSpec::Kind::construct: return "construct";
  }
  return "unknown";
}
const char* name(Growth g) {
  switch (g) {
    case Growth::linear: return "linear";
    case Growth::geometric: return "geometric";
    case Growth::inset: return "inset";
  }
  return "unknown";
}
const char* name(Family::Kind k) {
  switch (k) {
    case Family::Kind::ball: return "ball";
    case Family::Kind::half_space: return "half_space";
    case Family::Kind::inset: return "inset";
  }
  return "unknown";
}

InverseSquareSpec parse_geometry(Obj& o, int dim) {
  InverseSquareSpec g;
  g.center = pick<InverseSquare::Center>(o.where() + ".center", o.str("center", "radial"),
                                         {{"radial", InverseSquare::Center::radial},
                                          {"half_space", InverseSquare::Center::half_space}});
  g.point = o.point("point", dim, g.point);
  g.axis = o.integer("axis", 0);
  if (g.axis < 0 || g.axis >= dim) schema(o.where() + ".axis", "axis out of range");
  g.offset = o.num("offset", 0.0);
  g.mode = pick<InverseSquare::Mode>(o.where() + ".mode", o.str("mode", "pointwise"),
                                     {{"pointwise", InverseSquare::Mode::pointwise},
                                      {"consistent", InverseSquare::Mode::consistent}});
  return g;
}

json geometry_json(const InverseSquareSpec& g, int dim) {
  return {{"center", name(g.center)},
          {"point", point_json(g.point, dim)},
          {"axis", g.axis},
          {"offset", g.offset},
          {"mode", name(g.mode)}};
}

FieldSpec parse_field(const json& j, const std::string& where, int dim) {
  Obj o(j, where);
  FieldSpec f;
  f.kind = pick<FieldSpec::Kind>(where + ".type", o.str("type"),
                                 {{"constant", FieldSpec::Kind::constant},
                                  {"inverse_square", FieldSpec::Kind::inverse_square},
                                  {"b0", FieldSpec::Kind::b0},
                                  {"bump", FieldSpec::Kind::bump},
                                  {"odd_bump", FieldSpec::Kind::odd_bump},
                                  {"file", FieldSpec::Kind::file},
                                  {"construct", FieldSpec::Kind::construct}});
  switch (f.kind) {
    case FieldSpec::Kind::constant: f.value = o.num("value"); break;
    case FieldSpec::Kind::inverse_square:
      f.value = o.num("c");
      f.geometry = parse_geometry(o, dim);
      break;
    case FieldSpec::Kind::bump:
    case FieldSpec::Kind::odd_bump:
      f.center = o.point("center", dim);
      f.radius = o.num("radius");
      if (!(f.radius > 0.0)) schema(where + ".radius", "must be positive");
      f.axis = o.integer("axis", 0);
      if (f.axis < 0 || f.axis >= dim) schema(where + ".axis", "axis out of range");
      break;
    case FieldSpec::Kind::file: f.path = o.str("path"); break;
    default: break;
  }
  return f;
}

json field_json(const FieldSpec& f, int dim) {
  json j = {{"type", name(f.kind)}};
  switch (f.kind) {
    case FieldSpec::Kind::constant: j["value"] = f.value; break;
    case FieldSpec::Kind::inverse_square:
      j["c"] = f.value;
      j.update(geometry_json(f.geometry, dim));
      break;
    case FieldSpec::Kind::bump:
    case FieldSpec::Kind::odd_bump:
      j["center"] = point_json(f.center, dim);
      j["radius"] = f.radius;
      j["axis"] = f.axis;
      break;
    case FieldSpec::Kind::file: j["path"] = f.path; break;
    default: break;
  }
  return j;
}

void parse_tolerances(Obj& o, Tolerances& t) {
  t.thresholds.crit = o.num("crit", t.thresholds.crit);
  t.thresholds.sub = o.num("sub", t.thresholds.sub);
  t.thresholds.neg = o.num("neg", t.thresholds.neg);
  t.solve = o.num("solve", t.solve);
  t.eig = o.num("eig", t.eig);
  t.settle = o.num("settle", t.settle);
  t.residual = o.num("residual", t.residual);
  t.match = o.num("match", t.match);
  for (double v : {t.thresholds.crit, t.thresholds.sub, t.thresholds.neg, t.solve, t.eig,
                   t.settle, t.residual, t.match})
    if (!(v > 0.0)) schema(o.where(), "tolerances must be positive");
  if (!(t.thresholds.crit < t.thresholds.sub))
    schema(o.where(), "crit must be smaller than sub");
  if (!(t.solve < 1.0) || !(t.eig < 1.0)) schema(o.where(), "solver tolerances must be < 1");
}

}  // namespace

ProblemConfig parse_config(const json& j, const std::filesystem::path& base_dir) {
  ProblemConfig c;
  c.base_dir = base_dir;
  Obj o(j, "config");
  c.dim = o.integer("dimension");
  if (c.dim < 1 || c.dim > 3) schema("config.dimension", "must be 1, 2 or 3");
  const int d = c.dim;
  c.h = o.num("h");
  if (!(c.h > 0.0)) schema("config.h", "must be positive");
  c.staggered = o.boolean("staggered", false);

  {
    Obj e(o.at("exhaustion"), "exhaustion");
    c.family.kind = pick<Family::Kind>("exhaustion.family", e.str("family", "ball"),
                                       {{"ball", Family::Kind::ball},
                                        {"half_space", Family::Kind::half_space},
                                        {"inset", Family::Kind::inset}});
    c.family.center = e.point("center", d, c.family.center);
    c.family.axis = e.integer("axis", 0);
    if (c.family.axis < 0 || c.family.axis >= d) schema("exhaustion.axis", "axis out of range");
    c.family.offset = e.num("offset", 0.0);
    c.family.hole_radius = e.num("hole_radius", 0.0);
    c.schedule.growth = pick<Growth>("exhaustion.growth", e.str("growth", "geometric"),
                                     {{"linear", Growth::linear},
                                      {"geometric", Growth::geometric},
                                      {"inset", Growth::inset}});
    c.schedule.K = e.integer("K");
    c.schedule.r0 = e.num("r0");
  }

  if (o.has("bbox")) {
    Obj b(o.at("bbox"), "bbox");
    c.lo = b.point("lo", d);
    c.hi = b.point("hi", d);
  } else {
    if (c.family.kind == Family::Kind::inset) schema("config", "inset exhaustions need a bbox");
    // tight box around the largest level
    const double R = c.schedule.growth == Growth::linear
                         ? c.schedule.r0 * c.schedule.K
                         : c.schedule.r0 * std::ldexp(1.0, c.schedule.K - 1);
    for (int a = 0; a < d; ++a) {
      c.lo[a] = c.family.center[a] - R;
      c.hi[a] = c.family.center[a] + R;
    }
    if (c.family.kind == Family::Kind::half_space) {
      c.lo[c.family.axis] = c.family.offset;
      c.hi[c.family.axis] = c.family.offset + R;
    }
  }

  if (o.has("coefficient")) c.coefficient = parse_field(o.at("coefficient"), "coefficient", d);
  if (c.coefficient.kind != FieldSpec::Kind::constant &&
      c.coefficient.kind != FieldSpec::Kind::file)
    schema("coefficient.type", "coefficients are constant or file");
  c.mean = pick<EdgeMean>("edge_mean", o.str("edge_mean", "arithmetic"),
                          {{"arithmetic", EdgeMean::arithmetic},
                           {"harmonic", EdgeMean::harmonic}});

  if (o.has("potential")) {
    Obj p(o.at("potential"), "potential");
    c.potential.kind = pick<PotentialSpec::Kind>(
        "potential.type", p.str("type"),
        {{"free", PotentialSpec::Kind::free},
         {"constant", PotentialSpec::Kind::constant},
         {"inverse_square", PotentialSpec::Kind::inverse_square},
         {"file", PotentialSpec::Kind::file}});
    switch (c.potential.kind) {
      case PotentialSpec::Kind::constant: c.potential.c = p.num("c"); break;
      case PotentialSpec::Kind::inverse_square:
        c.potential.c = p.num("c");
        c.potential.geometry = parse_geometry(p, d);
        break;
      case PotentialSpec::Kind::file: c.potential.path = p.str("path"); break;
      default: break;
    }
  }

  {
    Obj m(o.at("markers"), "markers");
    c.markers.x0 = m.point("x0", d);
    c.markers.x1 = m.point("x1", d);
    if (m.has("b0_radius")) {
      c.markers.b0_radius = m.num("b0_radius");
      if (!(*c.markers.b0_radius > 0.0)) schema("markers.b0_radius", "must be positive");
    }
    if (distance(c.markers.x0, c.markers.x1, d) < 0.5 * c.h)
      schema("markers", "x1 must differ from x0");
  }

  if (o.has("tolerances")) {
    Obj t(o.at("tolerances"), "tolerances");
    parse_tolerances(t, c.tol);
  }

  if (o.has("nullseq")) {
    Obj n(o.at("nullseq"), "nullseq");
    if (n.has("N")) {
      const json& a = n.at("N");
      if (!a.is_array() || a.empty()) schema("nullseq.N", "expected a nonempty array");
      c.nullseq.N.clear();
      for (const auto& v : a) {
        if (!v.is_number()) schema("nullseq.N", "expected numbers");
        c.nullseq.N.push_back(v.get<double>());
      }
      for (std::size_t i = 1; i < c.nullseq.N.size(); ++i)
        if (!(c.nullseq.N[i] > c.nullseq.N[i - 1])) schema("nullseq.N", "must increase");
    }
    c.nullseq.kind = pick<NullCutoff>("nullseq.kind", n.str("kind", "automatic"),
                                      {{"automatic", NullCutoff::automatic},
                                       {"ramp", NullCutoff::ramp},
                                       {"log", NullCutoff::log},
                                       {"pole", NullCutoff::pole}});
    c.nullseq.unit = n.num("unit", 1.0);
    if (n.has("core")) c.nullseq.core = n.num("core");
  }

  if (o.has("gap")) {
    Obj g(o.at("gap"), "gap");
    if (g.has("weight")) c.gap_weight = parse_field(g.at("weight"), "gap.weight", d);
  }

  if (o.has("poincare")) {
    Obj p(o.at("poincare"), "poincare");
    if (p.has("psi")) c.poincare.psi = parse_field(p.at("psi"), "poincare.psi", d);
    if (p.has("weight")) c.poincare.weight = parse_field(p.at("weight"), "poincare.weight", d);
    c.poincare.C = p.num("C", 1.0);
    if (!(c.poincare.C > 0.0)) schema("poincare.C", "must be positive");
  }
  if (c.poincare.psi.kind == FieldSpec::Kind::bump ||
      c.poincare.psi.kind == FieldSpec::Kind::odd_bump) {
    // default bump sits on B0
    if (!o.has("poincare") || !j.at("poincare").contains("psi")) {
      c.poincare.psi.center = c.markers.x0;
      c.poincare.psi.radius = c.markers.b0_radius.value_or(0.5 * c.schedule.r0);
    }
  }

  if (o.has("refine")) {
    Obj r(o.at("refine"), "refine");
    if (r.has("W0")) c.refine.W0 = parse_field(r.at("W0"), "refine.W0", d);
    c.refine.p = r.num("p", 4.0);
    if (!(c.refine.p > 2.0)) schema("refine.p", "must exceed 2");
    c.refine.max_iterations = r.integer("max_iterations", 100000);
  }
  return c;
}

ProblemConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::io, "cannot open config " + file.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::schema, "config is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(j, file.parent_path());
}

void apply_tolerance_overrides(ProblemConfig& cfg, const json& overrides) {
  Obj t(overrides, "tol-overrides");
  parse_tolerances(t, cfg.tol);
}

json to_json(const ProblemConfig& c) {
  const int d = c.dim;
  json j;
  j["dimension"] = d;
  j["bbox"] = {{"lo", point_json(c.lo, d)}, {"hi", point_json(c.hi, d)}};
  j["h"] = c.h;
  j["staggered"] = c.staggered;
  j["exhaustion"] = {{"family", name(c.family.kind)},
                     {"center", point_json(c.family.center, d)},
                     {"axis", c.family.axis},
                     {"offset", c.family.offset},
                     {"hole_radius", c.family.hole_radius},
                     {"growth", name(c.schedule.growth)},
                     {"K", c.schedule.K},
                     {"r0", c.schedule.r0}};
  j["coefficient"] = field_json(c.coefficient, d);
  j["edge_mean"] = c.mean == EdgeMean::arithmetic ? "arithmetic" : "harmonic";
  json p;
  switch (c.potential.kind) {
    case PotentialSpec::Kind::free: p = {{"type", "free"}}; break;
    case PotentialSpec::Kind::constant: p = {{"type", "constant"}, {"c", c.potential.c}}; break;
    case PotentialSpec::Kind::inverse_square:
      p = geometry_json(c.potential.geometry, d);
      p["type"] = "inverse_square";
      p["c"] = c.potential.c;
      break;
    case PotentialSpec::Kind::file: p = {{"type", "file"}, {"path", c.potential.path}}; break;
  }
  j["potential"] = p;
  json m = {{"x0", point_json(c.markers.x0, d)}, {"x1", point_json(c.markers.x1, d)}};
  m["b0_radius"] = c.markers.b0_radius.value_or(0.5 * c.schedule.r0);
  j["markers"] = m;
  j["tolerances"] = {{"crit", c.tol.thresholds.crit}, {"sub", c.tol.thresholds.sub},
                     {"neg", c.tol.thresholds.neg},   {"solve", c.tol.solve},
                     {"eig", c.tol.eig},              {"settle", c.tol.settle},
                     {"residual", c.tol.residual},    {"match", c.tol.match}};
  json ns = {{"N", c.nullseq.N}, {"kind", to_string(c.nullseq.kind)}, {"unit", c.nullseq.unit}};
  ns["core"] = c.nullseq.core ? json(*c.nullseq.core) : json(nullptr);
  j["nullseq"] = ns;
  j["gap"] = {{"weight", field_json(c.gap_weight, d)}};
  j["poincare"] = {{"psi", field_json(c.poincare.psi, d)},
                   {"weight", field_json(c.poincare.weight, d)},
                   {"C", c.poincare.C}};
  j["refine"] = {{"W0", field_json(c.refine.W0, d)},
                 {"p", c.refine.p},
                 {"max_iterations", c.refine.max_iterations}};
  return j;
}

namespace {

GridFunction inverse_square_field(const Exhaustion& ex, double c, const InverseSquareSpec& g) {
  GridFunction out(ex.size(), 0.0);
  const int d = ex.grid().dim;
  for (std::size_t l = 0; l < ex.size(); ++l) {
    const Point x = ex.outer().coord(l);
    const double rho = g.center == InverseSquare::Center::half_space
                           ? x[g.axis] - g.offset
                           : distance(x, g.point, d);
    out[l] = rho > 0.0 ? c / (rho * rho) : 0.0;
  }
  return out;
}

}  // namespace

GridFunction evaluate_field(const FieldSpec& f, const Exhaustion& ex,
                            const std::filesystem::path& base_dir) {
  const int d = ex.grid().dim;
  GridFunction out(ex.size(), 0.0);
  switch (f.kind) {
    case FieldSpec::Kind::constant:
      std::fill(out.begin(), out.end(), f.value);
      break;
    case FieldSpec::Kind::inverse_square:
      out = inverse_square_field(ex, f.value, f.geometry);
      break;
    case FieldSpec::Kind::b0:
      for (std::size_t l = 0; l < ex.size(); ++l) out[l] = ex.b0()[l] ? 1.0 : 0.0;
      break;
    case FieldSpec::Kind::bump:
    case FieldSpec::Kind::odd_bump:
      for (std::size_t l = 0; l < ex.size(); ++l) {
        const Point x = ex.outer().coord(l);
        const double s = distance(x, f.center, d) / f.radius;
        double v = s < 1.0 ? (1.0 - s * s) * (1.0 - s * s) : 0.0;
        if (f.kind == FieldSpec::Kind::odd_bump) {
          const double t = x[f.axis] - f.center[f.axis];
          v *= t > 0.0 ? 1.0 : t < 0.0 ? -1.0 : 0.0;
        }
        out[l] = v;
      }
      break;
    case FieldSpec::Kind::file: {
      std::filesystem::path p = f.path;
      if (p.is_relative()) p = base_dir / p;
      out = read_field_csv(p, ex.outer());
      break;
    }
    case FieldSpec::Kind::construct:
      throw Error(ErrorCode::invalid_argument, "a constructed weight has no closed form");
  }
  return out;
}

Problem build_problem(const ProblemConfig& c) {
  const GridSpec grid = GridSpec::make(c.dim, c.lo, c.hi, c.h, c.staggered);
  Exhaustion ex(grid, c.family, c.schedule, c.markers);
  const Domain& dom = ex.outer();
  CoefficientField A{evaluate_field(c.coefficient, ex, c.base_dir)};
  Potential V;
  switch (c.potential.kind) {
    case PotentialSpec::Kind::free: V = Potential::free(dom); break;
    case PotentialSpec::Kind::constant: V = Potential::constant(dom, c.potential.c); break;
    case PotentialSpec::Kind::inverse_square: {
      InverseSquare is;
      is.center = c.potential.geometry.center;
      is.point = c.potential.geometry.point;
      is.axis = c.potential.geometry.axis;
      is.offset = c.potential.geometry.offset;
      is.mode = c.potential.geometry.mode;
      V = Potential::inverse_square(dom, c.potential.c, is);
      break;
    }
    case PotentialSpec::Kind::file: {
      FieldSpec f{FieldSpec::Kind::file};
      f.path = c.potential.path;
      V = Potential::custom(evaluate_field(f, ex, c.base_dir));
      V.preset = Potential::Preset::file;
      break;
    }
  }
  DiscreteOperator op(dom, A, V, c.mean);
  return Problem{c, std::move(ex), std::move(op)};
}

EigOptions eig_options(const Tolerances& t) {
  EigOptions o;
  o.tol = t.eig;
  o.inner.tol = t.solve;
  return o;
}

SolveOptions solve_options(const Tolerances& t) {
  SolveOptions o;
  o.tol = t.solve;
  return o;
}

}  // namespace critlab
