#include "critlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "critlab/error.hpp"
#include "format.hpp"

namespace critlab {

namespace {

constexpr double kRelTol = 1e-9;

double axis_coord(const GridSpec& g, int axis, int k) {
  return g.lo[axis] + (g.staggered ? 0.5 * g.h : 0.0) + k * g.h;
}

}  // namespace

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::empty_domain: return "empty_domain";
    case ErrorCode::disconnected_domain: return "disconnected_domain";
    case ErrorCode::marker_outside: return "marker_outside";
    case ErrorCode::truncated_exhaustion: return "truncated_exhaustion";
    case ErrorCode::ellipticity: return "ellipticity";
    case ErrorCode::non_finite: return "non_finite";
    case ErrorCode::nonpositive: return "nonpositive";
    case ErrorCode::indefinite: return "indefinite";
    case ErrorCode::not_converged: return "not_converged";
    case ErrorCode::no_admissible_level: return "no_admissible_level";
    case ErrorCode::io: return "io";
    case ErrorCode::schema: return "schema";
  }
  return "unknown";
}

GridSpec GridSpec::make(int dim, Point lo, Point hi, double h, bool staggered) {
  if (dim < 1 || dim > 3)
    throw Error(ErrorCode::invalid_argument, "dimension must be 1, 2 or 3");
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorCode::invalid_argument, "spacing h must be positive");
  GridSpec g;
  g.dim = dim;
  g.h = h;
  g.staggered = staggered;
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      g.lo[a] = g.hi[a] = 0.0;
      g.n[a] = 1;
      continue;
    }
    const double len = hi[a] - lo[a];
    if (!(len > 0.0))
      throw Error(ErrorCode::invalid_argument, "bounding box must have hi > lo");
    const double m = len / h;
    const double r = std::round(m);
    if (r < 1.0 || std::abs(m - r) > kRelTol * std::max(1.0, m))
      throw Error(ErrorCode::invalid_argument,
                  "(hi - lo)/h must be a positive integer on every axis");
    g.lo[a] = lo[a];
    g.hi[a] = hi[a];
    g.n[a] = static_cast<int>(r) + (staggered ? 0 : 1);
  }
  return g;
}

std::size_t GridSpec::size() const {
  return static_cast<std::size_t>(n[0]) * n[1] * n[2];
}

std::array<int, 3> GridSpec::multi(std::size_t index) const {
  std::array<int, 3> m{};
  m[0] = static_cast<int>(index % n[0]);
  index /= n[0];
  m[1] = static_cast<int>(index % n[1]);
  m[2] = static_cast<int>(index / n[1]);
  return m;
}

std::size_t GridSpec::linear(const std::array<int, 3>& m) const {
  return static_cast<std::size_t>(m[0]) +
         static_cast<std::size_t>(n[0]) *
             (static_cast<std::size_t>(m[1]) +
              static_cast<std::size_t>(n[1]) * m[2]);
}

Point GridSpec::coord(std::size_t index) const {
  const auto m = multi(index);
  Point x{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) x[a] = axis_coord(*this, a, m[a]);
  return x;
}

long GridSpec::neighbor(std::size_t index, int axis, int dir) const {
  auto m = multi(index);
  m[axis] += dir;
  if (m[axis] < 0 || m[axis] >= n[axis]) return -1;
  return static_cast<long>(linear(m));
}

std::size_t GridSpec::nearest(const Point& x) const {
  std::array<int, 3> m{0, 0, 0};
  for (int a = 0; a < dim; ++a) {
    const double off = lo[a] + (staggered ? 0.5 * h : 0.0);
    long k = std::lround((x[a] - off) / h);
    k = std::clamp<long>(k, 0, n[a] - 1);
    m[a] = static_cast<int>(k);
  }
  return linear(m);
}

double GridSpec::cell_volume() const { return std::pow(h, dim); }

double distance(const Point& a, const Point& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

bool Shape::contains(const GridSpec& g, const Point& x) const {
  const double tol = kRelTol * g.h;
  switch (kind) {
    case Kind::box: return true;
    case Kind::ball: return distance(x, center, g.dim) <= radius + tol;
    case Kind::box_minus_ball: return distance(x, center, g.dim) >= radius - tol;
    case Kind::half_space: return x[axis] >= offset - tol;
  }
  return false;
}

Domain::Domain(const GridSpec& grid, const std::vector<std::uint8_t>& mask)
    : grid_(grid) {
  if (mask.size() != grid.size())
    throw Error(ErrorCode::invalid_argument, "mask size does not match grid");
  local_.assign(grid.size(), -1);
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) {
      local_[i] = static_cast<long>(nodes_.size());
      nodes_.push_back(i);
    }
  }
  if (nodes_.empty()) throw Error(ErrorCode::empty_domain, "active set is empty");

  const int deg = degree();
  nbr_.assign(nodes_.size() * deg, -1);
  flags_.assign(nodes_.size(), NodeFlag::interior);
  for (std::size_t l = 0; l < nodes_.size(); ++l) {
    for (int k = 0; k < deg; ++k) {
      const long gi = grid.neighbor(nodes_[l], k / 2, (k % 2) ? 1 : -1);
      const long nl = gi < 0 ? -1 : local_[gi];
      nbr_[l * deg + k] = nl;
      if (nl < 0) flags_[l] = NodeFlag::boundary;
    }
  }

  std::vector<std::uint8_t> seen(nodes_.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t l = stack.back();
    stack.pop_back();
    for (int k = 0; k < deg; ++k) {
      const long nl = nbr_[l * deg + k];
      if (nl >= 0 && !seen[nl]) {
        seen[nl] = 1;
        ++reached;
        stack.push_back(static_cast<std::size_t>(nl));
      }
    }
  }
  if (reached != nodes_.size())
    throw Error(ErrorCode::disconnected_domain, "active set is not grid-connected");
}

std::size_t Domain::interior_count() const {
  return static_cast<std::size_t>(
      std::count(flags_.begin(), flags_.end(), NodeFlag::interior));
}

Domain build_domain(const GridSpec& grid, const Shape& shape) {
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    mask[i] = shape.contains(grid, grid.coord(i)) ? 1 : 0;
  return Domain(grid, mask);
}

namespace {

double family_coordinate(const GridSpec& g, const Family& f, const Point& x) {
  const double tol = kRelTol * g.h;
  const double inf = std::numeric_limits<double>::infinity();
  switch (f.kind) {
    case Family::Kind::ball: {
      const double r = distance(x, f.center, g.dim);
      if (f.hole_radius > 0.0 && r < f.hole_radius - tol) return inf;
      return r;
    }
    case Family::Kind::half_space: {
      if (x[f.axis] < f.offset - tol) return inf;
      Point p = f.center;
      p[f.axis] = f.offset;
      const double r = distance(x, p, g.dim);
      if (f.hole_radius > 0.0 && distance(x, f.center, g.dim) < f.hole_radius - tol)
        return inf;
      return r;
    }
    case Family::Kind::inset: {
      double d = inf;
      for (int a = 0; a < g.dim; ++a)
        d = std::min({d, x[a] - g.lo[a], g.hi[a] - x[a]});
      return -d;
    }
  }
  return inf;
}

void check_extent(const GridSpec& g, const Family& f, double R) {
  if (f.kind == Family::Kind::inset) return;
  const double tol = kRelTol * g.h;
  for (int a = 0; a < g.dim; ++a) {
    double lo = f.center[a] - R;
    double hi = f.center[a] + R;
    if (f.kind == Family::Kind::half_space && a == f.axis) {
      lo = f.offset;
      hi = f.offset + R;
    }
    const double first = axis_coord(g, a, 0);
    const double last = axis_coord(g, a, g.n[a] - 1);
    if (lo < first - tol || hi > last + tol)
      throw Error(ErrorCode::truncated_exhaustion,
                  "level radius " + fmt_num(R) +
                      " is truncated by the bounding box on axis " +
                      std::to_string(a));
  }
}

}  // namespace

Exhaustion::Exhaustion(const GridSpec& grid, const Family& family,
                       const Schedule& schedule, const Markers& markers)
    : family_(family), schedule_(schedule) {
  const int K = schedule.K;
  if (K < 3) throw Error(ErrorCode::invalid_argument, "exhaustion needs K >= 3");
  if (!(schedule.r0 > 0.0))
    throw Error(ErrorCode::invalid_argument, "base radius r0 must be positive");

  radii_.resize(K);
  thresholds_.resize(K);
  for (int N = 1; N <= K; ++N) {
    double r = 0.0;
    switch (schedule.growth) {
      case Growth::linear: r = schedule.r0 * N; break;
      case Growth::geometric: r = schedule.r0 * std::ldexp(1.0, N - 1); break;
      case Growth::inset: r = N == K ? 0.0 : schedule.r0 * std::ldexp(1.0, -(N - 1)); break;
    }
    radii_[N - 1] = r;
    thresholds_[N - 1] = schedule.growth == Growth::inset ? -r : r;
  }
  if ((schedule.growth == Growth::inset) != (family.kind == Family::Kind::inset))
    throw Error(ErrorCode::invalid_argument,
                "inset growth pairs with the inset family only");
  check_extent(grid, family, radii_.back());

  const double tol = kRelTol * grid.h;
  std::vector<double> tg(grid.size());
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    tg[i] = family_coordinate(grid, family, grid.coord(i));
    mask[i] = tg[i] <= thresholds_.back() + tol ? 1 : 0;
  }
  outer_ = Domain(grid, mask);
  t_.resize(outer_.size());
  for (std::size_t l = 0; l < outer_.size(); ++l) t_[l] = tg[outer_.node(l)];

  flags_.assign(K, std::vector<NodeFlag>(outer_.size(), NodeFlag::inactive));
  std::size_t prev = 0;
  for (int N = 1; N <= K; ++N) {
    std::vector<std::uint8_t> m(grid.size(), 0);
    for (std::size_t l = 0; l < outer_.size(); ++l)
      if (t_[l] <= thresholds_[N - 1] + tol) m[outer_.node(l)] = 1;
    const Domain d(grid, m);
    if (N > 1 && d.size() <= prev)
      throw Error(ErrorCode::truncated_exhaustion,
                  "levels " + std::to_string(N - 1) + " and " + std::to_string(N) +
                      " are not strictly nested");
    prev = d.size();
    for (std::size_t l = 0; l < d.size(); ++l)
      flags_[N - 1][outer_.local(d.node(l))] = d.flag(l);
  }

  auto place = [&](const Point& x, const char* name) {
    const long l = outer_.local(grid.nearest(x));
    if (l < 0 || !interior(1, static_cast<std::size_t>(l)))
      throw Error(ErrorCode::marker_outside,
                  std::string("marker ") + name + " is not an interior node of level 1");
    return static_cast<std::size_t>(l);
  };
  x0_ = place(markers.x0, "x0");
  x1_ = place(markers.x1, "x1");
  if (x0_ == x1_)
    throw Error(ErrorCode::invalid_argument, "markers x0 and x1 coincide");

  b0_radius_ = markers.b0_radius.value_or(0.5 * schedule.r0);
  b0_.assign(outer_.size(), 0);
  std::size_t count = 0;
  for (std::size_t l = 0; l < outer_.size(); ++l) {
    if (!interior(1, l)) continue;
    if (grid.staggered && l == x0_) continue;
    if (dist_x0(l) <= b0_radius_ + tol) {
      b0_[l] = 1;
      ++count;
    }
  }
  if (count == 0) throw Error(ErrorCode::marker_outside, "base set B0 is empty");
}

Domain Exhaustion::domain(int N) const {
  std::vector<std::uint8_t> m(grid().size(), 0);
  for (std::size_t l = 0; l < outer_.size(); ++l)
    if (active(N, l)) m[outer_.node(l)] = 1;
  return Domain(grid(), m);
}

std::size_t Exhaustion::active_count(int N) const {
  std::size_t c = 0;
  for (auto f : flags_[N - 1]) c += f != NodeFlag::inactive;
  return c;
}

std::size_t Exhaustion::interior_count(int N) const {
  std::size_t c = 0;
  for (auto f : flags_[N - 1]) c += f == NodeFlag::interior;
  return c;
}

double Exhaustion::dist_x0(std::size_t local) const {
  return distance(outer_.coord(local), outer_.coord(x0_), grid().dim);
}

std::vector<GridFunction> annulus_partition(const Exhaustion& ex) {
  const int K = ex.levels();
  std::vector<GridFunction> chi(K, GridFunction(ex.size(), 0.0));
  for (std::size_t l = 0; l < ex.size(); ++l) {
    const double t = ex.level_coordinate(l);
    int N = 1;
    while (N <= K && t > ex.threshold(N)) ++N;
    if (N == 1) {
      chi[0][l] = 1.0;
    } else if (N <= K) {
      // between t_{N-1} and t_N: hand over from chi_{N-1} to chi_N
      const double s = (t - ex.threshold(N - 1)) / (ex.threshold(N) - ex.threshold(N - 1));
      chi[N - 1][l] = s;
      chi[N - 2][l] = 1.0 - s;
    }
  }
  return chi;
}

std::string nodes_csv(const Domain& domain) {
  std::ostringstream os;
  const int d = domain.grid().dim;
  os << "index,x";
  if (d > 1) os << ",y";
  if (d > 2) os << ",z";
  os << ",flag\n";
  for (std::size_t l = 0; l < domain.size(); ++l) {
    const Point x = domain.coord(l);
    os << domain.node(l);
    for (int a = 0; a < d; ++a) os << ',' << fmt_num(x[a]);
    os << ',' << (domain.interior(l) ? "interior" : "boundary") << '\n';
  }
  return os.str();
}

}  // namespace critlab
