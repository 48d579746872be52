#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace critlab {

using Point = std::array<double, 3>;

// Values over the active nodes of a domain, in the domain's local order.
// Fields attached to an exhaustion always use the local order of its
// largest level.
using GridFunction = std::vector<double>;

/**
 * Axis-aligned uniform grid.  Non-staggered axes carry nodes lo + k h,
 * k = 0..n; staggered axes carry nodes lo + h/2 + k h, k = 0..n-1, with
 * n = (hi - lo)/h.
 */
struct GridSpec {
  int dim = 1;
  Point lo{0.0, 0.0, 0.0};
  Point hi{1.0, 0.0, 0.0};
  double h = 1.0;
  bool staggered = false;
  std::array<int, 3> n{1, 1, 1};  // nodes per axis, unused axes hold 1

  static GridSpec make(int dim, Point lo, Point hi, double h, bool staggered);

  std::size_t size() const;
  std::array<int, 3> multi(std::size_t index) const;
  std::size_t linear(const std::array<int, 3>& m) const;
  Point coord(std::size_t index) const;
  // grid index of the neighbor along +/- axis, or -1 outside the box
  long neighbor(std::size_t index, int axis, int dir) const;
  std::size_t nearest(const Point& x) const;
  double cell_volume() const;  // h^d
};

struct Shape {
  enum class Kind { box, ball, box_minus_ball, half_space };
  Kind kind = Kind::box;
  Point center{0.0, 0.0, 0.0};
  double radius = 0.0;
  int axis = 0;         // half_space: x[axis] >= offset
  double offset = 0.0;

  static Shape box() { return {}; }
  static Shape ball(Point c, double r) { return {Kind::ball, c, r, 0, 0.0}; }
  static Shape box_minus_ball(Point c, double r) {
    return {Kind::box_minus_ball, c, r, 0, 0.0};
  }
  static Shape half_space(int axis, double offset) {
    return {Kind::half_space, {0.0, 0.0, 0.0}, 0.0, axis, offset};
  }

  bool contains(const GridSpec& g, const Point& x) const;
};

enum class NodeFlag : std::uint8_t { inactive = 0, interior = 1, boundary = 2 };

/**
 * Active node set on a grid.  Local indices 0..size()-1 enumerate the
 * active nodes in grid order.  A boundary node is an active node with an
 * inactive or out-of-box neighbor; all other active nodes are interior.
 */
class Domain {
 public:
  Domain() = default;
  // mask over grid indices; throws on empty or disconnected sets
  Domain(const GridSpec& grid, const std::vector<std::uint8_t>& mask);

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return nodes_.size(); }
  std::size_t node(std::size_t local) const { return nodes_[local]; }
  long local(std::size_t grid_index) const { return local_[grid_index]; }
  NodeFlag flag(std::size_t local) const { return flags_[local]; }
  bool interior(std::size_t local) const {
    return flags_[local] == NodeFlag::interior;
  }
  Point coord(std::size_t local) const { return grid_.coord(nodes_[local]); }
  int degree() const { return 2 * grid_.dim; }
  // local index of the k-th neighbor (axis k/2, direction by k%2), -1 if none
  long neighbor(std::size_t local, int k) const {
    return nbr_[local * static_cast<std::size_t>(degree()) + k];
  }
  std::size_t interior_count() const;

 private:
  GridSpec grid_;
  std::vector<std::size_t> nodes_;
  std::vector<long> local_;
  std::vector<NodeFlag> flags_;
  std::vector<long> nbr_;
};

Domain build_domain(const GridSpec& grid, const Shape& shape);

enum class Growth { linear, geometric, inset };

struct Schedule {
  int K = 4;
  double r0 = 1.0;
  Growth growth = Growth::geometric;
};

/**
 * How the nested domains grow.  ball: |x - center| <= R.  half_space:
 * x[axis] >= offset and |x - p| <= R where p is center moved onto the
 * plane, so only the far end grows.  inset: nodes of the bounding box at
 * max-norm distance >= delta from its faces, delta shrinking to 0.
 */
struct Family {
  enum class Kind { ball, half_space, inset };
  Kind kind = Kind::ball;
  Point center{0.0, 0.0, 0.0};
  int axis = 0;
  double offset = 0.0;
  double hole_radius = 0.0;  // optional puncture around center
};

struct Markers {
  Point x0{0.0, 0.0, 0.0};
  Point x1{0.0, 0.0, 0.0};
  std::optional<double> b0_radius;  // default r0/2
};

class Exhaustion {
 public:
  Exhaustion(const GridSpec& grid, const Family& family,
             const Schedule& schedule, const Markers& markers);

  const GridSpec& grid() const { return outer_.grid(); }
  const Family& family() const { return family_; }
  const Schedule& schedule() const { return schedule_; }
  int levels() const { return schedule_.K; }
  // the last level is the whole domain (inset growth)
  bool terminates() const { return schedule_.growth == Growth::inset; }
  // level parameter t_N; level N holds the nodes with t(x) <= t_N
  double threshold(int N) const { return thresholds_[N - 1]; }
  double level_coordinate(std::size_t local) const { return t_[local]; }
  // nominal radius (or inset) of level N
  double radius(int N) const { return radii_[N - 1]; }

  const Domain& outer() const { return outer_; }
  std::size_t size() const { return outer_.size(); }
  Domain domain(int N) const;
  NodeFlag flag(int N, std::size_t local) const {
    return flags_[N - 1][local];
  }
  bool interior(int N, std::size_t local) const {
    return flags_[N - 1][local] == NodeFlag::interior;
  }
  bool active(int N, std::size_t local) const {
    return flags_[N - 1][local] != NodeFlag::inactive;
  }
  std::size_t active_count(int N) const;
  std::size_t interior_count(int N) const;

  std::size_t x0() const { return x0_; }
  std::size_t x1() const { return x1_; }
  const std::vector<std::uint8_t>& b0() const { return b0_; }
  double b0_radius() const { return b0_radius_; }
  // distance of node to the source node
  double dist_x0(std::size_t local) const;

 private:
  Domain outer_;
  Family family_;
  Schedule schedule_;
  std::vector<double> radii_;
  std::vector<double> thresholds_;
  std::vector<double> t_;
  std::vector<std::vector<NodeFlag>> flags_;
  std::size_t x0_ = 0;
  std::size_t x1_ = 0;
  std::vector<std::uint8_t> b0_;
  double b0_radius_ = 0.0;
};

// Partition of unity chi_1..chi_K over the largest level, piecewise linear
// in the level coordinate, with supp chi_N inside Omega_{N+1} \ Omega_{N-1}.
std::vector<GridFunction> annulus_partition(const Exhaustion& ex);

double distance(const Point& a, const Point& b, int dim);

// CSV: index,x[,y[,z]],flag
std::string nodes_csv(const Domain& domain);

}  // namespace critlab
