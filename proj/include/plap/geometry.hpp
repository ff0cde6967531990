#pragma once

// Planar convex domains: measures, inradius, diameter, inner parallel sets,
// boundary distance and the Cheeger constant of convex polygons and discs.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plap/errors.hpp"

namespace plap {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }

enum class DomainKind { polygon, rectangle, disc, interval };

inline const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::polygon: return "polygon";
    case DomainKind::rectangle: return "rectangle";
    case DomainKind::disc: return "disc";
    case DomainKind::interval: return "interval";
  }
  return "?";
}

struct Box {
  Point lo;
  Point hi;
  double width() const { return hi.x - lo.x; }
  double height() const { return hi.y - lo.y; }
};

/// Supporting line of a polygon edge in the form dot(normal, x) <= offset,
/// with `normal` the unit outward normal.
struct HalfPlane {
  Point normal;
  double offset = 0.0;
  double signed_distance(Point x) const { return offset - dot(normal, x); }
};

namespace detail {

inline double polygon_area(const std::vector<Point>& v) {
  double a = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

inline double polygon_perimeter(const std::vector<Point>& v) {
  double p = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) p += norm(v[(i + 1) % v.size()] - v[i]);
  return p;
}

// Removes repeated and collinear vertices (relative tolerance `tol`).
inline std::vector<Point> simplify_polygon(std::vector<Point> v, double tol) {
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    for (std::size_t i = 0; i < v.size() && v.size() >= 3; ++i) {
      const Point a = v[(i + v.size() - 1) % v.size()];
      const Point b = v[i];
      const Point c = v[(i + 1) % v.size()];
      const double scale = std::max({norm(b - a), norm(c - b), 1e-300});
      if (norm(b - a) <= tol || std::abs(cross(b - a, c - b)) <= tol * scale) {
        v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return v;
}

inline std::optional<std::array<double, 3>> solve3(const std::array<std::array<double, 3>, 3>& a,
                                                  const std::array<double, 3>& c) {
  auto det3 = [](const std::array<std::array<double, 3>, 3>& m) {
    return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
           m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
           m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  };
  const double det = det3(a);
  if (std::abs(det) < 1e-14) return std::nullopt;
  std::array<double, 3> x{};
  for (int col = 0; col < 3; ++col) {
    auto m = a;
    for (int row = 0; row < 3; ++row) m[row][col] = c[row];
    x[col] = det3(m) / det;
  }
  return x;
}

// Sutherland-Hodgman clip of a convex polygon by dot(n, x) <= c.
inline std::vector<Point> clip_convex(const std::vector<Point>& poly, const HalfPlane& hp) {
  std::vector<Point> out;
  if (poly.empty()) return out;
  out.reserve(poly.size() + 1);
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Point a = poly[i];
    const Point b = poly[(i + 1) % poly.size()];
    const double da = hp.signed_distance(a);
    const double db = hp.signed_distance(b);
    if (da >= 0.0) out.push_back(a);
    if ((da >= 0.0) != (db >= 0.0)) {
      const double t = da / (da - db);
      out.push_back(a + t * (b - a));
    }
  }
  return out;
}

}  // namespace detail

/// A convex planar domain (polygon, rectangle, disc) or an interval.
///
/// Polygons are stored counterclockwise; construction rejects nonconvex,
/// degenerate or collinear-vertex input.
class Domain {
 public:
  static Domain polygon(std::vector<Point> vertices) {
    if (vertices.size() < 3) throw ConfigError("polygon: at least 3 vertices required");
    if (detail::polygon_area(vertices) < 0.0) std::reverse(vertices.begin(), vertices.end());
    const std::size_t m = vertices.size();
    double scale = 0.0;
    for (const auto& v : vertices) scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
    for (std::size_t i = 0; i < m; ++i) {
      const Point a = vertices[i];
      const Point b = vertices[(i + 1) % m];
      const Point c = vertices[(i + 2) % m];
      if (norm(b - a) <= 1e-12 * std::max(scale, 1.0))
        throw ConfigError("polygon: repeated vertex " + std::to_string((i + 1) % m));
      const double turn = cross(b - a, c - b);
      if (std::abs(turn) <= 1e-12 * norm(b - a) * norm(c - b))
        throw ConfigError("polygon: collinear vertices at index " + std::to_string((i + 1) % m));
      if (turn < 0.0) throw ConfigError("polygon: not convex at vertex " + std::to_string((i + 1) % m));
    }
    // A convex polygon turns around exactly once.
    double winding = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const Point e0 = vertices[(i + 1) % m] - vertices[i];
      const Point e1 = vertices[(i + 2) % m] - vertices[(i + 1) % m];
      winding += std::atan2(cross(e0, e1), dot(e0, e1));
    }
    if (std::abs(winding - 2.0 * std::numbers::pi) > 1e-6)
      throw ConfigError("polygon: self-intersecting vertex list");
    Domain d;
    d.kind_ = DomainKind::polygon;
    d.vertices_ = std::move(vertices);
    return d;
  }

  static Domain rectangle(Point lo, Point hi) {
    if (!(hi.x > lo.x && hi.y > lo.y)) throw ConfigError("rectangle: max must exceed min");
    Domain d = polygon({lo, {hi.x, lo.y}, hi, {lo.x, hi.y}});
    d.kind_ = DomainKind::rectangle;
    return d;
  }

  static Domain unit_square() { return rectangle({0.0, 0.0}, {1.0, 1.0}); }

  static Domain disc(Point center, double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("disc: radius must be positive");
    Domain d;
    d.kind_ = DomainKind::disc;
    d.center_ = center;
    d.radius_ = radius;
    return d;
  }

  static Domain interval(double a, double b) {
    if (!(b > a)) throw ConfigError("interval: require a < b");
    Domain d;
    d.kind_ = DomainKind::interval;
    d.a_ = a;
    d.b_ = b;
    return d;
  }

  /// Regular polygon with `sides` vertices on the circle of radius `circumradius`.
  static Domain regular_polygon(int sides, double circumradius, Point center = {}) {
    if (sides < 3) throw ConfigError("regular polygon: sides >= 3");
    std::vector<Point> v;
    for (int k = 0; k < sides; ++k) {
      const double t = 2.0 * std::numbers::pi * k / sides;
      v.push_back({center.x + circumradius * std::cos(t), center.y + circumradius * std::sin(t)});
    }
    return polygon(std::move(v));
  }

  DomainKind kind() const { return kind_; }
  bool is_polygonal() const { return kind_ == DomainKind::polygon || kind_ == DomainKind::rectangle; }
  int dimension() const { return kind_ == DomainKind::interval ? 1 : 2; }

  const std::vector<Point>& vertices() const { return vertices_; }
  Point center() const { return center_; }
  double radius() const { return radius_; }
  double a() const { return a_; }
  double b() const { return b_; }

  /// Outward supporting half-planes, one per edge (polygonal domains).
  std::vector<HalfPlane> half_planes() const {
    std::vector<HalfPlane> hp;
    const std::size_t m = vertices_.size();
    hp.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
      const Point e = vertices_[(i + 1) % m] - vertices_[i];
      const double len = norm(e);
      const Point n{e.y / len, -e.x / len};
      hp.push_back({n, dot(n, vertices_[i])});
    }
    return hp;
  }

  Box bounding_box() const {
    switch (kind_) {
      case DomainKind::disc:
        return {{center_.x - radius_, center_.y - radius_}, {center_.x + radius_, center_.y + radius_}};
      case DomainKind::interval:
        return {{a_, 0.0}, {b_, 0.0}};
      default: {
        Box b{vertices_.front(), vertices_.front()};
        for (const auto& v : vertices_) {
          b.lo = {std::min(b.lo.x, v.x), std::min(b.lo.y, v.y)};
          b.hi = {std::max(b.hi.x, v.x), std::max(b.hi.y, v.y)};
        }
        return b;
      }
    }
  }

  /// The image under x -> t*x (t > 0).
  Domain scaled(double t) const {
    if (!(t > 0.0)) throw ConfigError("scale factor must be positive");
    Domain d = *this;
    for (auto& v : d.vertices_) v = t * v;
    d.center_ = t * center_;
    d.radius_ = t * radius_;
    d.a_ = t * a_;
    d.b_ = t * b_;
    return d;
  }

 private:
  Domain() = default;

  DomainKind kind_ = DomainKind::polygon;
  std::vector<Point> vertices_;
  Point center_;
  double radius_ = 0.0;
  double a_ = 0.0;
  double b_ = 0.0;
};

struct Measure {
  double area = 0.0;       // length for intervals
  double perimeter = 0.0;  // number of endpoints (2) for intervals
};

inline Measure measure(const Domain& d) {
  switch (d.kind()) {
    case DomainKind::disc:
      return {std::numbers::pi * d.radius() * d.radius(), 2.0 * std::numbers::pi * d.radius()};
    case DomainKind::interval:
      return {d.b() - d.a(), 2.0};
    default:
      return {detail::polygon_area(d.vertices()), detail::polygon_perimeter(d.vertices())};
  }
}

/// Signed distance to the boundary: positive inside, zero on the boundary,
/// negative outside. For polygons the negative branch is the largest violated
/// supporting-line distance, not the Euclidean distance to the polygon.
inline double distance_to_boundary(const Domain& d, Point x) {
  switch (d.kind()) {
    case DomainKind::disc:
      return d.radius() - norm(x - d.center());
    case DomainKind::interval:
      return std::min(x.x - d.a(), d.b() - x.x);
    default: {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& hp : d.half_planes()) best = std::min(best, hp.signed_distance(x));
      return best;
    }
  }
}

/// Radius of the largest inscribed ball.
///
/// For polygons this is the Chebyshev-center linear program, solved exactly by
/// enumerating the vertices of the feasible region (triples of active edges).
inline double inradius(const Domain& d) {
  switch (d.kind()) {
    case DomainKind::disc: return d.radius();
    case DomainKind::interval: return 0.5 * (d.b() - d.a());
    default: break;
  }
  const auto hp = d.half_planes();
  const std::size_t m = hp.size();
  double best = 0.0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k) {
        // n_q . x + r = c_q for q in {i, j, k}.
        const auto sol = detail::solve3({{{hp[i].normal.x, hp[i].normal.y, 1.0},
                                          {hp[j].normal.x, hp[j].normal.y, 1.0},
                                          {hp[k].normal.x, hp[k].normal.y, 1.0}}},
                                        {hp[i].offset, hp[j].offset, hp[k].offset});
        if (!sol) continue;
        const double x = (*sol)[0], y = (*sol)[1], r = (*sol)[2];
        if (r <= best) continue;
        bool feasible = true;
        for (const auto& h : hp)
          if (h.signed_distance({x, y}) < r * (1.0 - 1e-12) - 1e-14) {
            feasible = false;
            break;
          }
        if (feasible) best = r;
      }
  return best;
}

inline double diameter(const Domain& d) {
  switch (d.kind()) {
    case DomainKind::disc: return 2.0 * d.radius();
    case DomainKind::interval: return d.b() - d.a();
    default: break;
  }
  double best = 0.0;
  const auto& v = d.vertices();
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) best = std::max(best, norm(v[i] - v[j]));
  return best;
}

/// Vertices of the inner parallel set {x : dist(x, boundary) >= r} of a convex
/// polygon; empty when the set has no interior. Result is counterclockwise.
inline std::vector<Point> inner_parallel_vertices(const Domain& d, double r) {
  if (!d.is_polygonal()) throw ConfigError("inner parallel vertices: polygonal domain required");
  if (r < 0.0) throw ConfigError("inner parallel set: offset must be nonnegative");
  std::vector<Point> poly = d.vertices();
  if (r == 0.0) return poly;
  const double scale = diameter(d);
  for (auto hp : d.half_planes()) {
    hp.offset -= r;
    poly = detail::clip_convex(poly, hp);
    if (poly.size() < 3) return {};
  }
  poly = detail::simplify_polygon(std::move(poly), 1e-12 * scale);
  if (poly.size() < 3 || detail::polygon_area(poly) <= 1e-14 * scale * scale) return {};
  return poly;
}

/// Inner parallel set at offset r: polygon for polygonal input, concentric
/// disc for discs, nullopt when empty or degenerate (r >= inradius).
inline std::optional<Domain> inner_parallel_set(const Domain& d, double r) {
  if (r < 0.0) throw ConfigError("inner parallel set: offset must be nonnegative");
  if (d.kind() == DomainKind::disc) {
    if (r >= d.radius()) return std::nullopt;
    return Domain::disc(d.center(), d.radius() - r);
  }
  if (d.kind() == DomainKind::interval) {
    if (2.0 * r >= d.b() - d.a()) return std::nullopt;
    return Domain::interval(d.a() + r, d.b() - r);
  }
  auto v = inner_parallel_vertices(d, r);
  if (v.empty()) return std::nullopt;
  return Domain::polygon(std::move(v));
}

struct CheegerResult {
  double h = 0.0;                   // Cheeger constant
  double r = 0.0;                   // inner radius 1/h
  std::optional<Domain> inner_set;  // inner parallel set at offset r
  double area = 0.0;                // area of the rounded Cheeger set
  double perimeter = 0.0;           // perimeter of the rounded Cheeger set
  double verification_ratio = 0.0;  // perimeter / area
};

namespace detail {

// A(inner parallel set at r) - pi r^2; strictly decreasing on (0, inradius).
inline double cheeger_root_function(const Domain& d, double r) {
  double a = 0.0;
  if (d.kind() == DomainKind::disc) {
    const double s = std::max(d.radius() - r, 0.0);
    a = std::numbers::pi * s * s;
  } else {
    const auto v = inner_parallel_vertices(d, r);
    if (!v.empty()) a = polygon_area(v);
  }
  return a - std::numbers::pi * r * r;
}

}  // namespace detail

/// Cheeger constant and set of a convex polygon or disc.
///
/// The Cheeger set is the inner parallel set at offset r* rounded by discs of
/// radius r*, where r* is the root of A(inner set at r) = pi r^2, found by
/// bisection. h = 1/r*.
inline CheegerResult cheeger_convex(const Domain& d) {
  if (d.kind() == DomainKind::interval) throw ConfigError("cheeger: planar domain required");
  double lo = 0.0;
  double hi = inradius(d);
  if (!(detail::cheeger_root_function(d, lo) > 0.0) || !(detail::cheeger_root_function(d, hi) < 0.0))
    throw NumericalError("cheeger: root of A(inner set) - pi r^2 not bracketed on (0, inradius)");
  while (hi - lo > 1e-15 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (detail::cheeger_root_function(d, mid) > 0.0) lo = mid;
    else hi = mid;
  }
  CheegerResult res;
  res.r = 0.5 * (lo + hi);
  res.h = 1.0 / res.r;
  res.inner_set = inner_parallel_set(d, res.r);
  double inner_area = 0.0;
  double inner_perimeter = 0.0;
  if (res.inner_set) {
    const Measure m = measure(*res.inner_set);
    inner_area = m.area;
    inner_perimeter = m.perimeter;
  }
  res.area = inner_area + inner_perimeter * res.r + std::numbers::pi * res.r * res.r;
  res.perimeter = inner_perimeter + 2.0 * std::numbers::pi * res.r;
  res.verification_ratio = res.perimeter / res.area;
  return res;
}

/// Euclidean distance from x to the rounded Cheeger set's core (the inner set);
/// x lies in the Cheeger set iff this is <= r.
inline double distance_to_convex_set(const Domain& set, Point x) {
  if (set.kind() == DomainKind::disc) return std::max(0.0, norm(x - set.center()) - set.radius());
  const auto& v = set.vertices();
  if (distance_to_boundary(set, x) >= 0.0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point a = v[i];
    const Point e = v[(i + 1) % v.size()] - a;
    const double t = std::clamp(dot(x - a, e) / dot(e, e), 0.0, 1.0);
    best = std::min(best, norm(x - (a + t * e)));
  }
  return best;
}

}  // namespace plap
