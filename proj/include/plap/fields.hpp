#pragma once

// Uniform-grid sampling of scalar functions on a domain and central
// finite-difference realizations of the gradient, Laplacian, infinity-Laplacian,
// p-Laplacian and normalized p-Laplacian.
//
// Operators are evaluated at interior nodes only. Nodes where |grad u| falls
// below the gradient floor are flagged and carry no value for the
// gradient-normalized operators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "plap/errors.hpp"
#include "plap/geometry.hpp"

namespace plap {

enum class NodeKind : std::uint8_t { exterior, boundary, interior };

/// Node lattice covering a domain's bounding box with spacing h.
///
/// A node is interior when it lies deeper than h/2 inside the domain; boundary
/// nodes are the non-interior nodes in the 9-point neighborhood of an interior
/// node; all other nodes are exterior. Node k has lattice index (k % nx, k / nx).
class Grid {
 public:
  Grid(Domain domain, double h, Point origin, int nx, int ny, std::vector<NodeKind> kinds)
      : domain_(std::move(domain)), h_(h), origin_(origin), nx_(nx), ny_(ny), kinds_(std::move(kinds)) {
    for (auto k : kinds_) {
      if (k == NodeKind::interior) ++interior_count_;
      if (k != NodeKind::exterior) ++active_count_;
    }
  }

  const Domain& domain() const { return domain_; }
  int dimension() const { return ny_ == 1 ? 1 : 2; }
  double spacing() const { return h_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int size() const { return nx_ * ny_; }
  int interior_count() const { return interior_count_; }
  int active_count() const { return active_count_; }

  int index(int i, int j) const { return i + nx_ * j; }
  int i_of(int k) const { return k % nx_; }
  int j_of(int k) const { return k / nx_; }
  bool in_range(int i, int j) const { return i >= 0 && i < nx_ && j >= 0 && j < ny_; }

  Point node(int k) const { return {origin_.x + h_ * i_of(k), origin_.y + h_ * j_of(k)}; }
  Point origin() const { return origin_; }
  NodeKind kind(int k) const { return kinds_[static_cast<std::size_t>(k)]; }
  bool interior(int k) const { return kind(k) == NodeKind::interior; }
  bool active(int k) const { return kind(k) != NodeKind::exterior; }

  /// Offset of the neighbor (di, dj) from node k in linear indexing.
  int offset(int di, int dj) const { return di + nx_ * dj; }

 private:
  Domain domain_;
  double h_;
  Point origin_;
  int nx_;
  int ny_;
  std::vector<NodeKind> kinds_;
  int interior_count_ = 0;
  int active_count_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Builds the grid with spacing (largest bounding-box side) / n.
inline GridPtr build_grid(const Domain& d, int n) {
  if (n < 8) throw ConfigError("grid: resolution must be at least 8");
  const Box box = d.bounding_box();
  const double side = std::max(box.width(), box.height());
  const double h = side / n;
  const int nx = static_cast<int>(std::ceil(box.width() / h - 1e-9)) + 1;
  const int ny = d.dimension() == 1 ? 1 : static_cast<int>(std::ceil(box.height() / h - 1e-9)) + 1;
  std::vector<NodeKind> kinds(static_cast<std::size_t>(nx) * ny, NodeKind::exterior);
  auto at = [&](int i, int j) -> NodeKind& { return kinds[static_cast<std::size_t>(i + nx * j)]; };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const Point x{box.lo.x + h * i, box.lo.y + h * j};
      if (distance_to_boundary(d, x) > 0.5 * h) at(i, j) = NodeKind::interior;
    }
  const int jr = ny == 1 ? 0 : 1;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      if (at(i, j) != NodeKind::interior) continue;
      for (int dj = -jr; dj <= jr; ++dj)
        for (int di = -1; di <= 1; ++di) {
          const int ii = i + di, jj = j + dj;
          if (ii < 0 || jj < 0 || ii >= nx || jj >= ny)
            throw NumericalError("grid: interior node adjacent to lattice edge");
          if (at(ii, jj) == NodeKind::exterior) at(ii, jj) = NodeKind::boundary;
        }
    }
  auto g = std::make_shared<const Grid>(d, h, box.lo, nx, ny, std::move(kinds));
  if (g->interior_count() == 0) throw ConfigError("grid: domain too thin for resolution, no interior nodes");
  return g;
}

/// One value per node; exterior entries are held at zero and never read.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(GridPtr grid, double fill = 0.0)
      : grid_(std::move(grid)), values_(static_cast<std::size_t>(grid_->size()), 0.0) {
    for (int k = 0; k < grid_->size(); ++k)
      if (grid_->active(k)) values_[static_cast<std::size_t>(k)] = fill;
  }
  ScalarField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != static_cast<std::size_t>(grid_->size()))
      throw ConfigError("field: value count does not match grid");
    for (int k = 0; k < grid_->size(); ++k)
      if (!grid_->active(k)) values_[static_cast<std::size_t>(k)] = 0.0;
  }

  /// Samples f at every non-exterior node.
  template <class F>
  static ScalarField sample(GridPtr grid, F&& f) {
    ScalarField out(grid);
    for (int k = 0; k < grid->size(); ++k)
      if (grid->active(k)) out.values_[static_cast<std::size_t>(k)] = f(grid->node(k));
    return out;
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  int size() const { return static_cast<int>(values_.size()); }

  double operator[](int k) const { return values_[static_cast<std::size_t>(k)]; }
  double& operator[](int k) { return values_[static_cast<std::size_t>(k)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double max() const { return reduce([](double a, double b) { return std::max(a, b); }, -inf()); }
  double min() const { return reduce([](double a, double b) { return std::min(a, b); }, inf()); }
  double sup_norm() const { return std::max(std::abs(max()), std::abs(min())); }
  double oscillation() const { return max() - min(); }

  ScalarField& operator*=(double s) {
    for (auto& v : values_) v *= s;
    return *this;
  }

 private:
  static double inf() { return std::numeric_limits<double>::infinity(); }
  template <class Op>
  double reduce(Op op, double init) const {
    double acc = init;
    for (int k = 0; k < grid_->size(); ++k)
      if (grid_->active(k)) acc = op(acc, values_[static_cast<std::size_t>(k)]);
    return acc;
  }

  GridPtr grid_;
  std::vector<double> values_;
};

/// Operator values with a definedness mask (interior and not flagged).
struct OperatorField {
  ScalarField value;
  std::vector<std::uint8_t> defined;

  int flagged_count() const {
    int n = 0;
    const Grid& g = value.grid();
    for (int k = 0; k < g.size(); ++k)
      if (g.interior(k) && !defined[static_cast<std::size_t>(k)]) ++n;
    return n;
  }
  double sup_abs() const {
    double s = 0.0;
    for (int k = 0; k < value.size(); ++k)
      if (defined[static_cast<std::size_t>(k)]) s = std::max(s, std::abs(value[k]));
    return s;
  }
  bool is_defined(int k) const { return defined[static_cast<std::size_t>(k)] != 0; }
};

struct VectorField {
  GridPtr grid;
  std::vector<Point> value;           // zero where undefined
  std::vector<std::uint8_t> defined;  // interior nodes
};

/// Central first and second differences at an interior node.
struct NodeDerivatives {
  double ux = 0, uy = 0, uxx = 0, uyy = 0, uxy = 0;
  double grad_norm() const { return std::hypot(ux, uy); }
  double laplacian() const { return uxx + uyy; }
  /// Unnormalized trilinear form sum_ij u_i u_ij u_j.
  double infinity_laplacian() const { return ux * ux * uxx + 2.0 * ux * uy * uxy + uy * uy * uyy; }
};

inline NodeDerivatives derivatives_at(const ScalarField& f, int k) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  NodeDerivatives d;
  const double c = f[k];
  const double e = f[k + 1], w = f[k - 1];
  d.ux = (e - w) / (2.0 * h);
  d.uxx = (e - 2.0 * c + w) / (h * h);
  if (g.dimension() == 2) {
    const int up = g.offset(0, 1);
    const double n = f[k + up], s = f[k - up];
    d.uy = (n - s) / (2.0 * h);
    d.uyy = (n - 2.0 * c + s) / (h * h);
    d.uxy = (f[k + 1 + up] - f[k + 1 - up] - f[k - 1 + up] + f[k - 1 - up]) / (4.0 * h * h);
  }
  return d;
}

/// Default gradient floor 1e-8 * oscillation / h.
inline double default_grad_floor(const ScalarField& f) {
  return 1e-8 * f.oscillation() / f.grid().spacing();
}

namespace detail {

template <class Eval>
OperatorField map_interior(const ScalarField& f, Eval&& eval) {
  const Grid& g = f.grid();
  OperatorField out{ScalarField(f.grid_ptr()), std::vector<std::uint8_t>(static_cast<std::size_t>(g.size()), 0)};
  for (int k = 0; k < g.size(); ++k) {
    if (!g.interior(k)) continue;
    double v = 0.0;
    if (eval(derivatives_at(f, k), v)) {
      out.value[k] = v;
      out.defined[static_cast<std::size_t>(k)] = 1;
    }
  }
  return out;
}

inline double resolve_floor(const ScalarField& f, double grad_floor) {
  return grad_floor >= 0.0 ? grad_floor : default_grad_floor(f);
}

}  // namespace detail

inline VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out{f.grid_ptr(), std::vector<Point>(static_cast<std::size_t>(g.size())),
                  std::vector<std::uint8_t>(static_cast<std::size_t>(g.size()), 0)};
  for (int k = 0; k < g.size(); ++k) {
    if (!g.interior(k)) continue;
    const auto d = derivatives_at(f, k);
    out.value[static_cast<std::size_t>(k)] = {d.ux, d.uy};
    out.defined[static_cast<std::size_t>(k)] = 1;
  }
  return out;
}

/// 5-point (3-point in 1-D) Laplacian.
inline OperatorField laplacian(const ScalarField& f) {
  return detail::map_interior(f, [](const NodeDerivatives& d, double& v) {
    v = d.laplacian();
    return true;
  });
}

/// sum_ij u_i u_ij u_j; flagged where |grad u| < grad_floor (negative: default floor).
inline OperatorField infinity_laplacian(const ScalarField& f, double grad_floor = -1.0) {
  const double floor = detail::resolve_floor(f, grad_floor);
  return detail::map_interior(f, [floor](const NodeDerivatives& d, double& v) {
    if (d.grad_norm() < floor) return false;
    v = d.infinity_laplacian();
    return true;
  });
}

/// |grad u|^{p-2} [Delta u + (p-2) Delta_inf u / |grad u|^2], for 1 < p < inf.
inline OperatorField p_laplacian(const ScalarField& f, double p, double grad_floor = -1.0) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p_laplacian: require 1 < p < inf");
  const double floor = detail::resolve_floor(f, grad_floor);
  return detail::map_interior(f, [floor, p](const NodeDerivatives& d, double& v) {
    const double gn = d.grad_norm();
    if (gn < floor) return false;
    const double g2 = gn * gn;
    v = std::pow(gn, p - 2.0) * (d.laplacian() + (p - 2.0) * d.infinity_laplacian() / g2);
    return true;
  });
}

/// (p-1)/p u_nunu + 1/p (Delta u - u_nunu), u_nunu = Delta_inf u / |grad u|^2.
/// p = 1 and p = +inf give the pure 1- and inf-normalized terms.
inline OperatorField normalized_p_laplacian(const ScalarField& f, double p, double grad_floor = -1.0) {
  if (!(p >= 1.0)) throw ConfigError("normalized_p_laplacian: require p >= 1");
  const double floor = detail::resolve_floor(f, grad_floor);
  const double a = std::isinf(p) ? 1.0 : (p - 1.0) / p;
  const double b = std::isinf(p) ? 0.0 : 1.0 / p;
  return detail::map_interior(f, [floor, a, b](const NodeDerivatives& d, double& v) {
    const double gn = d.grad_norm();
    if (gn < floor) return false;
    const double unn = d.infinity_laplacian() / (gn * gn);
    v = a * unn + b * (d.laplacian() - unn);
    return true;
  });
}

/// Divergence-form p-Laplacian by flux differencing across cell faces.
///
/// Face flux |grad u|^{p-2} du/dn uses the one-sided normal difference and the
/// average of the two adjacent central tangential differences.
inline OperatorField p_laplacian_flux(const ScalarField& f, double p, double grad_floor = -1.0) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p_laplacian_flux: require 1 < p < inf");
  const Grid& g = f.grid();
  const double h = g.spacing();
  const double floor = detail::resolve_floor(f, grad_floor);
  const int up = g.offset(0, 1);
  // Central tangential difference at node m in direction `step`.
  auto central = [&](int m, int step) { return (f[m + step] - f[m - step]) / (2.0 * h); };
  auto flux = [&](int a, int b, int tangent_step) {
    const double normal = (f[b] - f[a]) / h;
    double tangential = 0.0;
    if (g.dimension() == 2) tangential = 0.5 * (central(a, tangent_step) + central(b, tangent_step));
    const double gn = std::hypot(normal, tangential);
    if (gn == 0.0) return 0.0;
    return std::pow(gn, p - 2.0) * normal;
  };
  OperatorField out{ScalarField(f.grid_ptr()), std::vector<std::uint8_t>(static_cast<std::size_t>(g.size()), 0)};
  for (int k = 0; k < g.size(); ++k) {
    if (!g.interior(k)) continue;
    if (derivatives_at(f, k).grad_norm() < floor) continue;
    double v = (flux(k, k + 1, up) - flux(k - 1, k, up)) / h;
    if (g.dimension() == 2) v += (flux(k, k + up, 1) - flux(k - up, k, 1)) / h;
    out.value[k] = v;
    out.defined[static_cast<std::size_t>(k)] = 1;
  }
  return out;
}

/// Intrinsic-coordinate decomposition at interior nodes.
///
/// `curvature_term` is (n-1) H u_nu = |grad u| div(grad u / |grad u|), with the
/// divergence taken by central differences of the unit normal field; it is
/// defined only where the four axis neighbors are interior and unflagged.
struct OperatorSample {
  GridPtr grid;
  std::vector<double> grad_norm;
  std::vector<Point> descent;  // nu = -grad u / |grad u|
  std::vector<double> u_nunu;
  std::vector<double> curvature_term;
  std::vector<double> p_laplacian;
  std::vector<double> normalized_p_laplacian;
  std::vector<std::uint8_t> defined;            // gradient not flagged
  std::vector<std::uint8_t> curvature_defined;  // curvature_term available
};

inline OperatorSample sample_operators(const ScalarField& f, double p, double grad_floor = -1.0) {
  const Grid& g = f.grid();
  const double h = g.spacing();
  const double floor = detail::resolve_floor(f, grad_floor);
  const auto n = static_cast<std::size_t>(g.size());
  OperatorSample s{f.grid_ptr(), std::vector<double>(n), std::vector<Point>(n), std::vector<double>(n),
                   std::vector<double>(n), std::vector<double>(n), std::vector<double>(n),
                   std::vector<std::uint8_t>(n, 0), std::vector<std::uint8_t>(n, 0)};
  std::vector<Point> unit(n);
  for (int k = 0; k < g.size(); ++k) {
    if (!g.interior(k)) continue;
    const auto d = derivatives_at(f, k);
    const double gn = d.grad_norm();
    const auto uk = static_cast<std::size_t>(k);
    s.grad_norm[uk] = gn;
    if (gn < floor) continue;
    s.defined[uk] = 1;
    unit[uk] = {d.ux / gn, d.uy / gn};
    s.descent[uk] = {-d.ux / gn, -d.uy / gn};
    s.u_nunu[uk] = d.infinity_laplacian() / (gn * gn);
    s.p_laplacian[uk] = std::pow(gn, p - 2.0) * (d.laplacian() + (p - 2.0) * s.u_nunu[uk]);
    s.normalized_p_laplacian[uk] = std::isinf(p) ? s.u_nunu[uk]
                                                 : (p - 1.0) / p * s.u_nunu[uk] + (d.laplacian() - s.u_nunu[uk]) / p;
  }
  const int up = g.offset(0, 1);
  for (int k = 0; k < g.size(); ++k) {
    const auto uk = static_cast<std::size_t>(k);
    if (!s.defined[uk]) continue;
    auto ok = [&](int m) { return g.interior(m) && s.defined[static_cast<std::size_t>(m)]; };
    if (!ok(k + 1) || !ok(k - 1)) continue;
    double div = (unit[uk + 1].x - unit[uk - 1].x) / (2.0 * h);
    if (g.dimension() == 2) {
      if (!ok(k + up) || !ok(k - up)) continue;
      div += (unit[static_cast<std::size_t>(k + up)].y - unit[static_cast<std::size_t>(k - up)].y) / (2.0 * h);
    }
    s.curvature_term[uk] = s.grad_norm[uk] * div;
    s.curvature_defined[uk] = 1;
  }
  return s;
}

}  // namespace plap
