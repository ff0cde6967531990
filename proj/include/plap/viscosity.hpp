#pragma once

// Residuals of the limiting equations at smooth points, and test-function
// checks of the one-dimensional kink and Neumann boundary examples.
//
// Grid residuals use the unnormalized trilinear Delta_inf u. Viscosity
// conditions at nonsmooth points are checked by sampling quadratic test
// functions phi(x) = u0 + b (x - x0) + c (x - x0)^2 over a (b, c) lattice.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "plap/fields.hpp"
#include "plap/geometry.hpp"

namespace plap {

struct RegionResidual {
  std::string region;
  double sup_residual = 0.0;
  int nodes = 0;
};

struct LimitResidualReport {
  std::string equation;
  std::string convention;  // which Delta_inf convention was used
  double sup_residual = 0.0;
  int flagged_count = 0;   // interior nodes skipped (|grad u| < floor or excluded)
  int evaluated_count = 0;
  std::vector<RegionResidual> regions;
  OperatorField residual;  // node-wise residual where evaluated
  // Neumann system only: sup of (|grad u| - Lambda |u|)^+ at interior nodes next
  // to boundary faces where du/dn has the sign of u (the classical Neumann
  // condition fails there and the viscosity condition requires the eikonal
  // branch to be inactive).
  double boundary_eikonal = 0.0;
  double band = 0.0;
};

namespace detail {

// Nodes to exclude from residual suprema: within `width` of the ridge
// (medial axis) of a convex polygon, or of the center of a disc.
inline bool near_ridge(const Domain& d, Point x, double width) {
  if (d.kind() == DomainKind::disc) return norm(x - d.center()) < width;
  if (d.kind() == DomainKind::interval) return std::abs(x.x - 0.5 * (d.a() + d.b())) < width;
  double first = std::numeric_limits<double>::infinity(), second = first;
  for (const auto& hp : d.half_planes()) {
    const double s = hp.signed_distance(x);
    if (s < first) {
      second = first;
      first = s;
    } else if (s < second) {
      second = s;
    }
  }
  // Two supporting lines at distances differing by t meet the point's
  // bisector at a distance of order t; 2*width covers every edge angle used.
  return second - first < 2.0 * width;
}

template <class Residual>
LimitResidualReport node_residual(const ScalarField& u, double grad_floor, std::string equation,
                                  const std::vector<std::uint8_t>* exclude, Residual&& residual) {
  const Grid& g = u.grid();
  const double floor = grad_floor >= 0.0 ? grad_floor : default_grad_floor(u);
  LimitResidualReport rep;
  rep.equation = std::move(equation);
  rep.convention = "unnormalized Delta_inf u = sum_ij u_i u_ij u_j";
  rep.residual = OperatorField{ScalarField(u.grid_ptr()),
                               std::vector<std::uint8_t>(static_cast<std::size_t>(g.size()), 0)};
  for (int k = 0; k < g.size(); ++k) {
    if (!g.interior(k)) continue;
    const auto d = derivatives_at(u, k);
    if (d.grad_norm() < floor || (exclude && (*exclude)[static_cast<std::size_t>(k)])) {
      ++rep.flagged_count;
      continue;
    }
    const double r = residual(k, d);
    rep.residual.value[k] = r;
    rep.residual.defined[static_cast<std::size_t>(k)] = 1;
    rep.sup_residual = std::max(rep.sup_residual, std::abs(r));
    ++rep.evaluated_count;
  }
  return rep;
}

}  // namespace detail

/// Mask of interior nodes within `width` of the ridge of the domain.
inline std::vector<std::uint8_t> ridge_mask(const Grid& g, double width) {
  std::vector<std::uint8_t> m(static_cast<std::size_t>(g.size()), 0);
  for (int k = 0; k < g.size(); ++k)
    if (g.interior(k) && detail::near_ridge(g.domain(), g.node(k), width)) m[static_cast<std::size_t>(k)] = 1;
  return m;
}

/// min{|grad u| - 1, -Delta_inf u} at unflagged interior nodes.
inline LimitResidualReport residual_limit_torsion(const ScalarField& u, double grad_floor = -1.0,
                                                  const std::vector<std::uint8_t>* exclude = nullptr) {
  return detail::node_residual(u, grad_floor, "min{|grad u| - 1, -Delta_inf u} = 0", exclude,
                               [](int, const NodeDerivatives& d) {
                                 return std::min(d.grad_norm() - 1.0, -d.infinity_laplacian());
                               });
}

/// min{|grad u| - lambda u, -Delta_inf u} at unflagged interior nodes.
inline LimitResidualReport residual_limit_eigen(const ScalarField& u, double lambda, double grad_floor = -1.0,
                                                const std::vector<std::uint8_t>* exclude = nullptr) {
  return detail::node_residual(u, grad_floor, "min{|grad u| - lambda u, -Delta_inf u} = 0", exclude,
                               [&u, lambda](int k, const NodeDerivatives& d) {
                                 return std::min(d.grad_norm() - lambda * u[k], -d.infinity_laplacian());
                               });
}

/// Three-branch limit Neumann system on {u > band}, {u < -band}, {|u| <= band},
/// band = 2 h sup|grad u|, plus the viscosity Neumann check at the faces.
inline LimitResidualReport residual_neumann_system(const ScalarField& u, double lambda, double grad_floor = -1.0) {
  const Grid& g = u.grid();
  const auto grad = gradient(u);
  double gmax = 0.0;
  for (int k = 0; k < g.size(); ++k)
    if (grad.defined[static_cast<std::size_t>(k)]) gmax = std::max(gmax, norm(grad.value[static_cast<std::size_t>(k)]));
  const double band = 2.0 * g.spacing() * gmax;
  RegionResidual pos{"u>0", 0.0, 0}, neg{"u<0", 0.0, 0}, zero{"u=0", 0.0, 0};
  auto rep = detail::node_residual(
      u, grad_floor, "Neumann limit system (min / max / Delta_inf branches)", nullptr,
      [&](int k, const NodeDerivatives& d) {
        double r;
        RegionResidual* reg;
        if (u[k] > band) {
          r = std::min(d.grad_norm() - lambda * u[k], -d.infinity_laplacian());
          reg = &pos;
        } else if (u[k] < -band) {
          r = std::max(-d.grad_norm() - lambda * u[k], -d.infinity_laplacian());
          reg = &neg;
        } else {
          r = -d.infinity_laplacian();
          reg = &zero;
        }
        reg->sup_residual = std::max(reg->sup_residual, std::abs(r));
        ++reg->nodes;
        return r;
      });
  rep.regions = {pos, neg, zero};
  rep.band = band;
  // Viscosity Neumann condition: where du/dn has the sign of u, a test function
  // touching from the appropriate side can make -Delta_inf phi > 0, so the
  // eikonal branch |grad u| - Lambda |u| must be <= 0.
  const double h = g.spacing();
  const int jr = g.dimension() == 2 ? 1 : 0;
  const Domain& dom = g.domain();
  for (int k = 0; k < g.size(); ++k) {
    if (!grad.defined[static_cast<std::size_t>(k)] || std::abs(u[k]) <= band) continue;
    bool next_to_boundary = false;
    for (int dj = -jr; dj <= jr && !next_to_boundary; ++dj)
      for (int di = -1; di <= 1; ++di)
        if (g.kind(k + g.offset(di, dj)) == NodeKind::boundary) next_to_boundary = true;
    if (!next_to_boundary) continue;
    const Point x = g.node(k);
    Point normal{};
    if (dom.kind() == DomainKind::disc) {
      normal = (1.0 / std::max(norm(x - dom.center()), 1e-300)) * (x - dom.center());
    } else if (dom.kind() == DomainKind::interval) {
      normal = {x.x - dom.a() < dom.b() - x.x ? -1.0 : 1.0, 0.0};
    } else {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& hp : dom.half_planes())
        if (hp.signed_distance(x) < best) {
          best = hp.signed_distance(x);
          normal = hp.normal;
        }
      if (best > 1.5 * h) continue;
    }
    const Point gu = grad.value[static_cast<std::size_t>(k)];
    const double dn = dot(gu, normal);
    if (dn * u[k] <= 0.0 || std::abs(dn) < 0.5 * norm(gu)) continue;
    rep.boundary_eikonal = std::max(rep.boundary_eikonal, norm(gu) - lambda * std::abs(u[k]));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// One-dimensional viscosity checks with sampled quadratic test functions.

struct TestFunction {
  double b = 0.0;  // phi'(x0)
  double c = 0.0;  // phi''(x0) / 2
};

struct ViscosityCheck {
  bool pass = true;
  std::vector<TestFunction> witnesses;  // violating test functions
  int touching_above = 0;               // admissible test functions sampled
  int touching_below = 0;
  std::string active_branch;            // diagnostic bookkeeping
};

namespace detail {

// Linear lattice of `count` values over [lo, hi].
inline std::vector<double> lattice(double lo, double hi, int count) {
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
  return v;
}

// phi touches u at x0 from above (sign = +1) or below (sign = -1) on the
// sampled one-sided neighborhoods given.
template <class U>
bool touches(const U& u, double x0, double u0, TestFunction t, int sign, bool left, bool right) {
  constexpr double eta = 1e-4;
  constexpr int samples = 8;
  for (int s = 1; s <= samples; ++s) {
    const double dx = eta * s / samples;
    for (int side : {-1, 1}) {
      if ((side < 0 && !left) || (side > 0 && !right)) continue;
      const double x = x0 + side * dx;
      const double phi = u0 + t.b * (x - x0) + t.c * (x - x0) * (x - x0);
      if (sign * (phi - u(x)) < 0.0) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Viscosity check of v = 1 - |x| for min{|v'| - lambda v, -|v'|^2 v''} = 0 on
/// (-1, 1): subsolution and supersolution at the kink x = 0 and at x = +-1/2.
inline ViscosityCheck check_1d_kink(double lambda, int lattice_size = 200) {
  if (!(lambda > 0.0)) throw ConfigError("check_1d_kink: lambda must be positive");
  auto v = [](double x) { return 1.0 - std::abs(x); };
  ViscosityCheck out;
  const auto bs = detail::lattice(-2.0, 2.0, lattice_size);
  const auto cs = detail::lattice(-2.0, 2.0, lattice_size);
  auto branch = [lambda](double phi0, TestFunction t) {
    return std::min(std::abs(t.b) - lambda * phi0, -t.b * t.b * 2.0 * t.c);
  };
  for (double x0 : {-0.5, 0.0, 0.5}) {
    const double u0 = v(x0);
    for (double b : bs)
      for (double c : cs) {
        // At smooth points only b = v'(x0) can touch; test it explicitly.
        const TestFunction t{x0 == 0.0 ? b : (x0 < 0 ? 1.0 : -1.0), c};
        if (detail::touches(v, x0, u0, t, +1, true, true)) {
          ++out.touching_above;
          if (branch(u0, t) > 0.0) {
            out.pass = false;
            out.witnesses.push_back(t);
          }
        }
        if (detail::touches(v, x0, u0, t, -1, true, true)) {
          ++out.touching_below;
          if (branch(u0, t) < 0.0) {
            out.pass = false;
            out.witnesses.push_back(t);
          }
        }
      }
  }
  out.active_branch = "min{|phi'| - lambda phi, -|phi'|^2 phi''}";
  return out;
}

/// Viscosity Neumann condition for u(x) = x on (-1, 1) at x = 1:
///   min{min{|phi'| - L phi, -|phi'|^2 phi''}, phi'}(1) <= 0 (phi above),
///   max{min{|psi'| - L psi, -|psi'|^2 psi''}, psi'}(1) >= 0 (psi below),
/// with touching tested on (1 - eta, 1].
inline ViscosityCheck check_1d_neumann_bc(double big_lambda, int lattice_size = 200) {
  if (!(big_lambda > 0.0)) throw ConfigError("check_1d_neumann_bc: Lambda must be positive");
  auto u = [](double x) { return x; };
  ViscosityCheck out;
  const auto bs = detail::lattice(-2.0, 2.0, lattice_size);
  const auto cs = detail::lattice(-2.0, 2.0, lattice_size);
  int eikonal_active = 0, derivative_active = 0, degenerate_active = 0;
  for (double b : bs)
    for (double c : cs) {
      const TestFunction t{b, c};
      const double phi0 = 1.0;
      const double eik = std::abs(b) - big_lambda * phi0;
      const double deg = -b * b * 2.0 * c;
      const double inner = std::min(eik, deg);
      if (detail::touches(u, 1.0, 1.0, t, +1, true, false)) {
        ++out.touching_above;
        const double val = std::min(inner, b);
        if (val > 0.0) {
          out.pass = false;
          out.witnesses.push_back(t);
        }
        if (b <= 0.0) ++derivative_active;
        else if (eik <= 0.0) ++eikonal_active;
        else ++degenerate_active;
      }
      if (detail::touches(u, 1.0, 1.0, t, -1, true, false)) {
        ++out.touching_below;
        if (std::max(inner, b) < 0.0) {
          out.pass = false;
          out.witnesses.push_back(t);
        }
      }
    }
  out.active_branch = "above: phi' branch " + std::to_string(derivative_active) + ", eikonal branch " +
                      std::to_string(eikonal_active) + ", degenerate branch " + std::to_string(degenerate_active);
  return out;
}

}  // namespace plap
