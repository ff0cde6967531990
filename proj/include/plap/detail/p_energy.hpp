#pragma once

// Discrete p-Dirichlet energy on the active cells of a grid, its gradient, and
// the weighted-Laplacian preconditioner built from the energy's edge weights.
//
// Each 2-D cell carries the four corner gradients formed from one horizontal
// and one vertical cell edge difference; each is weighted by h^2/4. For p = 2
// this reproduces the 5-point Laplacian, and the cell energy is invariant under
// the symmetries of the square lattice.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "plap/fields.hpp"

namespace plap::detail {

class PEnergy {
 public:
  explicit PEnergy(GridPtr grid) : grid_(std::move(grid)) {
    const Grid& g = *grid_;
    const double h = g.spacing();
    mass_.assign(static_cast<std::size_t>(g.size()), 0.0);
    if (g.dimension() == 1) {
      for (int k = 0; k + 1 < g.size(); ++k)
        if (g.active(k) && g.active(k + 1)) {
          cells_.push_back(k);
          mass_[static_cast<std::size_t>(k)] += 0.5 * h;
          mass_[static_cast<std::size_t>(k + 1)] += 0.5 * h;
        }
    } else {
      const int up = g.offset(0, 1);
      for (int j = 0; j + 1 < g.ny(); ++j)
        for (int i = 0; i + 1 < g.nx(); ++i) {
          const int k = g.index(i, j);
          if (g.active(k) && g.active(k + 1) && g.active(k + up) && g.active(k + up + 1)) {
            cells_.push_back(k);
            for (int c : {k, k + 1, k + up, k + up + 1}) mass_[static_cast<std::size_t>(c)] += 0.25 * h * h;
          }
        }
    }
  }

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  /// Lumped (cell-corner) quadrature weights; zero off the active cells.
  const std::vector<double>& mass() const { return mass_; }
  const std::vector<int>& cells() const { return cells_; }

  /// E(v) = sum_cells w sum_corners (|g|^2 + delta^2)^{p/2}, approximating the
  /// integral of |grad v|^p. Optionally fills grad = dE/dv, and edge weights
  /// wx[k] (edge k -> k+1) and wy[k] (edge k -> k+up) with grad = p L_w v.
  double evaluate(std::span<const double> v, double p, double delta, std::span<double> grad = {},
                  std::span<double> wx = {}, std::span<double> wy = {}) const {
    const Grid& g = *grid_;
    const double h = g.spacing();
    const double d2 = delta * delta;
    const bool want_grad = !grad.empty();
    const bool want_w = !wx.empty();
    if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);
    if (want_w) {
      std::fill(wx.begin(), wx.end(), 0.0);
      if (!wy.empty()) std::fill(wy.begin(), wy.end(), 0.0);
    }
    const double half_p = 0.5 * p;
    double energy = 0.0;
    if (g.dimension() == 1) {
      const double w = h;
      for (int k : cells_) {
        const double dx = (v[k + 1] - v[k]) / h;
        const double s = dx * dx + d2;
        energy += w * std::pow(s, half_p);
        if (want_grad || want_w) {
          const double wt = w * weight_power(s, p) / (h * h);
          if (want_grad) {
            const double gflux = p * wt * (v[k + 1] - v[k]);
            grad[k] -= gflux;
            grad[k + 1] += gflux;
          }
          if (want_w) wx[k] += wt;
        }
      }
      return energy;
    }
    const int up = g.offset(0, 1);
    const double w = 0.25 * h * h;
    for (int k : cells_) {
      const double v00 = v[k], v10 = v[k + 1], v01 = v[k + up], v11 = v[k + up + 1];
      const double dxb = (v10 - v00) / h, dxt = (v11 - v01) / h;
      const double dyl = (v01 - v00) / h, dyr = (v11 - v10) / h;
      const double s[4] = {dxb * dxb + dyl * dyl + d2, dxb * dxb + dyr * dyr + d2, dxt * dxt + dyl * dyl + d2,
                           dxt * dxt + dyr * dyr + d2};
      for (double si : s) energy += w * std::pow(si, half_p);
      if (!(want_grad || want_w)) continue;
      double c[4];
      for (int q = 0; q < 4; ++q) c[q] = w * weight_power(s[q], p) / (h * h);
      // Edge weights: bottom (00-10) used by corners 0,1; top (01-11) by 2,3;
      // left (00-01) by 0,2; right (10-11) by 1,3.
      const double wb = c[0] + c[1], wt = c[2] + c[3], wl = c[0] + c[2], wr = c[1] + c[3];
      if (want_grad) {
        const double fb = p * wb * (v10 - v00), ft = p * wt * (v11 - v01);
        const double fl = p * wl * (v01 - v00), fr = p * wr * (v11 - v10);
        grad[k] -= fb + fl;
        grad[k + 1] += fb - fr;
        grad[k + up] += fl - ft;
        grad[k + up + 1] += ft + fr;
      }
      if (want_w) {
        wx[k] += wb;
        wx[k + up] += wt;
        wy[k] += wl;
        wy[k + 1] += wr;
      }
    }
    return energy;
  }

  /// sum_k mass_k |v_k|^p.
  double lp_mass(std::span<const double> v, double p) const {
    double m = 0.0;
    for (std::size_t k = 0; k < mass_.size(); ++k)
      if (mass_[k] > 0.0 && v[k] != 0.0) m += mass_[k] * std::pow(std::abs(v[k]), p);
    return m;
  }

 private:
  // s^{(p-2)/2} with s = 0 mapped to 0 (the flux |g|^{p-2} g vanishes there).
  static double weight_power(double s, double p) {
    if (s <= 0.0) return 0.0;
    return std::pow(s, 0.5 * (p - 2.0));
  }

  GridPtr grid_;
  std::vector<int> cells_;
  std::vector<double> mass_;
};

/// Weighted graph Laplacian over the free nodes, refactored per update.
///
/// Edge weights are clamped from below at `relative_floor` times the largest
/// weight so the matrix stays positive definite on flat regions. The sparsity
/// pattern (the cell edges) is fixed, so the symbolic analysis runs once.
class WeightedLaplacianSolver {
 public:
  WeightedLaplacianSolver(const PEnergy& energy, std::vector<std::uint8_t> free_mask)
      : free_(std::move(free_mask)), index_(free_.size(), -1) {
    for (std::size_t k = 0; k < free_.size(); ++k)
      if (free_[k]) index_[k] = n_++;
    if (n_ == 0) throw NumericalError("preconditioner: no free nodes");
    const Grid& g = energy.grid();
    std::vector<std::uint8_t> ex(free_.size(), 0), ey(free_.size(), 0);
    const int up = g.dimension() == 2 ? g.offset(0, 1) : 0;
    for (int k : energy.cells()) {
      ex[static_cast<std::size_t>(k)] = 1;
      if (up) {
        ex[static_cast<std::size_t>(k + up)] = 1;
        ey[static_cast<std::size_t>(k)] = 1;
        ey[static_cast<std::size_t>(k + 1)] = 1;
      }
    }
    for (int k = 0; k < g.size(); ++k) {
      if (ex[static_cast<std::size_t>(k)]) edges_.push_back({k, k + 1, false});
      if (ey[static_cast<std::size_t>(k)]) edges_.push_back({k, k + up, true});
    }
  }

  int free_count() const { return n_; }
  bool is_free(int k) const { return free_[static_cast<std::size_t>(k)] != 0; }

  void update(std::span<const double> wx, std::span<const double> wy, std::span<const double> diag_shift,
              double relative_floor = 1e-14) {
    double wmax = 0.0;
    for (const auto& e : edges_) wmax = std::max(wmax, e.vertical ? wy[e.a] : wx[e.a]);
    if (!(wmax > 0.0) || !std::isfinite(wmax)) throw NumericalError("preconditioner: degenerate edge weights");
    const double floor = relative_floor * wmax;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(4 * edges_.size() + static_cast<std::size_t>(n_));
    for (const auto& e : edges_) {
      const double w = std::max(e.vertical ? wy[e.a] : wx[e.a], floor);
      const int ia = index_[static_cast<std::size_t>(e.a)], ib = index_[static_cast<std::size_t>(e.b)];
      if (ia >= 0) trip.emplace_back(ia, ia, w);
      if (ib >= 0) trip.emplace_back(ib, ib, w);
      if (ia >= 0 && ib >= 0) {
        trip.emplace_back(ia, ib, -w);
        trip.emplace_back(ib, ia, -w);
      }
    }
    for (std::size_t k = 0; k < index_.size(); ++k)
      if (index_[k] >= 0 && !diag_shift.empty() && diag_shift[k] > 0.0)
        trip.emplace_back(index_[k], index_[k], diag_shift[k]);
    Eigen::SparseMatrix<double> a(n_, n_);
    a.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(a);
      analyzed_ = true;
    }
    ldlt_.factorize(a);
    if (ldlt_.info() != Eigen::Success) throw NumericalError("preconditioner: factorization failed");
  }

  /// out = P^{-1} rhs on free nodes, zero elsewhere.
  void solve(std::span<const double> rhs, std::span<double> out) const {
    Eigen::VectorXd b(n_);
    for (std::size_t k = 0; k < index_.size(); ++k)
      if (index_[k] >= 0) b[index_[k]] = rhs[k];
    const Eigen::VectorXd x = ldlt_.solve(b);
    for (std::size_t k = 0; k < index_.size(); ++k) out[k] = index_[k] >= 0 ? x[index_[k]] : 0.0;
  }

 private:
  struct Edge {
    int a;
    int b;
    bool vertical;
  };

  std::vector<std::uint8_t> free_;
  std::vector<int> index_;
  int n_ = 0;
  std::vector<Edge> edges_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

}  // namespace plap::detail
