#pragma once

// Variational solvers for -Delta_p u = f with Dirichlet data: p-harmonic
// extension, torsion, and the comparison of u_p with the distance function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "plap/detail/p_energy.hpp"
#include "plap/errors.hpp"
#include "plap/fields.hpp"
#include "plap/geometry.hpp"
#include "plap/viscosity.hpp"

namespace plap {

struct SolverConfig {
  double p = 2.0;
  int max_iterations = 4000;       // per ladder stage
  double tolerance = 1e-13;        // relative energy decrease
  double residual_tolerance = 1e-7;
  double shrink = 0.5;             // backtracking factor
  double armijo = 1e-4;            // sufficient-decrease constant
  double delta = 1e-6;
  int polish_iterations = 100;     // final iterations with delta = 0
  std::vector<double> ladder;      // empty: doubling from 2 up to p

  void validate() const {
    if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p: must satisfy 1 < p < inf");
    if (max_iterations < 1) throw ConfigError("maxIterations: must be positive");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance: must be positive");
    if (!(residual_tolerance > 0.0)) throw ConfigError("residualTolerance: must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("shrink: must lie in (0,1)");
    if (!(armijo > 0.0 && armijo < 0.5)) throw ConfigError("armijo: must lie in (0,1/2)");
    if (!(delta >= 0.0)) throw ConfigError("delta: must be nonnegative");
    if (polish_iterations < 0) throw ConfigError("polishIterations: must be nonnegative");
    if (!ladder.empty()) {
      for (std::size_t i = 0; i < ladder.size(); ++i) {
        if (!(ladder[i] > 1.0)) throw ConfigError("ladder: entries must exceed 1");
        if (i > 0 && !(ladder[i] > ladder[i - 1])) throw ConfigError("ladder: must be strictly increasing");
      }
      if (ladder.back() != p) throw ConfigError("ladder: must end at p");
    }
  }

  std::vector<double> resolved_ladder() const {
    if (!ladder.empty()) return ladder;
    std::vector<double> l;
    for (double q = 2.0; q < p; q *= 2.0) l.push_back(q);
    l.push_back(p);
    return l;
  }
};

struct StageSummary {
  double p = 0.0;
  int iterations = 0;
  double energy = 0.0;
  double residual = 0.0;
};

struct SolveResult {
  ScalarField u;
  double p = 0.0;
  int iterations = 0;            // total over all stages
  double final_energy = 0.0;     // J(u) = E/p - <f, u> at delta = 0
  double optimality_residual = 0.0;
  std::vector<double> energy_history;  // J per accepted step, final p stage
  std::vector<StageSummary> stages;
};

namespace detail {

struct MinimizeOutcome {
  int iterations = 0;
  double energy = 0.0;
  double residual = 0.0;
  bool converged = false;
};

// Preconditioned descent on J(v) = E_delta(v)/p - <load, v> over free nodes.
//
// The search direction solves L_W d = -grad J with the edge weights of the
// current iterate (for the torsion problem the unit step is the Kacanov
// fixed-point update). The residual is the relative preconditioned decrement
// sqrt(<grad J, P^{-1} grad J> / |J-scale|).
class ConvexMinimizer {
 public:
  ConvexMinimizer(const PEnergy& energy, std::vector<std::uint8_t> free, std::vector<double> load)
      : energy_(energy), solver_(energy, free), free_(std::move(free)), load_(std::move(load)) {
    const auto n = static_cast<std::size_t>(energy.grid().size());
    grad_.resize(n);
    wx_.resize(n);
    wy_.resize(n);
    dir_.resize(n);
    trial_.resize(n);
  }

  MinimizeOutcome run(std::vector<double>& v, double p, double delta, int max_iterations, const SolverConfig& cfg,
                      std::vector<double>* history, bool require_convergence) {
    MinimizeOutcome out;
    double alpha = 1.0;
    int stagnant = 0;
    for (int it = 0; it < max_iterations; ++it) {
      const double e = energy_.evaluate(v, p, delta, grad_, wx_, wy_);
      const double j = e / p - dot(load_, v);
      double gmax = 0.0;
      for (std::size_t k = 0; k < grad_.size(); ++k) {
        grad_[k] = free_[k] ? grad_[k] / p - load_[k] : 0.0;
        gmax = std::max(gmax, std::abs(grad_[k]));
      }
      out.energy = j;
      out.iterations = it;
      if (gmax == 0.0) {
        out.residual = 0.0;
        out.converged = true;
        return out;
      }
      solver_.update(wx_, wy_, {});
      solver_.solve(grad_, dir_);
      const double decrement = dot(grad_, dir_);
      const double scale = std::abs(e / p) + std::abs(dot(load_, v)) + std::numeric_limits<double>::min();
      out.residual = std::sqrt(std::max(decrement, 0.0) / scale);
      if (out.residual <= cfg.residual_tolerance || decrement <= 0.0) {
        out.converged = true;
        return out;
      }
      for (auto& d : dir_) d = -d;
      const double slope = -decrement;
      // Backtracking from the previous step, expanding while it keeps paying.
      alpha = std::min(1.0, 2.0 * alpha);
      double j_new = trial(v, p, delta, alpha);
      while (j_new > j + cfg.armijo * alpha * slope) {
        alpha *= cfg.shrink;
        if (alpha < 1e-20) break;
        j_new = trial(v, p, delta, alpha);
      }
      if (alpha < 1e-20 || !(j_new < j)) {
        // No decrease representable at working precision.
        out.converged = out.residual <= std::sqrt(cfg.residual_tolerance);
        break;
      }
      double step = alpha;
      for (int grow = 0; grow < 6 && alpha == 1.0; ++grow) {
        const double j2 = trial(v, p, delta, 2.0 * step);
        if (!(j2 < j_new)) break;
        j_new = j2;
        step *= 2.0;
      }
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += step * dir_[k];
      if (history) history->push_back(j_new);
      out.energy = j_new;
      out.iterations = it + 1;
      const double rel = (j - j_new) / std::max(std::abs(j_new), std::numeric_limits<double>::min());
      stagnant = rel < cfg.tolerance ? stagnant + 1 : 0;
      if (stagnant >= 20) {
        out.converged = out.residual <= std::sqrt(cfg.residual_tolerance);
        break;
      }
    }
    if (require_convergence && !out.converged)
      throw NumericalError("descent did not converge at p = " + std::to_string(p), out.residual, out.iterations);
    return out;
  }

 private:
  double trial(const std::vector<double>& v, double p, double delta, double alpha) {
    for (std::size_t k = 0; k < v.size(); ++k) trial_[k] = v[k] + alpha * dir_[k];
    return energy_.evaluate(trial_, p, delta) / p - dot(load_, trial_);
  }

  const PEnergy& energy_;
  WeightedLaplacianSolver solver_;
  std::vector<std::uint8_t> free_;
  std::vector<double> load_;
  std::vector<double> grad_, wx_, wy_, dir_, trial_;
};

// Solves over the ladder with warm starts; the interior nodes are free, all
// other active nodes keep their initial values.
inline SolveResult solve_dirichlet_problem(const GridPtr& grid, std::vector<double> v, bool torsion,
                                           const SolverConfig& cfg) {
  cfg.validate();
  const Grid& g = *grid;
  PEnergy energy(grid);
  std::vector<std::uint8_t> free(static_cast<std::size_t>(g.size()), 0);
  std::vector<double> load(static_cast<std::size_t>(g.size()), 0.0);
  for (int k = 0; k < g.size(); ++k)
    if (g.interior(k)) {
      free[static_cast<std::size_t>(k)] = 1;
      if (torsion) load[static_cast<std::size_t>(k)] = energy.mass()[static_cast<std::size_t>(k)];
    }
  ConvexMinimizer minimizer(energy, free, load);
  SolveResult res;
  const auto ladder = cfg.resolved_ladder();
  for (std::size_t s = 0; s < ladder.size(); ++s) {
    const double p = ladder[s];
    const bool last = s + 1 == ladder.size();
    std::vector<double>* hist = last ? &res.energy_history : nullptr;
    // Intermediate stages only need a warm start.
    SolverConfig stage_cfg = cfg;
    if (!last) stage_cfg.residual_tolerance = std::max(cfg.residual_tolerance, 1e-4);
    auto o = minimizer.run(v, p, cfg.delta, cfg.max_iterations, stage_cfg, hist, last && cfg.polish_iterations == 0);
    res.iterations += o.iterations;
    if (last && cfg.polish_iterations > 0 && cfg.delta > 0.0) {
      auto po = minimizer.run(v, p, 0.0, cfg.polish_iterations, cfg, hist, false);
      res.iterations += po.iterations;
      if (!po.converged && !o.converged)
        throw NumericalError("descent did not converge at p = " + std::to_string(p), po.residual, res.iterations);
      o.residual = po.converged || po.residual < o.residual ? po.residual : o.residual;
      o.energy = po.energy;
      o.iterations += po.iterations;
    } else if (last && !o.converged && cfg.polish_iterations > 0) {
      throw NumericalError("descent did not converge at p = " + std::to_string(p), o.residual, res.iterations);
    }
    res.stages.push_back({p, o.iterations, o.energy, o.residual});
    if (last) {
      res.p = p;
      res.optimality_residual = o.residual;
    }
  }
  res.final_energy = energy.evaluate(v, res.p, 0.0) / res.p - dot(load, v);
  res.u = ScalarField(grid, std::move(v));
  return res;
}

}  // namespace detail

/// Minimizer of sum (1/p)(|grad v|^2 + delta^2)^{p/2} with v = g on non-interior
/// nodes. Takes the boundary values from g.
inline SolveResult solve_p_harmonic(const ScalarField& g, const SolverConfig& cfg) {
  const Grid& grid = g.grid();
  std::vector<double> v(static_cast<std::size_t>(grid.size()), 0.0);
  for (int k = 0; k < grid.size(); ++k)
    if (grid.active(k) && !grid.interior(k)) v[static_cast<std::size_t>(k)] = g[k];
  return detail::solve_dirichlet_problem(g.grid_ptr(), std::move(v), false, cfg);
}

/// -Delta_p u = 1 in the interior, u = 0 on boundary nodes.
inline SolveResult solve_p_torsion(const GridPtr& grid, const SolverConfig& cfg) {
  SolveResult r = detail::solve_dirichlet_problem(
      grid, std::vector<double>(static_cast<std::size_t>(grid->size()), 0.0), true, cfg);
  for (int k = 0; k < grid->size(); ++k)
    if (grid->interior(k) && !(r.u[k] > 0.0))
      throw NumericalError("torsion solution is not positive in the interior", r.optimality_residual, r.iterations);
  return r;
}

struct TorsionGap {
  double sup_gap = 0.0;
  SolveResult solve;
  ScalarField distance;
  ScalarField gap;                // |u_p - d| per node
  LimitResidualReport residual;   // min{|grad u| - 1, -Delta_inf u} on u_p
};

/// sup over active nodes of |u_p - dist(x, boundary)|.
inline TorsionGap torsion_infinity_gap(const GridPtr& grid, double p, SolverConfig cfg = {}) {
  cfg.p = p;
  TorsionGap out;
  out.solve = solve_p_torsion(grid, cfg);
  const Domain& d = grid->domain();
  out.distance = ScalarField::sample(grid, [&d](Point x) { return std::max(distance_to_boundary(d, x), 0.0); });
  out.gap = ScalarField(grid);
  for (int k = 0; k < grid->size(); ++k) {
    if (!grid->active(k)) continue;
    out.gap[k] = std::abs(out.solve.u[k] - out.distance[k]);
    out.sup_gap = std::max(out.sup_gap, out.gap[k]);
  }
  out.residual = residual_limit_torsion(out.solve.u);
  return out;
}

struct RadialSample {
  double r = 0.0;
  double u = 0.0;
  double residual = 0.0;  // u_r^2 u_rr + 1
};

/// u(r) = c (R^{4/3} - r^{4/3}), c = 3^{4/3}/4, the solution of -Delta_inf u = 1
/// in the ball with u = 0 on the sphere. At r = 0 the residual is its limit 0.
inline std::vector<RadialSample> infinity_torsion_ball(double R, int samples) {
  if (!(R > 0.0)) throw ConfigError("R: must be positive");
  if (samples < 2) throw ConfigError("samples: need at least 2");
  const double c = std::pow(3.0, 4.0 / 3.0) / 4.0;
  std::vector<RadialSample> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double r = R * i / (samples - 1);
    RadialSample s{r, c * (std::pow(R, 4.0 / 3.0) - std::pow(r, 4.0 / 3.0)), 0.0};
    if (r > 0.0) {
      const double ur = -(4.0 / 3.0) * c * std::cbrt(r);
      const double urr = -(4.0 / 9.0) * c / std::cbrt(r * r);
      s.residual = ur * ur * urr + 1.0;
    }
    out.push_back(s);
  }
  return out;
}

}  // namespace plap
