#pragma once

// First Dirichlet and first nontrivial Neumann eigenpairs of -Delta_p by
// preconditioned descent on the Rayleigh quotient, p-sweeps toward the
// geometric limits, and diagonal / nodal diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "plap/detail/p_energy.hpp"
#include "plap/errors.hpp"
#include "plap/fields.hpp"
#include "plap/geometry.hpp"

namespace plap {

enum class Boundary { dirichlet, neumann };

inline const char* to_string(Boundary b) { return b == Boundary::dirichlet ? "dirichlet" : "neumann"; }

struct EigenConfig {
  int max_iterations = 20000;     // per ladder stage
  double tolerance = 1e-10;       // relative quotient decrease per iteration
  int window = 50;                // consecutive iterations below tolerance
  double residual_tolerance = 1e-6;
  double shrink = 0.5;
  double armijo = 1e-4;
  double delta = 1e-6;
  int polish_iterations = 100;
  double shift = 0.05;            // Neumann preconditioner shift, times R
  double perturbation = 1e-3;     // Neumann symmetry-breaking amplitude
  std::uint64_t seed = 0;
  std::vector<double> ladder;     // empty: doubling from 2 up to p

  void validate() const {
    if (max_iterations < 1) throw ConfigError("maxIterations: must be positive");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance: must be positive");
    if (window < 1) throw ConfigError("window: must be positive");
    if (!(residual_tolerance > 0.0)) throw ConfigError("residualTolerance: must be positive");
    if (!(shrink > 0.0 && shrink < 1.0)) throw ConfigError("shrink: must lie in (0,1)");
    if (!(armijo > 0.0 && armijo < 0.5)) throw ConfigError("armijo: must lie in (0,1/2)");
    if (!(delta >= 0.0)) throw ConfigError("delta: must be nonnegative");
    if (polish_iterations < 0) throw ConfigError("polishIterations: must be nonnegative");
    if (!(shift > 0.0)) throw ConfigError("shift: must be positive");
    if (!(perturbation >= 0.0)) throw ConfigError("perturbation: must be nonnegative");
    for (std::size_t i = 1; i < ladder.size(); ++i)
      if (!(ladder[i] > ladder[i - 1])) throw ConfigError("ladder: must be strictly increasing");
  }

  std::vector<double> resolved_ladder(double p) const {
    if (!ladder.empty()) {
      if (ladder.back() != p) throw ConfigError("ladder: must end at p");
      return ladder;
    }
    std::vector<double> l;
    for (double q = 2.0; q < p; q *= 2.0) l.push_back(q);
    l.push_back(p);
    return l;
  }
};

struct EigenResult {
  Boundary bc = Boundary::dirichlet;
  double p = 0.0;
  double raw_eigenvalue = 0.0;    // min R_p
  double root_eigenvalue = 0.0;   // raw^{1/p}
  ScalarField eigenfunction;      // sup-norm 1, positive maximum
  std::vector<double> history;    // R_p per accepted step, final stage
  double residual = 0.0;          // relative preconditioned PDE residual
  int iterations = 0;
  bool converged = false;
};

namespace detail {

inline void check_p(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p: must satisfy 1 < p < inf");
}

// sum_k w_k |v_k - c|^{p-2} (v_k - c), strictly decreasing in c.
inline double pmean_function(std::span<const double> v, std::span<const double> w, double p, double c,
                             double* derivative = nullptr) {
  double f = 0.0, df = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (w[k] <= 0.0) continue;
    const double t = v[k] - c;
    const double a = std::abs(t);
    if (a == 0.0) continue;
    const double q = std::pow(a, p - 2.0);
    f += w[k] * q * t;
    df += w[k] * q;
  }
  if (derivative) *derivative = -(p - 1.0) * df;
  return f;
}

/// The shift c with sum w |v - c|^{p-2}(v - c) = 0. Bracketed bisection
/// accelerated by Newton steps that stay inside the bracket; terminates when
/// the bracket is below 1e-12 relative to the data range.
inline double zero_pmean_shift(std::span<const double> v, std::span<const double> w, double p) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t k = 0; k < v.size(); ++k)
    if (w[k] > 0.0) {
      lo = std::min(lo, v[k]);
      hi = std::max(hi, v[k]);
    }
  if (!(hi > lo)) throw ConfigError("project_zero_pmean: input is constant");
  const double range = hi - lo;
  if (p == 2.0) {
    double s = 0.0, ws = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k)
      if (w[k] > 0.0) {
        s += w[k] * v[k];
        ws += w[k];
      }
    return s / ws;
  }
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * range; ++it) {
    double df = 0.0;
    const double f = pmean_function(v, w, p, c, &df);
    if (f == 0.0) return c;
    if (f > 0.0) lo = c;
    else hi = c;
    double next = df < 0.0 ? c - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    // A Newton step that barely moves still shrinks the bracket on one side;
    // interleave a bisection when it fails to halve it.
    if (it % 2 == 1) next = 0.5 * (lo + hi);
    c = next;
  }
  return c;
}

inline double lp_norm(const PEnergy& e, std::span<const double> v, double p) { return std::pow(e.lp_mass(v, p), 1.0 / p); }

// Descent on R(v) = E_delta(v) / M(v) over the free nodes.
//
// The search direction is d = -(L_W + sigma D)^{-1} g, with g = L_W v - R D v
// the scaled quotient gradient, D = diag(m |v|^{p-2}), and W the energy's edge
// weights; the unit step is a shifted nonlinear inverse iteration. Neumann
// trials are re-projected to zero p-mean.
class QuotientDescent {
 public:
  QuotientDescent(const PEnergy& energy, std::vector<std::uint8_t> free, Boundary bc)
      : energy_(energy), solver_(energy, free), free_(std::move(free)), bc_(bc) {
    const auto n = static_cast<std::size_t>(energy.grid().size());
    for (auto* b : {&grad_, &wx_, &wy_, &dir_, &trial_, &diag_, &shift_}) b->assign(n, 0.0);
  }

  // Optional extra linear constraint <c, v> = 0 (deflation).
  void set_constraint(std::vector<double> c) { constraint_ = std::move(c); }

  double quotient(std::span<const double> v, double p, double delta) const {
    return energy_.evaluate(v, p, delta) / energy_.lp_mass(v, p);
  }

  void admissible(std::span<double> v, double p) const {
    if (bc_ == Boundary::neumann) {
      const double c = zero_pmean_shift(v, energy_.mass(), p);
      for (std::size_t k = 0; k < v.size(); ++k)
        if (energy_.mass()[k] > 0.0) v[k] -= c;
    }
    if (!constraint_.empty()) {
      const double cc = dot(constraint_, constraint_);
      const double s = dot(constraint_, v) / cc;
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= s * constraint_[k];
    }
  }

  struct Outcome {
    int iterations = 0;
    double quotient = 0.0;
    double residual = 0.0;
    bool converged = false;
  };

  Outcome run(std::vector<double>& v, double p, double delta, int max_iterations, const EigenConfig& cfg,
              std::vector<double>* history, bool positive) {
    Outcome out;
    double alpha = 1.0;
    int quiet = 0;
    const auto& m = energy_.mass();
    for (int it = 0; it < max_iterations; ++it) {
      normalize(v, p);
      const double e = energy_.evaluate(v, p, delta, grad_, wx_, wy_);
      const double mass = energy_.lp_mass(v, p);
      const double r = e / mass;
      // Scaled gradient of R: (grad E / p - R grad M / p) / M, with M = 1.
      double vmax = 0.0;
      for (double x : v) vmax = std::max(vmax, std::abs(x));
      const double eps = 1e-6 * vmax;
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (!free_[k]) {
          grad_[k] = 0.0;
          continue;
        }
        const double a = std::abs(v[k]);
        const double dk = m[k] * (p >= 2.0 ? std::pow(a, p - 2.0) : std::pow(a * a + eps * eps, 0.5 * (p - 2.0)));
        diag_[k] = dk;
        grad_[k] = (grad_[k] / p - r * m[k] * (a > 0.0 ? std::pow(a, p - 2.0) * v[k] : 0.0)) / mass;
        shift_[k] = bc_ == Boundary::neumann ? cfg.shift * r * dk / mass : 0.0;
      }
      solver_.update(wx_, wy_, shift_);
      solver_.solve(grad_, dir_);
      const double decrement = dot(grad_, dir_);
      out.quotient = r;
      out.residual = std::sqrt(std::max(decrement, 0.0) / (e / p / mass));
      if (out.residual <= cfg.residual_tolerance || decrement <= 0.0) {
        out.converged = true;
        return out;
      }
      for (auto& d : dir_) d = -d;
      alpha = std::min(1.0, 2.0 * alpha);
      // The trial point v + alpha d is made admissible before evaluating R;
      // sufficiency is measured against the linear model on the raw step.
      double r_new = trial(v, p, delta, alpha);
      while (!(r_new <= r - cfg.armijo * alpha * decrement * p)) {
        alpha *= cfg.shrink;
        if (alpha < 1e-20) break;
        r_new = trial(v, p, delta, alpha);
      }
      if (alpha < 1e-20 || !(r_new < r)) {
        out.converged = out.residual <= std::sqrt(cfg.residual_tolerance);
        break;
      }
      double step = alpha;
      for (int grow = 0; grow < 6 && alpha == 1.0; ++grow) {
        const double r2 = trial(v, p, delta, 2.0 * step);
        if (!(r2 < r_new)) break;
        r_new = r2;
        step *= 2.0;
      }
      for (std::size_t k = 0; k < v.size(); ++k) v[k] += step * dir_[k];
      admissible(v, p);
      if (positive)
        for (auto& x : v) x = std::abs(x);
      if (history) history->push_back(r_new);
      out.quotient = r_new;
      out.iterations = it + 1;
      quiet = (r - r_new) < cfg.tolerance * r_new ? quiet + 1 : 0;
      if (quiet >= cfg.window) {
        out.converged = out.residual <= std::sqrt(cfg.residual_tolerance);
        break;
      }
    }
    normalize(v, p);
    return out;
  }

 private:
  double trial(const std::vector<double>& v, double p, double delta, double alpha) {
    for (std::size_t k = 0; k < v.size(); ++k) trial_[k] = v[k] + alpha * dir_[k];
    try {
      admissible(trial_, p);
    } catch (const ConfigError&) {
      return std::numeric_limits<double>::infinity();
    }
    const double mass = energy_.lp_mass(trial_, p);
    if (!(mass > 0.0)) return std::numeric_limits<double>::infinity();
    return energy_.evaluate(trial_, p, delta) / mass;
  }

  void normalize(std::vector<double>& v, double p) const {
    const double n = lp_norm(energy_, v, p);
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("eigen descent: iterate collapsed to zero");
    for (auto& x : v) x /= n;
  }

  const PEnergy& energy_;
  WeightedLaplacianSolver solver_;
  std::vector<std::uint8_t> free_;
  Boundary bc_;
  std::vector<double> constraint_;
  std::vector<double> grad_, wx_, wy_, dir_, trial_, diag_, shift_;
};

inline std::vector<std::uint8_t> free_nodes(const Grid& g, Boundary bc) {
  std::vector<std::uint8_t> f(static_cast<std::size_t>(g.size()), 0);
  for (int k = 0; k < g.size(); ++k) f[static_cast<std::size_t>(k)] = bc == Boundary::dirichlet ? g.interior(k) : g.active(k);
  return f;
}

inline ScalarField sup_normalized(const GridPtr& grid, std::vector<double> v) {
  double big = 0.0;
  for (double x : v)
    if (std::abs(x) > std::abs(big)) big = x;
  if (big != 0.0)
    for (auto& x : v) x /= big;
  return ScalarField(grid, std::move(v));
}

// Initial Neumann guess: a ramp along a diameter plus a seeded perturbation.
inline std::vector<double> neumann_start(const Grid& g, const EigenConfig& cfg) {
  const Domain& d = g.domain();
  Point dir{1.0, 0.0}, c{};
  if (d.is_polygonal()) {
    const auto& vs = d.vertices();
    double best = -1.0;
    for (std::size_t i = 0; i < vs.size(); ++i)
      for (std::size_t j = i + 1; j < vs.size(); ++j)
        if (norm(vs[j] - vs[i]) > best + 1e-12) {
          best = norm(vs[j] - vs[i]);
          Point a = vs[i], b = vs[j];
          if (b.x < a.x || (b.x == a.x && b.y < a.y)) std::swap(a, b);
          dir = (1.0 / best) * (b - a);
          c = 0.5 * (a + b);
        }
  } else if (d.kind() == DomainKind::disc) {
    c = d.center();
  } else {
    c = {0.5 * (d.a() + d.b()), 0.0};
  }
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> v(static_cast<std::size_t>(g.size()), 0.0);
  const double scale = g.dimension() == 1 ? 0.5 * (d.b() - d.a()) : 0.5 * diameter(d);
  for (int k = 0; k < g.size(); ++k) {
    const double noise = uni(rng);
    if (g.active(k)) v[static_cast<std::size_t>(k)] = dot(g.node(k) - c, dir) / scale + cfg.perturbation * noise;
  }
  return v;
}

inline EigenResult solve_eigen(const GridPtr& grid, Boundary bc, double p, const EigenConfig& cfg,
                               const ScalarField* init, const std::vector<double>* constraint_source = nullptr) {
  check_p(p);
  cfg.validate();
  const Grid& g = *grid;
  PEnergy energy(grid);
  QuotientDescent descent(energy, free_nodes(g, bc), bc);
  std::vector<double> v(static_cast<std::size_t>(g.size()), 0.0);
  std::vector<double> ladder;
  if (init) {
    if (init->size() != g.size()) throw ConfigError("initial field: grid mismatch");
    const auto free = free_nodes(g, bc);
    for (int k = 0; k < g.size(); ++k)
      if (free[static_cast<std::size_t>(k)]) v[static_cast<std::size_t>(k)] = (*init)[k];
    ladder = {p};
  } else {
    if (bc == Boundary::dirichlet) {
      for (int k = 0; k < g.size(); ++k)
        if (g.interior(k)) v[static_cast<std::size_t>(k)] = std::max(distance_to_boundary(g.domain(), g.node(k)), 0.0);
    } else {
      v = neumann_start(g, cfg);
    }
    ladder = cfg.resolved_ladder(p);
  }
  EigenResult res;
  res.bc = bc;
  for (std::size_t s = 0; s < ladder.size(); ++s) {
    const double q = ladder[s];
    const bool last = s + 1 == ladder.size();
    if (constraint_source) {
      std::vector<double> c(v.size(), 0.0);
      for (std::size_t k = 0; k < v.size(); ++k) {
        const double u1 = (*constraint_source)[k];
        c[k] = energy.mass()[k] * (u1 != 0.0 ? std::pow(std::abs(u1), q - 2.0) * u1 : 0.0);
      }
      descent.set_constraint(std::move(c));
    }
    descent.admissible(v, q);
    EigenConfig stage = cfg;
    if (!last) stage.residual_tolerance = std::max(cfg.residual_tolerance, 1e-3);
    std::vector<double>* hist = last ? &res.history : nullptr;
    const bool positive = bc == Boundary::dirichlet && !constraint_source;
    auto o = descent.run(v, q, cfg.delta, cfg.max_iterations, stage, hist, positive);
    res.iterations += o.iterations;
    if (last && cfg.polish_iterations > 0 && cfg.delta > 0.0) {
      auto po = descent.run(v, q, 0.0, cfg.polish_iterations, cfg, hist, positive);
      res.iterations += po.iterations;
      o.converged = o.converged || po.converged;
      o.residual = po.residual;
    }
    if (last) {
      res.converged = o.converged;
      res.residual = o.residual;
    }
  }
  res.p = p;
  res.raw_eigenvalue = descent.quotient(v, p, 0.0);
  res.root_eigenvalue = std::pow(res.raw_eigenvalue, 1.0 / p);
  if (!res.converged)
    throw NumericalError(std::string(to_string(bc)) + " eigen descent did not converge at p = " + std::to_string(p),
                         res.residual, res.iterations);
  res.eigenfunction = sup_normalized(grid, std::move(v));
  if (bc == Boundary::neumann && !(res.eigenfunction.min() < 0.0))
    throw NumericalError("neumann eigen descent collapsed to a single-signed function", res.residual, res.iterations);
  return res;
}

}  // namespace detail

/// Discrete R_p(v) = E(v) / sum m |v|^p with lumped cell-corner quadrature.
inline double rayleigh_quotient(const ScalarField& v, double p, Boundary bc) {
  detail::check_p(p);
  detail::PEnergy energy(v.grid_ptr());
  const Grid& g = v.grid();
  const double sup = v.sup_norm();
  if (bc == Boundary::dirichlet) {
    for (int k = 0; k < g.size(); ++k)
      if (g.kind(k) == NodeKind::boundary && std::abs(v[k]) > 1e-12 * sup)
        throw ConfigError("rayleigh_quotient: Dirichlet field must vanish on boundary nodes");
  } else if (sup > 0.0) {
    std::vector<double> a(v.values().begin(), v.values().end());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double m = energy.mass()[k];
      if (m <= 0.0 || a[k] == 0.0) continue;
      const double q = std::pow(std::abs(a[k]), p - 1.0);
      num += m * (a[k] > 0 ? q : -q);
      den += m * q;
    }
    if (std::abs(num) > 1e-8 * den) throw ConfigError("rayleigh_quotient: Neumann field must have zero p-mean");
  }
  const double mass = energy.lp_mass(v.values(), p);
  if (!(mass > 0.0)) throw ConfigError("rayleigh_quotient: zero denominator");
  return energy.evaluate(v.values(), p, 0.0) / mass;
}

/// v - c with sum m |v - c|^{p-2} (v - c) = 0 over the active nodes.
inline ScalarField project_zero_pmean(const ScalarField& v, double p) {
  detail::check_p(p);
  detail::PEnergy energy(v.grid_ptr());
  const double c = detail::zero_pmean_shift(v.values(), energy.mass(), p);
  ScalarField out = v;
  for (int k = 0; k < v.size(); ++k)
    if (v.grid().active(k)) out[k] -= c;
  return out;
}

inline EigenResult dirichlet_eigen_first(const GridPtr& grid, double p, const EigenConfig& cfg = {},
                                         const ScalarField* init = nullptr) {
  return detail::solve_eigen(grid, Boundary::dirichlet, p, cfg, init);
}

inline EigenResult neumann_eigen_first(const GridPtr& grid, double p, const EigenConfig& cfg = {},
                                       const ScalarField* init = nullptr) {
  return detail::solve_eigen(grid, Boundary::neumann, p, cfg, init);
}

struct SweepEntry {
  double p = 0.0;
  double root = 0.0;
  double raw = 0.0;
  double target = 0.0;
  double relative_gap = 0.0;
  int iterations = 0;
  double residual = 0.0;
  std::string error;  // empty on success
};

struct SweepReport {
  Boundary problem = Boundary::dirichlet;
  std::vector<SweepEntry> entries;
  std::vector<EigenResult> results;  // parallel to entries; empty field on failure

  const SweepEntry* at(double p) const {
    for (const auto& e : entries)
      if (e.p == p) return &e;
    return nullptr;
  }
};

inline double limit_target(Boundary bc, const Domain& d) {
  return bc == Boundary::dirichlet ? 1.0 / inradius(d) : 2.0 / diameter(d);
}

/// Per-p eigenpairs with continuation (each p warm-started from the previous
/// success) or, when `continuation` is false, independent solves that may run
/// on up to `threads` workers. Failures are recorded and the sweep continues.
inline SweepReport p_sweep(Boundary problem, const GridPtr& grid, const std::vector<double>& ps,
                           const EigenConfig& cfg = {}, bool continuation = true, int threads = 1) {
  if (ps.empty()) throw ConfigError("pList: must be nonempty");
  for (std::size_t i = 0; i < ps.size(); ++i) {
    detail::check_p(ps[i]);
    if (i > 0 && !(ps[i] > ps[i - 1])) throw ConfigError("pList: must be strictly increasing");
  }
  const double target = limit_target(problem, grid->domain());
  SweepReport rep;
  rep.problem = problem;
  rep.entries.resize(ps.size());
  rep.results.resize(ps.size());
  auto one = [&](std::size_t i, const ScalarField* init) {
    SweepEntry e;
    e.p = ps[i];
    e.target = target;
    try {
      EigenConfig c = cfg;
      if (!init) c.ladder.clear();
      EigenResult r = detail::solve_eigen(grid, problem, ps[i], c, init);
      e.root = r.root_eigenvalue;
      e.raw = r.raw_eigenvalue;
      e.relative_gap = std::abs(e.root - target) / target;
      e.iterations = r.iterations;
      e.residual = r.residual;
      rep.results[i] = std::move(r);
    } catch (const NumericalError& err) {
      e.error = err.what();
      e.iterations = err.iterations();
      e.residual = err.last_residual();
    }
    rep.entries[i] = e;
  };
  if (continuation) {
    const ScalarField* prev = nullptr;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      one(i, prev);
      if (rep.entries[i].error.empty()) prev = &rep.results[i].eigenfunction;
    }
  } else {
    const std::size_t workers = static_cast<std::size_t>(std::max(1, threads));
    for (std::size_t start = 0; start < ps.size(); start += workers) {
      std::vector<std::future<void>> jobs;
      for (std::size_t i = start; i < std::min(ps.size(), start + workers); ++i)
        jobs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred, one, i, nullptr));
      for (auto& j : jobs) j.get();
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Diagnostics

/// Bilinear interpolation of a field at x; nodes outside the active set count
/// as missing and make the result empty.
inline std::optional<double> interpolate(const ScalarField& u, Point x) {
  const Grid& g = u.grid();
  const double h = g.spacing();
  const double fx = (x.x - g.origin().x) / h, fy = (x.y - g.origin().y) / h;
  int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
  if (g.dimension() == 1) j = 0;
  i = std::clamp(i, 0, g.nx() - 2);
  const double tx = fx - i;
  if (g.dimension() == 1) {
    const int k = g.index(i, 0);
    if (!g.active(k) || !g.active(k + 1)) return std::nullopt;
    return (1 - tx) * u[k] + tx * u[k + 1];
  }
  j = std::clamp(j, 0, g.ny() - 2);
  const double ty = fy - j;
  const int k = g.index(i, j), up = g.offset(0, 1);
  for (int c : {k, k + 1, k + up, k + up + 1})
    if (!g.active(c)) return std::nullopt;
  return (1 - tx) * (1 - ty) * u[k] + tx * (1 - ty) * u[k + 1] + (1 - tx) * ty * u[k + up] + tx * ty * u[k + up + 1];
}

struct ProfileSample {
  double t = 0.0;      // normalized arclength in [-1, 1]
  double value = 0.0;  // normalized value in [-1, 1]
};

struct DiagonalProfile {
  std::vector<ProfileSample> samples;
  double max_deviation = 0.0;  // max |value - t|
};

inline bool is_square(const Domain& d) {
  if (!d.is_polygonal() || d.vertices().size() != 4) return false;
  const Box b = d.bounding_box();
  const double s = std::max(b.width(), b.height());
  return std::abs(b.width() - b.height()) <= 1e-12 * s && std::abs(measure(d).area - s * s) <= 1e-12 * s * s;
}

/// Values along the main diagonal from the lower-left to the upper-right
/// corner, scaled by their sup-norm and oriented to increase.
inline DiagonalProfile diagonal_profile(const ScalarField& u, int samples = 0) {
  const Domain& d = u.grid().domain();
  if (!is_square(d)) throw ConfigError("diagonal_profile: domain must be an axis-aligned square");
  if (samples <= 0) samples = 2 * std::max(u.grid().nx(), u.grid().ny()) + 1;
  if (samples < 3) throw ConfigError("diagonal_profile: need at least 3 samples");
  const Box b = d.bounding_box();
  DiagonalProfile out;
  std::vector<double> vals(static_cast<std::size_t>(samples));
  double big = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double f = static_cast<double>(s) / (samples - 1);
    const auto val = interpolate(u, b.lo + f * (b.hi - b.lo));
    if (!val) throw ConfigError("diagonal_profile: diagonal leaves the grid");
    vals[static_cast<std::size_t>(s)] = *val;
    big = std::max(big, std::abs(*val));
  }
  if (!(big > 0.0)) throw ConfigError("diagonal_profile: field vanishes on the diagonal");
  const double sign = vals.back() >= vals.front() ? 1.0 : -1.0;
  for (int s = 0; s < samples; ++s) {
    const double t = -1.0 + 2.0 * s / (samples - 1);
    const double v = sign * vals[static_cast<std::size_t>(s)] / big;
    out.samples.push_back({t, v});
    out.max_deviation = std::max(out.max_deviation, std::abs(v - t));
  }
  return out;
}

struct NodalDistances {
  double d_plus = 0.0;
  double d_minus = 0.0;
  int crossings = 0;
};

/// Distances from the positive and negative nodes to the discrete nodal set
/// (zero crossings on grid edges, by linear interpolation, plus zero nodes).
inline NodalDistances nodal_distances(const ScalarField& u) {
  const Grid& g = u.grid();
  if (!(u.max() > 0.0 && u.min() < 0.0)) throw ConfigError("nodal_distances: field must attain both signs");
  std::vector<Point> zeros;
  const int up = g.dimension() == 2 ? g.offset(0, 1) : 0;
  for (int k = 0; k < g.size(); ++k) {
    if (!g.active(k)) continue;
    if (u[k] == 0.0) {
      zeros.push_back(g.node(k));
      continue;
    }
    auto edge = [&](int m) {
      if (!g.active(m) || u[m] == 0.0 || (u[k] > 0.0) == (u[m] > 0.0)) return;
      const double t = u[k] / (u[k] - u[m]);
      zeros.push_back(g.node(k) + t * (g.node(m) - g.node(k)));
    };
    if (g.i_of(k) + 1 < g.nx()) edge(k + 1);
    if (up && g.j_of(k) + 1 < g.ny()) edge(k + up);
  }
  NodalDistances out;
  out.crossings = static_cast<int>(zeros.size());
  for (int k = 0; k < g.size(); ++k) {
    if (!g.active(k) || u[k] == 0.0) continue;
    double best = std::numeric_limits<double>::infinity();
    const Point x = g.node(k);
    for (const Point& z : zeros) best = std::min(best, norm(x - z));
    if (u[k] > 0.0) out.d_plus = std::max(out.d_plus, best);
    else out.d_minus = std::max(out.d_minus, best);
  }
  return out;
}

enum class NodalOrientation { parallel, diagonal, other };

inline const char* to_string(NodalOrientation o) {
  switch (o) {
    case NodalOrientation::parallel: return "parallel";
    case NodalOrientation::diagonal: return "diagonal";
    default: return "other";
  }
}

struct SecondEigenExperiment {
  EigenResult result;
  NodalOrientation orientation = NodalOrientation::other;
  // Relative antisymmetry defects |u + u o S| / |u| for the reflections in
  // the vertical axis, horizontal axis, main and anti-diagonal.
  double defects[4] = {1.0, 1.0, 1.0, 1.0};
};

namespace detail {

inline std::optional<int> reflected_node(const Grid& g, int k, int which) {
  const Box b = g.domain().bounding_box();
  const double h = g.spacing();
  const Point x = g.node(k);
  const Point c = 0.5 * (b.lo + b.hi);
  Point y;
  switch (which) {
    case 0: y = {2 * c.x - x.x, x.y}; break;
    case 1: y = {x.x, 2 * c.y - x.y}; break;
    case 2: y = {c.x + (x.y - c.y), c.y + (x.x - c.x)}; break;
    default: y = {c.x - (x.y - c.y), c.y - (x.x - c.x)}; break;
  }
  const double fi = (y.x - g.origin().x) / h, fj = (y.y - g.origin().y) / h;
  const int i = static_cast<int>(std::lround(fi)), j = static_cast<int>(std::lround(fj));
  if (std::abs(fi - i) > 1e-6 || std::abs(fj - j) > 1e-6 || !g.in_range(i, j)) return std::nullopt;
  const int m = g.index(i, j);
  if (!g.active(m)) return std::nullopt;
  return m;
}

}  // namespace detail

/// Heuristic second Dirichlet eigenpair: minimizes R_p subject to
/// sum m |u1|^{p-2} u1 u = 0, then tags the nodal line. Exploratory.
inline SecondEigenExperiment second_dirichlet_eigen_experiment(const GridPtr& grid, double p, EigenConfig cfg = {},
                                                               const EigenResult* first = nullptr) {
  const Grid& g = *grid;
  std::optional<EigenResult> own;
  if (!first) own = dirichlet_eigen_first(grid, p, cfg);
  const EigenResult& u1 = first ? *first : *own;
  std::vector<double> src(u1.eigenfunction.values().begin(), u1.eigenfunction.values().end());
  // Start: a seeded random interior field; the constraint removes the u1 part.
  std::mt19937_64 rng(cfg.seed + 1);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  ScalarField start(grid);
  for (int k = 0; k < g.size(); ++k) {
    const double r = uni(rng);
    if (g.interior(k)) start[k] = r * std::max(distance_to_boundary(g.domain(), g.node(k)), 0.0);
  }
  cfg.ladder = {p};
  SecondEigenExperiment out;
  out.result = detail::solve_eigen(grid, Boundary::dirichlet, p, cfg, &start, &src);
  const ScalarField& u = out.result.eigenfunction;
  double total = 0.0;
  for (int k = 0; k < g.size(); ++k)
    if (g.active(k)) total += std::abs(u[k]);
  for (int w = 0; w < 4; ++w) {
    double defect = 0.0;
    bool ok = total > 0.0;
    for (int k = 0; k < g.size() && ok; ++k) {
      if (!g.active(k)) continue;
      const auto m = detail::reflected_node(g, k, w);
      if (!m) {
        ok = false;
        break;
      }
      defect += std::abs(u[k] + u[*m]);
    }
    out.defects[w] = ok ? defect / (2.0 * total) : 1.0;
  }
  constexpr double tight = 0.05, loose = 0.3;
  const bool par = std::min(out.defects[0], out.defects[1]) < tight;
  const bool dia = std::min(out.defects[2], out.defects[3]) < tight;
  const bool par_far = std::min(out.defects[0], out.defects[1]) > loose;
  const bool dia_far = std::min(out.defects[2], out.defects[3]) > loose;
  if (par && dia_far) out.orientation = NodalOrientation::parallel;
  else if (dia && par_far) out.orientation = NodalOrientation::diagonal;
  else out.orientation = NodalOrientation::other;
  return out;
}

}  // namespace plap
