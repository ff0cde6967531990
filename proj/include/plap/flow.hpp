#pragma once

// Explicit time stepping of u_t = Delta_p^N u and decay-rate extraction.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "plap/eigen.hpp"
#include "plap/errors.hpp"
#include "plap/fields.hpp"

namespace plap {

/// Largest admissible step 0.2 h^2 min(p/(p-1), p).
inline double max_flow_dt(double h, double p) {
  return 0.2 * h * h * std::min(p / (p - 1.0), p);
}

namespace detail {

inline void check_flow_args(const Grid& g, double p, double dt, double delta) {
  if (!(p > 1.0)) throw ConfigError("p: must exceed 1");
  if (!(dt > 0.0)) throw ConfigError("dt: must be positive");
  if (dt > max_flow_dt(g.spacing(), p) * (1.0 + 1e-12))
    throw ConfigError("dt: violates the stability bound 0.2 h^2 min(p/(p-1), p) = " +
                      std::to_string(max_flow_dt(g.spacing(), p)));
  if (!(delta >= 0.0)) throw ConfigError("delta: must be nonnegative");
}

// Lattice edges of an axis-aligned box grid must lie on the box boundary for
// the reflected ghost values to realize du/dn = 0.
inline void check_neumann_box(const Grid& g) {
  const Domain& d = g.domain();
  if (!(d.kind() == DomainKind::rectangle || d.kind() == DomainKind::interval))
    throw ConfigError("bc: neumann flow requires a rectangle or interval domain");
  const Box b = d.bounding_box();
  const double h = g.spacing();
  const Point last = g.node(g.size() - 1);
  if (std::abs(last.x - b.hi.x) > 1e-9 * h || (g.dimension() == 2 && std::abs(last.y - b.hi.y) > 1e-9 * h))
    throw ConfigError("grid: box sides must be multiples of the spacing for neumann flow");
}

inline double normalized_operator(const NodeDerivatives& d, double p, double delta) {
  const double s = d.ux * d.ux + d.uy * d.uy + delta * delta;
  const double lap = d.laplacian();
  const double unn = s > 0.0 ? d.infinity_laplacian() / s : 0.0;
  return (p - 1.0) / p * unn + (lap - unn) / p;
}

}  // namespace detail

/// u + dt Delta_p^N u; Dirichlet pins non-interior nodes at 0, Neumann uses
/// reflected ghost values across the box faces.
inline ScalarField step_flow(const ScalarField& u, double p, double dt, double delta, Boundary bc) {
  const Grid& g = u.grid();
  detail::check_flow_args(g, p, dt, delta);
  ScalarField out(u.grid_ptr());
  if (bc == Boundary::dirichlet) {
    for (int k = 0; k < g.size(); ++k)
      if (g.interior(k)) out[k] = u[k] + dt * detail::normalized_operator(derivatives_at(u, k), p, delta);
    return out;
  }
  detail::check_neumann_box(g);
  const int nx = g.nx(), ny = g.ny();
  auto reflect = [](int i, int n) { return i < 0 ? -i : (i >= n ? 2 * (n - 1) - i : i); };
  auto at = [&](int i, int j) { return u[g.index(reflect(i, nx), ny == 1 ? 0 : reflect(j, ny))]; };
  const double h = g.spacing();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      NodeDerivatives d;
      const double c = at(i, j), e = at(i + 1, j), w = at(i - 1, j);
      d.ux = (e - w) / (2.0 * h);
      d.uxx = (e - 2.0 * c + w) / (h * h);
      if (ny > 1) {
        const double n = at(i, j + 1), s = at(i, j - 1);
        d.uy = (n - s) / (2.0 * h);
        d.uyy = (n - 2.0 * c + s) / (h * h);
        d.uxy = (at(i + 1, j + 1) - at(i + 1, j - 1) - at(i - 1, j + 1) + at(i - 1, j - 1)) / (4.0 * h * h);
      }
      out[g.index(i, j)] = c + dt * detail::normalized_operator(d, p, delta);
    }
  return out;
}

struct FlowConfig {
  double p = 2.0;
  double dt = 0.0;            // 0: the largest admissible step
  double delta = -1.0;        // negative: 1e-6 * sup|u0|
  Boundary bc = Boundary::dirichlet;
  double t_end = 1.0;
  int snapshots = 200;
};

struct FlowRun {
  double p = 0.0;
  double dt = 0.0;
  double delta = 0.0;
  Boundary bc = Boundary::dirichlet;
  std::vector<double> times;
  std::vector<double> sup_norms;
  ScalarField final_state;
};

inline FlowRun run_flow(const ScalarField& u0, const FlowConfig& cfg) {
  const Grid& g = u0.grid();
  if (!(cfg.t_end > 0.0)) throw ConfigError("tEnd: must be positive");
  if (cfg.snapshots < 1) throw ConfigError("snapshots: must be positive");
  FlowRun run;
  run.p = cfg.p;
  run.bc = cfg.bc;
  run.dt = cfg.dt > 0.0 ? cfg.dt : max_flow_dt(g.spacing(), cfg.p);
  run.delta = cfg.delta >= 0.0 ? cfg.delta : 1e-6 * u0.sup_norm();
  detail::check_flow_args(g, cfg.p, run.dt, run.delta);
  int steps = static_cast<int>(std::ceil(cfg.t_end / run.dt - 1e-9));
  steps = std::max(steps, cfg.snapshots);
  run.dt = cfg.t_end / steps;
  const int every = std::max(1, steps / cfg.snapshots);
  ScalarField u = u0;
  if (cfg.bc == Boundary::dirichlet)
    for (int k = 0; k < g.size(); ++k)
      if (!g.interior(k)) u[k] = 0.0;
  run.times.push_back(0.0);
  run.sup_norms.push_back(u.sup_norm());
  for (int s = 1; s <= steps; ++s) {
    u = step_flow(u, cfg.p, run.dt, run.delta, cfg.bc);
    if (s % every == 0 || s == steps) {
      if (run.times.back() == s * run.dt) continue;
      run.times.push_back(s * run.dt);
      run.sup_norms.push_back(u.sup_norm());
    }
  }
  run.final_state = std::move(u);
  return run;
}

struct DecayFit {
  double rate = 0.0;       // -d/dt log sup|u|
  double r_squared = 0.0;
  double fit_residual = 0.0;  // rms residual of the log-linear fit
  int samples = 0;
};

/// Least-squares slope of log sup|u(t)| after discarding the first 20% of snapshots.
inline DecayFit decay_rate(const FlowRun& run) {
  const std::size_t n = run.times.size();
  const std::size_t first = n / 5;
  if (n < first + 10) throw NumericalError("decay_rate: need at least 10 snapshots after the transient window");
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int m = 0;
  std::vector<double> ts, ys;
  for (std::size_t i = first; i < n; ++i) {
    if (!(run.sup_norms[i] > 0.0)) throw NumericalError("decay_rate: trace reached zero");
    const double t = run.times[i], y = std::log(run.sup_norms[i]);
    ts.push_back(t);
    ys.push_back(y);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++m;
  }
  const double slope = (m * sty - st * sy) / (m * stt - st * st);
  const double icpt = (sy - slope * st) / m;
  double ss_res = 0.0, ss_tot = 0.0;
  const double ybar = sy / m;
  for (int i = 0; i < m; ++i) {
    const double r = ys[static_cast<std::size_t>(i)] - (icpt + slope * ts[static_cast<std::size_t>(i)]);
    ss_res += r * r;
    ss_tot += (ys[static_cast<std::size_t>(i)] - ybar) * (ys[static_cast<std::size_t>(i)] - ybar);
  }
  DecayFit fit;
  fit.rate = -slope;
  fit.samples = m;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  fit.fit_residual = std::sqrt(ss_res / m);
  if (!(fit.rate > 0.0)) throw NumericalError("decay_rate: trace is not decaying");
  return fit;
}

}  // namespace plap
