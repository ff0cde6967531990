#pragma once

// Radial problems for the normalized p-Laplacian on the ball B_R in R^n:
// torsion closed form, eigenvalue shooting for
//   (p-1) v'' + (n-1)/r v' + p lambda v = 0,  v'(0) = 0,  v(R) = 0,
// the p -> 1 Gaussian limit, and the plateau family of the divergence form.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "plap/errors.hpp"

namespace plap {

struct RadialProfile {
  double R = 0.0;
  int n = 2;
  std::vector<double> r, v, dv, residual;
};

namespace detail {

inline void check_radial(double p, int n, double R, double p_min) {
  if (!(p >= p_min) || !std::isfinite(p)) throw ConfigError("p: out of range");
  if (n < 1) throw ConfigError("n: dimension must be positive");
  if (!(R > 0.0) || !std::isfinite(R)) throw ConfigError("R: must be positive");
}

inline std::vector<double> radii(double R, int samples) {
  if (samples < 2) throw ConfigError("samples: need at least 2");
  std::vector<double> r(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) r[static_cast<std::size_t>(i)] = R * i / (samples - 1);
  return r;
}

}  // namespace detail

inline double torsion_constant(double p, int n) { return p / (2.0 * (n - 2 + p)); }

/// v(r) = c(p,n)(R^2 - r^2) with residual of -(p-1)v'' - (n-1)/r v' - p; the
/// (n-1)/r v' term takes its limit -2c(n-1) at r = 0.
inline RadialProfile normalized_torsion_radial(double p, int n, double R, int samples = 101) {
  detail::check_radial(p, n, R, 1.0);
  if (n < 2) throw ConfigError("n: dimension must be at least 2");
  const double c = torsion_constant(p, n);
  RadialProfile out;
  out.R = R;
  out.n = n;
  out.r = detail::radii(R, samples);
  for (double r : out.r) {
    const double v = c * (R * R - r * r), dv = -2.0 * c * r, ddv = -2.0 * c;
    const double drift = r > 0.0 ? (n - 1) / r * dv : -2.0 * c * (n - 1);
    out.v.push_back(v);
    out.dv.push_back(dv);
    out.residual.push_back(-(p - 1.0) * ddv - drift - p);
  }
  return out;
}

namespace detail {

// Power series v = sum a_k r^{2k}, a_0 = 1, of the regular solution:
//   a_k = -p lambda a_{k-1} / (2k ((p-1)(2k-1) + n - 1)).
inline void eigen_series(double p, int n, double lambda, double r, double& v, double& dv) {
  double a = 1.0;
  v = 1.0;
  dv = 0.0;
  const double r2 = r * r;
  double pw = 1.0;  // r^{2k}
  for (int k = 1; k < 2000; ++k) {
    a *= -p * lambda / (2.0 * k * ((p - 1.0) * (2 * k - 1) + (n - 1)));
    const double tdv = a * 2.0 * k * pw * r;  // d/dr a r^{2k}, with pw = r^{2k-2}
    pw *= r2;
    const double tv = a * pw;
    v += tv;
    dv += tdv;
    if (std::abs(tv) < 1e-18 * std::abs(v) && std::abs(tdv) <= 1e-18 * std::abs(dv) + 1e-300 && k > 4) break;
  }
}

struct ShotState {
  double v_end = 0.0;
  int sign_changes = 0;
  std::vector<double> r, v, dv;
};

// Regular solution from r0 (series start) to R by classical RK4.
inline ShotState shoot(double p, int n, double R, double lambda, int steps, bool keep) {
  const double stiff = (n - 1) / (p - 1.0);
  const double h0 = R / steps;
  const double r0 = std::min(std::max(1e-6 * R, 8.0 * stiff * h0), 0.25 * R);
  double v, dv;
  eigen_series(p, n, lambda, r0, v, dv);
  const double h = (R - r0) / steps;
  auto f = [&](double r, double y0, double y1, double& d0, double& d1) {
    d0 = y1;
    d1 = -((n - 1) / r * y1 + p * lambda * y0) / (p - 1.0);
  };
  ShotState s;
  if (keep) {
    s.r.push_back(0.0);
    s.v.push_back(1.0);
    s.dv.push_back(0.0);
    s.r.push_back(r0);
    s.v.push_back(v);
    s.dv.push_back(dv);
  }
  double r = r0;
  int last_sign = v > 0 ? 1 : -1;
  for (int i = 0; i < steps; ++i) {
    double k0, l0, k1, l1, k2, l2, k3, l3;
    f(r, v, dv, k0, l0);
    f(r + 0.5 * h, v + 0.5 * h * k0, dv + 0.5 * h * l0, k1, l1);
    f(r + 0.5 * h, v + 0.5 * h * k1, dv + 0.5 * h * l1, k2, l2);
    f(r + h, v + h * k2, dv + h * l2, k3, l3);
    v += h / 6.0 * (k0 + 2 * k1 + 2 * k2 + k3);
    dv += h / 6.0 * (l0 + 2 * l1 + 2 * l2 + l3);
    r = i + 1 == steps ? R : r0 + (i + 1) * h;
    if (i + 1 < steps && v != 0.0) {
      const int sg = v > 0 ? 1 : -1;
      if (sg != last_sign) ++s.sign_changes;
      last_sign = sg;
    }
    if (keep) {
      s.r.push_back(r);
      s.v.push_back(v);
      s.dv.push_back(dv);
    }
  }
  s.v_end = v;
  return s;
}

}  // namespace detail

struct ShootingResult {
  double lambda = 0.0;
  int k = 1;
  RadialProfile profile;     // v(0) = 1
  double mismatch = 0.0;     // |v(R)|
  int sign_changes = 0;      // interior sign changes of the profile
};

/// k-th eigenvalue of the radial problem by scanning lambda on a geometric
/// grid until v(R; lambda) has changed sign k times, then bisecting.
inline ShootingResult radial_eigen_shoot(double p, int n, double R, int k, int steps = 20000) {
  detail::check_radial(p, n, R, std::nextafter(1.0, 2.0));
  if (n < 2) throw ConfigError("n: dimension must be at least 2");
  if (k < 1) throw ConfigError("k: index must be at least 1");
  if (steps < 100) throw ConfigError("steps: need at least 100");
  const double lambda_min = 1e-3 / (R * R), lambda_max = 1e9 / (R * R);
  double lo = lambda_min, hi = 0.0;
  double f_lo = detail::shoot(p, n, R, lo, steps, false).v_end;
  int flips = 0;
  if (!(f_lo > 0.0)) throw NumericalError("radial_eigen_shoot: v(R) not positive at the smallest lambda scanned");
  for (double lam = lambda_min * 1.02; lam <= lambda_max; lam *= 1.02) {
    const double f = detail::shoot(p, n, R, lam, steps, false).v_end;
    if ((f > 0.0) != (f_lo > 0.0)) {
      ++flips;
      if (flips == k) {
        hi = lam;
        break;
      }
    }
    lo = lam;
    f_lo = f;
  }
  if (hi == 0.0)
    throw NumericalError("radial_eigen_shoot: no bracket in [" + std::to_string(lambda_min) + ", " +
                         std::to_string(lambda_max) + "]");
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    const double f = detail::shoot(p, n, R, mid, steps, false).v_end;
    if ((f > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f;
    } else {
      hi = mid;
    }
  }
  ShootingResult res;
  res.k = k;
  res.lambda = 0.5 * (lo + hi);
  auto s = detail::shoot(p, n, R, res.lambda, steps, true);
  res.mismatch = std::abs(s.v_end);
  res.sign_changes = s.sign_changes;
  res.profile.R = R;
  res.profile.n = n;
  res.profile.r = std::move(s.r);
  res.profile.v = std::move(s.v);
  res.profile.dv = std::move(s.dv);
  return res;
}

/// Residual of (n-1)/r v' + lambda v for the Gaussian v = exp(-lambda r^2/(2(n-1))).
inline double gaussian_residual(double lambda, int n, double r) {
  const double v = std::exp(-lambda * r * r / (2.0 * (n - 1)));
  const double dv = -lambda * r / (n - 1) * v;
  return (n - 1) / r * dv + lambda * v;
}

struct GaussianComparison {
  double p = 0.0;
  double lambda = 0.0;
  double sup_distance = 0.0;    // on [0, 0.9 R], profile vs Gaussian with v(0) = 1
  double layer_start = 0.0;     // smallest r where the deviation exceeds 10% of the Gaussian
  double layer_width = 0.0;     // R - layer_start
  double boundary_ratio = 0.0;  // Gaussian v(R)/v(0) = exp(-lambda R^2 / (2(n-1)))
  double deviation_argmax = 0.0;
};

/// First eigenprofiles for each p compared with the Gaussian having that p's lambda.
inline std::vector<GaussianComparison> gaussian_limit_p1(int n, double R, const std::vector<double>& ps,
                                                         int steps = 20000) {
  if (n < 2) throw ConfigError("n: dimension must be at least 2");
  for (std::size_t i = 1; i < ps.size(); ++i)
    if (!(ps[i] < ps[i - 1])) throw ConfigError("pList: must be decreasing toward 1");
  std::vector<GaussianComparison> out;
  for (double p : ps) {
    const auto s = radial_eigen_shoot(p, n, R, 1, steps);
    GaussianComparison c;
    c.p = p;
    c.lambda = s.lambda;
    c.boundary_ratio = std::exp(-s.lambda * R * R / (2.0 * (n - 1)));
    c.layer_start = R;
    double best = -1.0;
    for (std::size_t i = 0; i < s.profile.r.size(); ++i) {
      const double r = s.profile.r[i];
      const double g = std::exp(-s.lambda * r * r / (2.0 * (n - 1)));
      const double dev = std::abs(s.profile.v[i] - g);
      if (r <= 0.9 * R) c.sup_distance = std::max(c.sup_distance, dev);
      if (dev > best) {
        best = dev;
        c.deviation_argmax = r;
      }
      if (dev > 0.1 * g && r < c.layer_start) c.layer_start = r;
    }
    c.layer_width = R - c.layer_start;
    out.push_back(c);
  }
  return out;
}

struct PlateauReport {
  RadialProfile profile;
  double residual_a = 0.0;      // sup over (rho, R) of the divergence-form residual
  double residual_plateau = 0.0;  // on [0, rho]: identically 0 (|v'|^{p-2} = 0 for p > 2)
  double gap_to_b = 0.0;        // sup |v - c(R^2 - r^2)|
};

/// v = c{(R-rho)^2 on [0,rho]; (R-rho)^2 - (r-rho)^2 on [rho,R]} with c = c(p,n),
/// checked against -(p-1)|v'|^{p-2}v'' - (n-1)/r |v'|^{p-2}v' - p|v'|^{p-2}.
/// For n = 1 the residual vanishes identically; for n >= 2 it equals
/// -2c(n-1)(rho/r)|v'|^{p-2} on (rho, R).
inline PlateauReport plateau_family(double p, int n, double R, double rho, int samples = 201) {
  detail::check_radial(p, n, R, 2.0);
  if (!(p > 2.0)) throw ConfigError("p: must exceed 2");
  if (!(rho > 0.0 && rho < R)) throw ConfigError("rho: must lie in (0, R)");
  const double c = p / (2.0 * (n - 2 + p));
  PlateauReport out;
  out.profile.R = R;
  out.profile.n = n;
  out.profile.r = detail::radii(R, samples);
  for (double r : out.profile.r) {
    double v, dv, ddv;
    if (r <= rho) {
      v = c * (R - rho) * (R - rho);
      dv = 0.0;
      ddv = 0.0;
    } else {
      v = c * ((R - rho) * (R - rho) - (r - rho) * (r - rho));
      dv = -2.0 * c * (r - rho);
      ddv = -2.0 * c;
    }
    double res = 0.0;
    if (r > rho) {
      const double w = std::pow(std::abs(dv), p - 2.0);
      res = -(p - 1.0) * w * ddv - (n - 1) / r * w * dv - p * w;
      out.residual_a = std::max(out.residual_a, std::abs(res));
    }
    out.profile.v.push_back(v);
    out.profile.dv.push_back(dv);
    out.profile.residual.push_back(res);
    out.gap_to_b = std::max(out.gap_to_b, std::abs(v - c * (R * R - r * r)));
  }
  return out;
}

}  // namespace plap
