#pragma once

#include <cmath>
#include <cstdint>

#include "miseeker/math_util.hpp"

// Per-particle cores shared by the scalar backend, the single-item filter
// operations, and the remainder loops of the vector backends. The vector
// bodies mirror these formulas operation for operation; any change here must
// be replicated there or the backend-equivalence tests go red.

namespace miseeker::kernels::detail {

/// Symmetric 3x3 covariance, unique entries only (x, y, psi ordering).
struct Cov6 {
  double xx, xy, xp, yy, yp, pp;
};

/// Motion constants resolved once per batch: v_dt = V*dt and
/// dpsi = (g/V) tan(u) dt are identical across particles.
struct MotionStep {
  double v_dt;
  double dpsi;
  Cov6 q;  // assumed process noise
};

struct SensorConsts {
  double alpha;
  double beta;
  double ln_gamma;  // log(gamma), so gamma^(-phi^2) = exp(-phi^2 * ln_gamma)
  double r_var;
};

struct GaussianOne {
  double mx, my, mpsi;
  Cov6 c;
};

struct MomentsOne {
  double mu;   // predicted measurement mean
  double var;  // predicted measurement variance, >= r_var
  double hx, hy, hp;  // measurement Jacobian row
  bool singular;      // zero range: Jacobian undefined
};

/// sin and cos of one angle through a single libm sincos call. GCC fuses
/// neighboring sin/cos pairs into sincos on its own in some translation
/// units but not others, and glibc's sincos disagrees with separate sin and
/// cos calls by an ulp at some arguments -- which silently breaks the
/// backend bit-equality contract. Fusing by hand keeps every path on the
/// same libm entry point.
inline void sin_cos(double a, double& s, double& c) {
#if defined(__GLIBC__)
  ::sincos(a, &s, &c);
#else
  s = std::sin(a);
  c = std::cos(a);
#endif
}

/// EKF time update for one conditional Gaussian: mean through the fixed-wing
/// step, covariance through F Sigma F^T + Q with
/// F = I + dt * [[0,0,-V sin psi],[0,0,V cos psi],[0,0,0]].
inline GaussianOne propagate_one(const GaussianOne& g, const MotionStep& ms) {
  double s, c;
  sin_cos(g.mpsi, s, c);
  GaussianOne o;
  o.mx = g.mx + ms.v_dt * c;
  o.my = g.my + ms.v_dt * s;
  o.mpsi = wrap_angle(g.mpsi + ms.dpsi);

  const double a = -(ms.v_dt * s);  // dt * d(x')/d(psi)
  const double b = ms.v_dt * c;     // dt * d(y')/d(psi)
  const double axp = a * g.c.xp;
  const double bxp = b * g.c.xp;
  const double ayp = a * g.c.yp;
  const double byp = b * g.c.yp;
  const double app = a * g.c.pp;
  const double bpp = b * g.c.pp;
  o.c.xx = g.c.xx + axp + axp + a * app + ms.q.xx;
  o.c.xy = g.c.xy + ayp + bxp + a * bpp + ms.q.xy;
  o.c.xp = g.c.xp + app + ms.q.xp;
  o.c.yy = g.c.yy + byp + byp + b * bpp + ms.q.yy;
  o.c.yp = g.c.yp + bpp + ms.q.yp;
  o.c.pp = g.c.pp + ms.q.pp;
  return o;
}

/// Predicted measurement moments for one (agent Gaussian, target particle)
/// pair: mu = h(mean, theta), var = H Sigma H^T + R, H = grad_x h.
inline MomentsOne snr_moments_one(const GaussianOne& g, double tx, double ty,
                                  const SensorConsts& sc) {
  MomentsOne o;
  const double dx = tx - g.mx;
  const double dy = ty - g.my;
  const double r2 = dx * dx + dy * dy;
  if (r2 == 0.0) {
    // Measurement stays defined (h = alpha/beta with phi := 0) but the
    // bearing derivative does not; flag for the caller to poison or throw.
    o.mu = sc.alpha / sc.beta;
    o.var = sc.r_var;
    o.hx = o.hy = o.hp = 0.0;
    o.singular = true;
    return o;
  }
  const double phi = wrap_angle(std::atan2(dy, dx) - g.mpsi);
  const double att = std::exp(-(phi * phi) * sc.ln_gamma);  // gamma^(-phi^2)
  const double q = r2 + sc.beta;
  const double h = sc.alpha * att / q;
  const double bfac = -(phi * (sc.ln_gamma + sc.ln_gamma));  // d(att)/att dphi
  const double inv_r2 = 1.0 / r2;
  const double inv_q = 1.0 / q;
  o.mu = h;
  o.hx = h * (bfac * (dy * inv_r2) + (dx + dx) * inv_q);
  o.hy = h * (bfac * (-(dx * inv_r2)) + (dy + dy) * inv_q);
  o.hp = h * (-bfac);
  const double v0 = o.hx * g.c.xx + o.hy * g.c.xy + o.hp * g.c.xp;
  const double v1 = o.hx * g.c.xy + o.hy * g.c.yy + o.hp * g.c.yp;
  const double v2 = o.hx * g.c.xp + o.hy * g.c.yp + o.hp * g.c.pp;
  double qf = o.hx * v0 + o.hy * v1 + o.hp * v2;
  qf = (qf < 0.0) ? 0.0 : qf;  // PSD quadratic form; kill FP dust only
  o.var = qf + sc.r_var;
  o.singular = false;
  return o;
}

/// Scalar-measurement Kalman correction given moments computed from the same
/// prior: K = Sigma H^T / s, posterior Sigma = Sigma - s K K^T (symmetric by
/// construction, trace never increases).
inline GaussianOne correct_one(const GaussianOne& g, const MomentsOne& m,
                               double z) {
  const double u0 = g.c.xx * m.hx + g.c.xy * m.hy + g.c.xp * m.hp;
  const double u1 = g.c.xy * m.hx + g.c.yy * m.hy + g.c.yp * m.hp;
  const double u2 = g.c.xp * m.hx + g.c.yp * m.hy + g.c.pp * m.hp;
  const double inv_s = 1.0 / m.var;
  const double k0 = u0 * inv_s;
  const double k1 = u1 * inv_s;
  const double k2 = u2 * inv_s;
  const double innov = z - m.mu;
  GaussianOne o;
  o.mx = g.mx + k0 * innov;
  o.my = g.my + k1 * innov;
  o.mpsi = wrap_angle(g.mpsi + k2 * innov);
  o.c.xx = g.c.xx - m.var * (k0 * k0);
  o.c.xy = g.c.xy - m.var * (k0 * k1);
  o.c.xp = g.c.xp - m.var * (k0 * k2);
  o.c.yy = g.c.yy - m.var * (k1 * k1);
  o.c.yp = g.c.yp - m.var * (k1 * k2);
  o.c.pp = g.c.pp - m.var * (k2 * k2);
  return o;
}

/// log N(z; mu, var)
inline double log_normal_pdf(double z, double mu, double var) {
  const double d = z - mu;
  return -0.5 * (std::log(kTwoPi * var) + (d * d) / var);
}

}  // namespace miseeker::kernels::detail
