#include <immintrin.h>

#include <cmath>

#include "miseeker/kernels/kernels.hpp"

// AVX2 variants of the bank kernels. Every arithmetic instruction mirrors one
// operation of the detail:: cores, in the same order, with no FMA contraction
// (this file builds with -mavx2 -ffp-contract=off and nothing more), so the
// lanes are bit-identical to the scalar backend. Transcendentals go through
// the very same libm calls, one lane at a time; they dominate the runtime
// anyway, and the win here is keeping the surrounding algebra and the loads
// and stores wide.

namespace miseeker::kernels {
namespace {

using detail::MotionStep;
using detail::SensorConsts;

constexpr std::size_t kLanes = 4;

inline __m256d neg(__m256d x) {
  return _mm256_xor_pd(x, _mm256_set1_pd(-0.0));
}

inline void sincos4(__m256d x, __m256d& s, __m256d& c) {
  alignas(32) double bx[kLanes];
  alignas(32) double bs[kLanes];
  alignas(32) double bc[kLanes];
  _mm256_store_pd(bx, x);
  for (std::size_t j = 0; j < kLanes; ++j)
    detail::sin_cos(bx[j], bs[j], bc[j]);
  s = _mm256_load_pd(bs);
  c = _mm256_load_pd(bc);
}

inline __m256d exp4(__m256d x) {
  alignas(32) double b[kLanes];
  _mm256_store_pd(b, x);
  for (double& v : b) v = std::exp(v);
  return _mm256_load_pd(b);
}

inline __m256d log4(__m256d x) {
  alignas(32) double b[kLanes];
  _mm256_store_pd(b, x);
  for (double& v : b) v = std::log(v);
  return _mm256_load_pd(b);
}

inline __m256d atan2_4(__m256d y, __m256d x) {
  alignas(32) double by[kLanes];
  alignas(32) double bx[kLanes];
  _mm256_store_pd(by, y);
  _mm256_store_pd(bx, x);
  for (std::size_t j = 0; j < kLanes; ++j) by[j] = std::atan2(by[j], bx[j]);
  return _mm256_load_pd(by);
}

// a - 2pi * ceil((a - pi) / (2pi)), the wrap_angle ladder. VROUNDPD with the
// ceil mode rounds exactly like std::ceil.
inline __m256d wrap4(__m256d a) {
  __m256d t = _mm256_sub_pd(a, _mm256_set1_pd(kPi));
  t = _mm256_mul_pd(t, _mm256_set1_pd(kInvTwoPi));
  t = _mm256_ceil_pd(t);
  t = _mm256_mul_pd(_mm256_set1_pd(kTwoPi), t);
  return _mm256_sub_pd(a, t);
}

void ekf_predict_avx2(ConstBankView in, const MotionStep& ms, BankView out) {
  const std::size_t main = in.n - in.n % kLanes;
  const __m256d v_dt = _mm256_set1_pd(ms.v_dt);
  const __m256d dpsi = _mm256_set1_pd(ms.dpsi);
  const __m256d qxx = _mm256_set1_pd(ms.q.xx);
  const __m256d qxy = _mm256_set1_pd(ms.q.xy);
  const __m256d qxp = _mm256_set1_pd(ms.q.xp);
  const __m256d qyy = _mm256_set1_pd(ms.q.yy);
  const __m256d qyp = _mm256_set1_pd(ms.q.yp);
  const __m256d qpp = _mm256_set1_pd(ms.q.pp);
  for (std::size_t k = 0; k < main; k += kLanes) {
    const __m256d mpsi = _mm256_loadu_pd(in.mpsi + k);
    __m256d s, c;
    sincos4(mpsi, s, c);
    _mm256_storeu_pd(out.mx + k, _mm256_add_pd(_mm256_loadu_pd(in.mx + k),
                                               _mm256_mul_pd(v_dt, c)));
    _mm256_storeu_pd(out.my + k, _mm256_add_pd(_mm256_loadu_pd(in.my + k),
                                               _mm256_mul_pd(v_dt, s)));
    _mm256_storeu_pd(out.mpsi + k, wrap4(_mm256_add_pd(mpsi, dpsi)));

    const __m256d a = neg(_mm256_mul_pd(v_dt, s));
    const __m256d b = _mm256_mul_pd(v_dt, c);
    const __m256d cxp = _mm256_loadu_pd(in.cxp + k);
    const __m256d cyp = _mm256_loadu_pd(in.cyp + k);
    const __m256d cpp = _mm256_loadu_pd(in.cpp + k);
    const __m256d axp = _mm256_mul_pd(a, cxp);
    const __m256d bxp = _mm256_mul_pd(b, cxp);
    const __m256d ayp = _mm256_mul_pd(a, cyp);
    const __m256d byp = _mm256_mul_pd(b, cyp);
    const __m256d app = _mm256_mul_pd(a, cpp);
    const __m256d bpp = _mm256_mul_pd(b, cpp);
    __m256d t = _mm256_add_pd(_mm256_loadu_pd(in.cxx + k), axp);
    t = _mm256_add_pd(t, axp);
    t = _mm256_add_pd(t, _mm256_mul_pd(a, app));
    _mm256_storeu_pd(out.cxx + k, _mm256_add_pd(t, qxx));
    t = _mm256_add_pd(_mm256_loadu_pd(in.cxy + k), ayp);
    t = _mm256_add_pd(t, bxp);
    t = _mm256_add_pd(t, _mm256_mul_pd(a, bpp));
    _mm256_storeu_pd(out.cxy + k, _mm256_add_pd(t, qxy));
    _mm256_storeu_pd(out.cxp + k,
                     _mm256_add_pd(_mm256_add_pd(cxp, app), qxp));
    t = _mm256_add_pd(_mm256_loadu_pd(in.cyy + k), byp);
    t = _mm256_add_pd(t, byp);
    t = _mm256_add_pd(t, _mm256_mul_pd(b, bpp));
    _mm256_storeu_pd(out.cyy + k, _mm256_add_pd(t, qyy));
    _mm256_storeu_pd(out.cyp + k,
                     _mm256_add_pd(_mm256_add_pd(cyp, bpp), qyp));
    _mm256_storeu_pd(out.cpp + k, _mm256_add_pd(cpp, qpp));
  }
  for (std::size_t k = main; k < in.n; ++k) {
    const detail::GaussianOne g{in.mx[k], in.my[k], in.mpsi[k],
                                {in.cxx[k], in.cxy[k], in.cxp[k], in.cyy[k],
                                 in.cyp[k], in.cpp[k]}};
    const detail::GaussianOne o = detail::propagate_one(g, ms);
    out.mx[k] = o.mx;
    out.my[k] = o.my;
    out.mpsi[k] = o.mpsi;
    out.cxx[k] = o.c.xx;
    out.cxy[k] = o.c.xy;
    out.cxp[k] = o.c.xp;
    out.cyy[k] = o.c.yy;
    out.cyp[k] = o.c.yp;
    out.cpp[k] = o.c.pp;
  }
}

void snr_moments_avx2(ConstBankView prior, const double* tx, const double* ty,
                      const SensorConsts& sc, MomentsView out) {
  const std::size_t main = prior.n - prior.n % kLanes;
  const __m256d zero = _mm256_setzero_pd();
  const __m256d alpha = _mm256_set1_pd(sc.alpha);
  const __m256d beta = _mm256_set1_pd(sc.beta);
  const __m256d ln_g = _mm256_set1_pd(sc.ln_gamma);
  const __m256d two_ln_g = _mm256_set1_pd(sc.ln_gamma + sc.ln_gamma);
  const __m256d one = _mm256_set1_pd(1.0);
  for (std::size_t k = 0; k < main; k += kLanes) {
    const __m256d mx = _mm256_loadu_pd(prior.mx + k);
    const __m256d my = _mm256_loadu_pd(prior.my + k);
    const __m256d mpsi = _mm256_loadu_pd(prior.mpsi + k);
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(tx + k), mx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ty + k), my);
    const __m256d r2 =
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    // Lanes at exactly zero range would divide by zero below; their garbage
    // is blended away with the fallback values the scalar branch produces.
    const __m256d sing = _mm256_cmp_pd(r2, zero, _CMP_EQ_OQ);

    const __m256d phi = wrap4(_mm256_sub_pd(atan2_4(dy, dx), mpsi));
    const __m256d att =
        exp4(_mm256_mul_pd(neg(_mm256_mul_pd(phi, phi)), ln_g));
    const __m256d q = _mm256_add_pd(r2, beta);
    const __m256d h = _mm256_div_pd(_mm256_mul_pd(alpha, att), q);
    const __m256d bfac = neg(_mm256_mul_pd(phi, two_ln_g));
    const __m256d inv_r2 = _mm256_div_pd(one, r2);
    const __m256d inv_q = _mm256_div_pd(one, q);
    __m256d hx = _mm256_mul_pd(bfac, _mm256_mul_pd(dy, inv_r2));
    hx = _mm256_add_pd(hx, _mm256_mul_pd(_mm256_add_pd(dx, dx), inv_q));
    hx = _mm256_mul_pd(h, hx);
    __m256d hy = _mm256_mul_pd(bfac, neg(_mm256_mul_pd(dx, inv_r2)));
    hy = _mm256_add_pd(hy, _mm256_mul_pd(_mm256_add_pd(dy, dy), inv_q));
    hy = _mm256_mul_pd(h, hy);
    const __m256d hp = _mm256_mul_pd(h, neg(bfac));

    const __m256d cxx = _mm256_loadu_pd(prior.cxx + k);
    const __m256d cxy = _mm256_loadu_pd(prior.cxy + k);
    const __m256d cxp = _mm256_loadu_pd(prior.cxp + k);
    const __m256d cyy = _mm256_loadu_pd(prior.cyy + k);
    const __m256d cyp = _mm256_loadu_pd(prior.cyp + k);
    const __m256d cpp = _mm256_loadu_pd(prior.cpp + k);
    const __m256d v0 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(hx, cxx), _mm256_mul_pd(hy, cxy)),
        _mm256_mul_pd(hp, cxp));
    const __m256d v1 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(hx, cxy), _mm256_mul_pd(hy, cyy)),
        _mm256_mul_pd(hp, cyp));
    const __m256d v2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(hx, cxp), _mm256_mul_pd(hy, cyp)),
        _mm256_mul_pd(hp, cpp));
    __m256d qf = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(hx, v0), _mm256_mul_pd(hy, v1)),
        _mm256_mul_pd(hp, v2));
    // (qf < 0) ? 0 : qf -- a blend on strictly-negative, so -0.0 rides
    // through untouched exactly as in the scalar ternary.
    qf = _mm256_blendv_pd(qf, zero, _mm256_cmp_pd(qf, zero, _CMP_LT_OQ));
    const __m256d var = _mm256_add_pd(qf, _mm256_set1_pd(sc.r_var));

    const __m256d mu_fb = _mm256_set1_pd(sc.alpha / sc.beta);
    const __m256d var_fb = _mm256_set1_pd(sc.r_var);
    _mm256_storeu_pd(out.mu + k, _mm256_blendv_pd(h, mu_fb, sing));
    _mm256_storeu_pd(out.var + k, _mm256_blendv_pd(var, var_fb, sing));
    _mm256_storeu_pd(out.hx + k, _mm256_blendv_pd(hx, zero, sing));
    _mm256_storeu_pd(out.hy + k, _mm256_blendv_pd(hy, zero, sing));
    _mm256_storeu_pd(out.hp + k, _mm256_blendv_pd(hp, zero, sing));
    const int mask = _mm256_movemask_pd(sing);
    for (std::size_t j = 0; j < kLanes; ++j) {
      out.singular[k + j] = static_cast<std::uint8_t>((mask >> j) & 1);
    }
  }
  for (std::size_t k = main; k < prior.n; ++k) {
    const detail::GaussianOne g{prior.mx[k], prior.my[k], prior.mpsi[k],
                                {prior.cxx[k], prior.cxy[k], prior.cxp[k],
                                 prior.cyy[k], prior.cyp[k], prior.cpp[k]}};
    const detail::MomentsOne m = detail::snr_moments_one(g, tx[k], ty[k], sc);
    out.mu[k] = m.mu;
    out.var[k] = m.var;
    out.hx[k] = m.hx;
    out.hy[k] = m.hy;
    out.hp[k] = m.hp;
    out.singular[k] = m.singular ? 1 : 0;
  }
}

void ekf_correct_avx2(BankView bank, ConstMomentsView m, double z) {
  const std::size_t main = bank.n - bank.n % kLanes;
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zv = _mm256_set1_pd(z);
  for (std::size_t k = 0; k < main; k += kLanes) {
    const __m256d hx = _mm256_loadu_pd(m.hx + k);
    const __m256d hy = _mm256_loadu_pd(m.hy + k);
    const __m256d hp = _mm256_loadu_pd(m.hp + k);
    const __m256d cxx = _mm256_loadu_pd(bank.cxx + k);
    const __m256d cxy = _mm256_loadu_pd(bank.cxy + k);
    const __m256d cxp = _mm256_loadu_pd(bank.cxp + k);
    const __m256d cyy = _mm256_loadu_pd(bank.cyy + k);
    const __m256d cyp = _mm256_loadu_pd(bank.cyp + k);
    const __m256d cpp = _mm256_loadu_pd(bank.cpp + k);
    const __m256d u0 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(cxx, hx), _mm256_mul_pd(cxy, hy)),
        _mm256_mul_pd(cxp, hp));
    const __m256d u1 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(cxy, hx), _mm256_mul_pd(cyy, hy)),
        _mm256_mul_pd(cyp, hp));
    const __m256d u2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(cxp, hx), _mm256_mul_pd(cyp, hy)),
        _mm256_mul_pd(cpp, hp));
    const __m256d var = _mm256_loadu_pd(m.var + k);
    const __m256d inv_s = _mm256_div_pd(one, var);
    const __m256d k0 = _mm256_mul_pd(u0, inv_s);
    const __m256d k1 = _mm256_mul_pd(u1, inv_s);
    const __m256d k2 = _mm256_mul_pd(u2, inv_s);
    const __m256d innov = _mm256_sub_pd(zv, _mm256_loadu_pd(m.mu + k));
    _mm256_storeu_pd(bank.mx + k,
                     _mm256_add_pd(_mm256_loadu_pd(bank.mx + k),
                                   _mm256_mul_pd(k0, innov)));
    _mm256_storeu_pd(bank.my + k,
                     _mm256_add_pd(_mm256_loadu_pd(bank.my + k),
                                   _mm256_mul_pd(k1, innov)));
    _mm256_storeu_pd(bank.mpsi + k,
                     wrap4(_mm256_add_pd(_mm256_loadu_pd(bank.mpsi + k),
                                         _mm256_mul_pd(k2, innov))));
    _mm256_storeu_pd(bank.cxx + k,
                     _mm256_sub_pd(cxx, _mm256_mul_pd(var, _mm256_mul_pd(k0, k0))));
    _mm256_storeu_pd(bank.cxy + k,
                     _mm256_sub_pd(cxy, _mm256_mul_pd(var, _mm256_mul_pd(k0, k1))));
    _mm256_storeu_pd(bank.cxp + k,
                     _mm256_sub_pd(cxp, _mm256_mul_pd(var, _mm256_mul_pd(k0, k2))));
    _mm256_storeu_pd(bank.cyy + k,
                     _mm256_sub_pd(cyy, _mm256_mul_pd(var, _mm256_mul_pd(k1, k1))));
    _mm256_storeu_pd(bank.cyp + k,
                     _mm256_sub_pd(cyp, _mm256_mul_pd(var, _mm256_mul_pd(k1, k2))));
    _mm256_storeu_pd(bank.cpp + k,
                     _mm256_sub_pd(cpp, _mm256_mul_pd(var, _mm256_mul_pd(k2, k2))));
  }
  for (std::size_t k = main; k < bank.n; ++k) {
    const detail::MomentsOne mk{m.mu[k], m.var[k], m.hx[k],
                                m.hy[k], m.hp[k],  m.singular[k] != 0};
    const detail::GaussianOne g{bank.mx[k], bank.my[k], bank.mpsi[k],
                                {bank.cxx[k], bank.cxy[k], bank.cxp[k],
                                 bank.cyy[k], bank.cyp[k], bank.cpp[k]}};
    const detail::GaussianOne o = detail::correct_one(g, mk, z);
    bank.mx[k] = o.mx;
    bank.my[k] = o.my;
    bank.mpsi[k] = o.mpsi;
    bank.cxx[k] = o.c.xx;
    bank.cxy[k] = o.c.xy;
    bank.cxp[k] = o.c.xp;
    bank.cyy[k] = o.c.yy;
    bank.cyp[k] = o.c.yp;
    bank.cpp[k] = o.c.pp;
  }
}

void loglike_accum_avx2(ConstMomentsView m, double z, double* logw) {
  const std::size_t main = m.n - m.n % kLanes;
  const __m256d zv = _mm256_set1_pd(z);
  const __m256d two_pi = _mm256_set1_pd(kTwoPi);
  const __m256d neg_half = _mm256_set1_pd(-0.5);
  for (std::size_t k = 0; k < main; k += kLanes) {
    const __m256d mu = _mm256_loadu_pd(m.mu + k);
    const __m256d var = _mm256_loadu_pd(m.var + k);
    const __m256d d = _mm256_sub_pd(zv, mu);
    const __m256d lt = log4(_mm256_mul_pd(two_pi, var));
    const __m256d quad = _mm256_div_pd(_mm256_mul_pd(d, d), var);
    const __m256d ll = _mm256_mul_pd(neg_half, _mm256_add_pd(lt, quad));
    _mm256_storeu_pd(logw + k, _mm256_add_pd(_mm256_loadu_pd(logw + k), ll));
  }
  for (std::size_t k = main; k < m.n; ++k) {
    logw[k] += detail::log_normal_pdf(z, m.mu[k], m.var[k]);
  }
}

}  // namespace

const Backend& avx2_backend() {
  static const Backend b{"avx2", ekf_predict_avx2, snr_moments_avx2,
                         ekf_correct_avx2, loglike_accum_avx2};
  return b;
}

}  // namespace miseeker::kernels
