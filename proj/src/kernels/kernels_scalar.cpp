#include "miseeker/kernels/kernels.hpp"

namespace miseeker::kernels {
namespace {

using detail::GaussianOne;
using detail::MomentsOne;

GaussianOne load_one(ConstBankView v, std::size_t k) {
  return GaussianOne{v.mx[k], v.my[k],  v.mpsi[k],
                     {v.cxx[k], v.cxy[k], v.cxp[k], v.cyy[k], v.cyp[k],
                      v.cpp[k]}};
}

void store_one(const GaussianOne& g, BankView v, std::size_t k) {
  v.mx[k] = g.mx;
  v.my[k] = g.my;
  v.mpsi[k] = g.mpsi;
  v.cxx[k] = g.c.xx;
  v.cxy[k] = g.c.xy;
  v.cxp[k] = g.c.xp;
  v.cyy[k] = g.c.yy;
  v.cyp[k] = g.c.yp;
  v.cpp[k] = g.c.pp;
}

void ekf_predict_scalar(ConstBankView in, const detail::MotionStep& ms,
                        BankView out) {
  for (std::size_t k = 0; k < in.n; ++k) {
    store_one(detail::propagate_one(load_one(in, k), ms), out, k);
  }
}

void snr_moments_scalar(ConstBankView prior, const double* tx,
                        const double* ty, const detail::SensorConsts& sc,
                        MomentsView out) {
  for (std::size_t k = 0; k < prior.n; ++k) {
    const MomentsOne m = detail::snr_moments_one(load_one(prior, k), tx[k],
                                                 ty[k], sc);
    out.mu[k] = m.mu;
    out.var[k] = m.var;
    out.hx[k] = m.hx;
    out.hy[k] = m.hy;
    out.hp[k] = m.hp;
    out.singular[k] = m.singular ? 1 : 0;
  }
}

void ekf_correct_scalar(BankView bank, ConstMomentsView m, double z) {
  for (std::size_t k = 0; k < bank.n; ++k) {
    const MomentsOne mk{m.mu[k], m.var[k], m.hx[k],
                        m.hy[k], m.hp[k],  m.singular[k] != 0};
    const GaussianOne g{bank.mx[k], bank.my[k], bank.mpsi[k],
                        {bank.cxx[k], bank.cxy[k], bank.cxp[k], bank.cyy[k],
                         bank.cyp[k], bank.cpp[k]}};
    store_one(detail::correct_one(g, mk, z), bank, k);
  }
}

void loglike_accum_scalar(ConstMomentsView m, double z, double* logw) {
  for (std::size_t k = 0; k < m.n; ++k) {
    logw[k] += detail::log_normal_pdf(z, m.mu[k], m.var[k]);
  }
}

}  // namespace

const Backend& scalar_backend() {
  static const Backend b{"scalar", ekf_predict_scalar, snr_moments_scalar,
                         ekf_correct_scalar, loglike_accum_scalar};
  return b;
}

}  // namespace miseeker::kernels
