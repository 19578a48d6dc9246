#pragma once
// Kernel bodies, templated over the batch type.  Included by exactly two
// translation units (scalar and AVX2).  Any arithmetic added here must keep
// one fixed operation order; see vmath.hpp.

#include "defport/mc/kernels.hpp"
#include "defport/mc/vmath.hpp"

namespace defport::mc {

template <class B>
void schedule_kernel(const ScheduleKernelParams& kp, std::uint64_t first, std::uint64_t count,
                     double* wealth, double* util) {
  using F = typename B::F;
  using U = typename B::U;
  const int W = B::width;
  const int dims = kp.dims();
  const F p = B::broadcast(kp.p);
  const F inv_p = B::broadcast(1.0 / kp.p);
  const F lx_init = B::broadcast(kp.lx0 + kp.jump_lx);

  std::uint64_t i = 0;
  for (; i + W <= count; i += W) {
    U path = B::broadcast_u(first + i);
    if constexpr (B::width > 1) path = B::lane_offsets(path);
    U base = B::mul_u(path, B::broadcast_u(static_cast<std::uint64_t>(dims)));
    F lx = lx_init;
    for (int s = 0; s < dims; ++s) {
      F z = normal_draw<B>(kp.key, B::add_u(base, B::broadcast_u(static_cast<std::uint64_t>(s))));
      lx = B::add(lx, B::broadcast(kp.drift[s]));
      lx = B::fma(B::broadcast(kp.vol[s]), z, lx);
    }
    B::store(wealth + i, exp_b<B>(lx));
    B::store(util + i, B::mul(exp_b<B>(B::mul(p, lx)), inv_p));
  }
  if constexpr (B::width > 1) {
    if (i < count) schedule_kernel<ScalarBatch>(kp, first + i, count - i, wealth + i, util + i);
  }
}

template <class B>
void default_branch_kernel(const DefaultBranchKernelParams& kp, std::uint64_t first,
                           std::uint64_t count, double* wealth, double* util) {
  using F = typename B::F;
  using U = typename B::U;
  const int W = B::width;
  const int nseg = static_cast<int>(kp.seg_nu.size());
  const int dims = kp.dims();

  const F one = B::broadcast(1.0);
  const F zero = B::broadcast(0.0);
  const F p = B::broadcast(kp.p);
  const F inv_p = B::broadcast(1.0 / kp.p);
  const F neg_inv_lambda = B::broadcast(-1.0 / kp.lambda);
  const F neg_mass = B::broadcast(-kp.trunc_mass);
  const F gamma = B::broadcast(kp.gamma);
  const F horizon = B::broadcast(kp.horizon);
  const F half = B::broadcast(0.5);
  const F one_minus_p = B::broadcast(kp.one_minus_p);

  std::uint64_t i = 0;
  for (; i + W <= count; i += W) {
    U path = B::broadcast_u(first + i);
    if constexpr (B::width > 1) path = B::lane_offsets(path);
    U base = B::mul_u(path, B::broadcast_u(static_cast<std::uint64_t>(dims)));

    // default time from the truncated exponential law
    F u = uniform_open<B>(kp.key, base);
    F theta = B::mul(log_b<B>(B::fma(u, neg_mass, one)), neg_inv_lambda);

    // pre-default segments, cut at theta
    F lx = B::broadcast(kp.lx0);
    for (int s = 0; s < nseg; ++s) {
      F dt = B::sub(theta, B::broadcast(kp.seg_start[s]));
      dt = B::max(dt, zero);
      dt = B::min(dt, B::broadcast(kp.seg_len[s]));
      F z = normal_draw<B>(kp.key,
                           B::add_u(base, B::broadcast_u(static_cast<std::uint64_t>(1 + s))));
      lx = B::fma(B::broadcast(kp.seg_rate[s]), dt, lx);
      lx = B::fma(B::mul(B::broadcast(kp.seg_vol[s]), B::sqrt(dt)), z, lx);
    }

    // fraction held when the default hits
    F nu_at;
    if (kp.has_override) {
      nu_at = B::broadcast(kp.override_nu);
    } else {
      nu_at = zero;
      for (int s = 0; s < nseg; ++s) {
        typename B::M in = B::ge(theta, B::broadcast(kp.seg_start[s]));
        typename B::M before_end =
            B::lt(theta, B::broadcast(kp.seg_start[s] + kp.seg_len[s]));
        F cand = B::select(before_end, B::broadcast(kp.seg_nu[s]), nu_at);
        nu_at = B::select(in, cand, nu_at);
      }
    }
    lx = B::add(lx, log_b<B>(B::sub(one, B::mul(nu_at, gamma))));

    // post-default coefficients at theta
    F mu1, sg1;
    if (kp.profile_linear) {
      mu1 = B::mul(B::broadcast(kp.lin_mu_slope), theta);
      sg1 = B::fma(B::broadcast(kp.lin_sg_slope), theta, B::broadcast(kp.lin_sg_base));
    } else {
      const int nt = static_cast<int>(kp.tab_theta.size());
      mu1 = B::broadcast(kp.tab_mu[0]);
      sg1 = B::broadcast(kp.tab_sg[0]);
      for (int k = 0; k + 1 < nt; ++k) {
        F t0 = B::broadcast(kp.tab_theta[k]);
        F t1 = B::broadcast(kp.tab_theta[k + 1]);
        F w = B::div(B::sub(theta, t0), B::sub(t1, t0));
        F mu_k = B::fma(w, B::broadcast(kp.tab_mu[k + 1] - kp.tab_mu[k]),
                        B::broadcast(kp.tab_mu[k]));
        F sg_k = B::fma(w, B::broadcast(kp.tab_sg[k + 1] - kp.tab_sg[k]),
                        B::broadcast(kp.tab_sg[k]));
        typename B::M in = B::ge(theta, t0);
        mu1 = B::select(in, mu_k, mu1);
        sg1 = B::select(in, sg_k, sg1);
      }
    }

    F nu1 = kp.post_optimal
                ? B::div(mu1, B::mul(one_minus_p, B::mul(sg1, sg1)))
                : B::broadcast(kp.post_nu);

    F h = B::sub(horizon, theta);
    F vol1 = B::mul(nu1, sg1);
    F rate1 = B::sub(B::mul(nu1, mu1), B::mul(half, B::mul(vol1, vol1)));
    F z1 = normal_draw<B>(kp.key,
                          B::add_u(base, B::broadcast_u(static_cast<std::uint64_t>(1 + nseg))));
    lx = B::fma(rate1, h, lx);
    lx = B::fma(B::mul(vol1, B::sqrt(h)), z1, lx);

    B::store(wealth + i, exp_b<B>(lx));
    B::store(util + i, B::mul(exp_b<B>(B::mul(p, lx)), inv_p));
  }
  if constexpr (B::width > 1) {
    if (i < count)
      default_branch_kernel<ScalarBatch>(kp, first + i, count - i, wealth + i, util + i);
  }
}

}  // namespace defport::mc
