#pragma once
// Monte Carlo path kernels: a scalar reference implementation and an AVX2
// variant compiled from the same templates, selected at runtime.  Outputs are
// written per path index, so reductions are independent of both the variant
// and the thread layout.

#include <cstdint>
#include <vector>

namespace defport::mc {

// Piecewise-lognormal schedule with a known jump: log-wealth accumulates
// a_s + b_s * Z_s over the segments, plus a fixed log jump factor.  Covers
// fixed-default-time policy evaluation, survival branches, plain lognormal
// moments and the forced-short experiment.
struct ScheduleKernelParams {
  std::uint64_t key = 0;          // stream key
  double lx0 = 0.0;               // initial log wealth
  double jump_lx = 0.0;           // log of the jump factor (0 if none)
  double p = 1.0;                 // utility exponent
  std::vector<double> drift;      // a_s per segment
  std::vector<double> vol;        // b_s per segment (already includes sqrt(dt))
  int dims() const { return static_cast<int>(drift.size()); }
};

// Default-before-horizon branch for the progressively informed weighting:
// the default time is drawn from the exponential law truncated to [0, T],
// the pre-default schedule is cut at that time, the at-default fraction sets
// the jump, and the remaining horizon runs on the post-default coefficients.
struct DefaultBranchKernelParams {
  std::uint64_t key = 0;
  double lx0 = 0.0;
  double p = 0.8;
  double lambda = 0.3;
  double horizon = 1.0;
  double trunc_mass = 0.0;        // 1 - exp(-lambda*T)
  double gamma = 0.2;

  // pre-default policy segments
  std::vector<double> seg_start;  // t_s
  std::vector<double> seg_len;    // t_{s+1} - t_s
  std::vector<double> seg_nu;     // fraction held on the segment
  std::vector<double> seg_rate;   // nu*mu0 - 0.5*nu^2*sigma0^2
  std::vector<double> seg_vol;    // nu*sigma0

  bool has_override = false;      // fixed fraction held at the default instant
  double override_nu = 0.0;

  // post-default coefficient profile: linear in theta, or a table
  bool profile_linear = true;
  double lin_mu_slope = 0.0;      // mu1(theta) = lin_mu_slope * theta
  double lin_sg_base = 0.0;       // sigma1(theta) = lin_sg_base + lin_sg_slope * theta
  double lin_sg_slope = 0.0;
  std::vector<double> tab_theta;  // table nodes (when !profile_linear)
  std::vector<double> tab_mu;
  std::vector<double> tab_sg;

  bool post_optimal = true;       // growth-optimal constant fraction after default
  double post_nu = 0.0;           // used when !post_optimal
  double one_minus_p = 0.2;

  int dims() const { return 2 + static_cast<int>(seg_nu.size()); }
};

// Each kernel fills wealth[i] and util[i] for global path indices
// [first, first+count).
using ScheduleKernelFn = void (*)(const ScheduleKernelParams&, std::uint64_t first,
                                  std::uint64_t count, double* wealth, double* util);
using DefaultBranchKernelFn = void (*)(const DefaultBranchKernelParams&, std::uint64_t first,
                                       std::uint64_t count, double* wealth, double* util);

struct KernelSet {
  ScheduleKernelFn schedule;
  DefaultBranchKernelFn default_branch;
  const char* name;
};

const KernelSet* scalar_kernels();
const KernelSet* avx2_kernels();    // null when not compiled in or CPU lacks AVX2+FMA
const KernelSet& active_kernels();  // AVX2 when available, scalar otherwise

// Fill [0,n) using the active kernels across a small thread pool.  Chunk
// boundaries are fixed, so the result is invariant to the worker count.
void fill_schedule(const ScheduleKernelParams&, std::uint64_t n, double* wealth, double* util,
                   int threads);
void fill_default_branch(const DefaultBranchKernelParams&, std::uint64_t n, double* wealth,
                         double* util, int threads);

}  // namespace defport::mc
