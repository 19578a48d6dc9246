// AVX2 variant: four paths per step.  Same templates as the scalar reference;
// every lane op is either an IEEE primitive or a correctly rounded fma, so
// outputs are bit-identical to the reference kernels.

#include <immintrin.h>

#include "defport/mc/kernels_impl.hpp"

namespace defport::mc {

namespace {

struct AvxF64 {
  __m256d v;
};
struct AvxU64 {
  __m256i v;
};
struct AvxMask {
  __m256d v;  // all-ones lanes where true
};

struct Avx2Batch {
  static constexpr int width = 4;
  using F = AvxF64;
  using U = AvxU64;
  using M = AvxMask;

  static F broadcast(double x) { return {_mm256_set1_pd(x)}; }
  static U broadcast_u(std::uint64_t x) {
    return {_mm256_set1_epi64x(static_cast<long long>(x))};
  }
  static U lane_offsets(U a) { return {_mm256_add_epi64(a.v, _mm256_set_epi64x(3, 2, 1, 0))}; }
  static F load(const double* p) { return {_mm256_loadu_pd(p)}; }
  static void store(double* p, F x) { _mm256_storeu_pd(p, x.v); }

  static F add(F a, F b) { return {_mm256_add_pd(a.v, b.v)}; }
  static F sub(F a, F b) { return {_mm256_sub_pd(a.v, b.v)}; }
  static F mul(F a, F b) { return {_mm256_mul_pd(a.v, b.v)}; }
  static F div(F a, F b) { return {_mm256_div_pd(a.v, b.v)}; }
  static F fma(F a, F b, F c) { return {_mm256_fmadd_pd(a.v, b.v, c.v)}; }
  static F sqrt(F a) { return {_mm256_sqrt_pd(a.v)}; }
  static F neg(F a) { return {_mm256_xor_pd(a.v, _mm256_set1_pd(-0.0))}; }
  static F min(F a, F b) { return {_mm256_min_pd(b.v, a.v)}; }  // b<a ? b : a
  static F max(F a, F b) { return {_mm256_max_pd(b.v, a.v)}; }  // a<b ? b : a
  static F round_nearest(F a) {
    return {_mm256_round_pd(a.v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC)};
  }

  static M lt(F a, F b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LT_OQ)}; }
  static M le(F a, F b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_LE_OQ)}; }
  static M ge(F a, F b) { return {_mm256_cmp_pd(a.v, b.v, _CMP_GE_OQ)}; }
  static F select(M m, F a, F b) { return {_mm256_blendv_pd(b.v, a.v, m.v)}; }

  static U add_u(U a, U b) { return {_mm256_add_epi64(a.v, b.v)}; }
  static U xor_u(U a, U b) { return {_mm256_xor_si256(a.v, b.v)}; }
  static U or_u(U a, U b) { return {_mm256_or_si256(a.v, b.v)}; }
  static U and_u(U a, U b) { return {_mm256_and_si256(a.v, b.v)}; }
  static U shr(U a, int n) { return {_mm256_srli_epi64(a.v, n)}; }
  static U shl(U a, int n) { return {_mm256_slli_epi64(a.v, n)}; }

  // 64x64 -> low 64 multiply out of 32-bit pieces
  static U mul_u(U a, U b) {
    __m256i lo = _mm256_mul_epu32(a.v, b.v);
    __m256i ahi = _mm256_srli_epi64(a.v, 32);
    __m256i bhi = _mm256_srli_epi64(b.v, 32);
    __m256i cross = _mm256_add_epi64(_mm256_mul_epu32(ahi, b.v), _mm256_mul_epu32(a.v, bhi));
    return {_mm256_add_epi64(lo, _mm256_slli_epi64(cross, 32))};
  }

  static F bitcast_f(U a) { return {_mm256_castsi256_pd(a.v)}; }
  static U bitcast_u(F a) { return {_mm256_castpd_si256(a.v)}; }

  static F small_u_to_f(U a) {
    __m256i biased = _mm256_or_si256(a.v, _mm256_set1_epi64x(0x4330000000000000ll));
    return {_mm256_sub_pd(_mm256_castsi256_pd(biased), _mm256_set1_pd(4503599627370496.0))};
  }
  static U f_to_i_small(F a) {
    // values are small integers held exactly in double
    __m128i lo32 = _mm256_cvttpd_epi32(a.v);
    return {_mm256_cvtepi32_epi64(lo32)};
  }
};

void avx_schedule(const ScheduleKernelParams& kp, std::uint64_t first, std::uint64_t count,
                  double* wealth, double* util) {
  schedule_kernel<Avx2Batch>(kp, first, count, wealth, util);
}

void avx_default_branch(const DefaultBranchKernelParams& kp, std::uint64_t first,
                        std::uint64_t count, double* wealth, double* util) {
  default_branch_kernel<Avx2Batch>(kp, first, count, wealth, util);
}

const KernelSet kAvxSet{avx_schedule, avx_default_branch, "avx2"};

}  // namespace

const KernelSet* avx2_kernel_set_impl();
const KernelSet* avx2_kernel_set_impl() { return &kAvxSet; }

}  // namespace defport::mc
