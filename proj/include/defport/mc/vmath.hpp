#pragma once
// Batch-generic double-precision math used by the Monte Carlo kernels.
//
// The same templates are instantiated once with the scalar batch type
// (reference kernels) and once with the AVX2 batch type.  Every operation a
// kernel performs maps to an IEEE-754 primitive that rounds identically in
// both instantiations (add/sub/mul/div/sqrt, correctly-rounded fma, and
// integer bit manipulation), so a path's output is bit-identical no matter
// which variant produced it.  Keep it that way: no std::exp/std::log here,
// no bare a*b+c chains that the compiler could contract differently.

#include <cmath>
#include <cstdint>
#include <cstring>

namespace defport::mc {

// ---------------------------------------------------------------------------
// Scalar batch (width 1): the reference lane.
// ---------------------------------------------------------------------------

struct ScalarF64 {
  double v;
};
struct ScalarU64 {
  std::uint64_t v;
};
struct ScalarMask {
  bool v;
};

struct ScalarBatch {
  static constexpr int width = 1;
  using F = ScalarF64;
  using U = ScalarU64;
  using M = ScalarMask;

  static F broadcast(double x) { return {x}; }
  static U broadcast_u(std::uint64_t x) { return {x}; }
  static F load(const double* p) { return {*p}; }
  static void store(double* p, F x) { *p = x.v; }

  static F add(F a, F b) { return {a.v + b.v}; }
  static F sub(F a, F b) { return {a.v - b.v}; }
  static F mul(F a, F b) { return {a.v * b.v}; }
  static F div(F a, F b) { return {a.v / b.v}; }
  static F fma(F a, F b, F c) { return {std::fma(a.v, b.v, c.v)}; }
  static F sqrt(F a) { return {std::sqrt(a.v)}; }
  static F neg(F a) { return {-a.v}; }
  static F min(F a, F b) { return {b.v < a.v ? b.v : a.v}; }
  static F max(F a, F b) { return {a.v < b.v ? b.v : a.v}; }
  static F round_nearest(F a) { return {std::nearbyint(a.v)}; }

  static M lt(F a, F b) { return {a.v < b.v}; }
  static M le(F a, F b) { return {a.v <= b.v}; }
  static M ge(F a, F b) { return {a.v >= b.v}; }
  static F select(M m, F a, F b) { return {m.v ? a.v : b.v}; }  // m ? a : b

  static U add_u(U a, U b) { return {a.v + b.v}; }
  static U mul_u(U a, U b) { return {a.v * b.v}; }
  static U xor_u(U a, U b) { return {a.v ^ b.v}; }
  static U or_u(U a, U b) { return {a.v | b.v}; }
  static U and_u(U a, U b) { return {a.v & b.v}; }
  static U shr(U a, int n) { return {a.v >> n}; }
  static U shl(U a, int n) { return {a.v << n}; }

  static F bitcast_f(U a) {
    double d;
    std::memcpy(&d, &a.v, 8);
    return {d};
  }
  static U bitcast_u(F a) {
    std::uint64_t u;
    std::memcpy(&u, &a.v, 8);
    return {u};
  }
  // exact conversion of a value < 2^52 held in the low bits
  static F small_u_to_f(U a) {
    // (a | 2^52 exponent) - 2^52
    U biased = or_u(a, {0x4330000000000000ull});
    return {bitcast_f(biased).v - 4503599627370496.0};
  }
  // double -> int64 (value must be exactly representable); returns exponent shift bits
  static U f_to_i_small(F a) { return {static_cast<std::uint64_t>(static_cast<std::int64_t>(a.v))}; }
};

// ---------------------------------------------------------------------------
// Generic math on any batch type B.
// ---------------------------------------------------------------------------

namespace detail {
inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kMix1 = 0xBF58476D1CE4E5B9ull;
inline constexpr std::uint64_t kMix2 = 0x94D049BB133111EBull;
}  // namespace detail

// Counter-based generator: the splitmix64 finalizer applied to
// key + (index+1)*golden.  Random access by (stream key, counter), so results
// are independent of evaluation order and thread count.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= detail::kMix1;
  z ^= z >> 27;
  z *= detail::kMix2;
  z ^= z >> 31;
  return z;
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t salt) {
  return mix64(seed + detail::kGolden * (salt + 1));
}

template <class B>
typename B::U counter_bits(std::uint64_t key, typename B::U idx) {
  using U = typename B::U;
  U z = B::add_u(B::broadcast_u(key),
                 B::mul_u(B::add_u(idx, B::broadcast_u(1)), B::broadcast_u(detail::kGolden)));
  z = B::xor_u(z, B::shr(z, 30));
  z = B::mul_u(z, B::broadcast_u(detail::kMix1));
  z = B::xor_u(z, B::shr(z, 27));
  z = B::mul_u(z, B::broadcast_u(detail::kMix2));
  z = B::xor_u(z, B::shr(z, 31));
  return z;
}

// uniform in the open interval (0,1): ((bits >> 12) + 0.5) * 2^-52.
// The shifted value has 52 bits, so the exponent-field conversion is exact.
template <class B>
typename B::F to_unit_open(typename B::U bits) {
  typename B::F m = B::small_u_to_f(B::shr(bits, 12));
  return B::mul(B::add(m, B::broadcast(0.5)), B::broadcast(0x1p-52));
}

template <class B>
typename B::F uniform_open(std::uint64_t key, typename B::U idx) {
  return to_unit_open<B>(counter_bits<B>(key, idx));
}

// exp(x) for finite |x| < ~700: round-to-nearest power-of-two reduction plus a
// degree-12 polynomial on [-ln2/2, ln2/2].
template <class B>
typename B::F exp_b(typename B::F x) {
  using F = typename B::F;
  const F log2e = B::broadcast(1.4426950408889634074);
  const F ln2_hi = B::broadcast(6.93147180369123816490e-01);
  const F ln2_lo = B::broadcast(1.90821492927058770002e-10);

  F k = B::round_nearest(B::mul(x, log2e));
  F r = B::fma(k, B::neg(ln2_hi), x);
  r = B::fma(k, B::neg(ln2_lo), r);

  // Horner, reciprocal-factorial coefficients
  F q = B::broadcast(1.0 / 479001600.0);
  q = B::fma(q, r, B::broadcast(1.0 / 39916800.0));
  q = B::fma(q, r, B::broadcast(1.0 / 3628800.0));
  q = B::fma(q, r, B::broadcast(1.0 / 362880.0));
  q = B::fma(q, r, B::broadcast(1.0 / 40320.0));
  q = B::fma(q, r, B::broadcast(1.0 / 5040.0));
  q = B::fma(q, r, B::broadcast(1.0 / 720.0));
  q = B::fma(q, r, B::broadcast(1.0 / 120.0));
  q = B::fma(q, r, B::broadcast(1.0 / 24.0));
  q = B::fma(q, r, B::broadcast(1.0 / 6.0));
  q = B::fma(q, r, B::broadcast(0.5));
  q = B::fma(q, r, B::broadcast(1.0));
  q = B::fma(q, r, B::broadcast(1.0));

  // scale by 2^k through the exponent field
  typename B::U ki = B::f_to_i_small(k);
  typename B::U scale_bits = B::shl(B::add_u(ki, B::broadcast_u(1023)), 52);
  return B::mul(q, B::bitcast_f(scale_bits));
}

// log(x) for positive normal doubles: mantissa/exponent split, atanh series.
template <class B>
typename B::F log_b(typename B::F x) {
  using F = typename B::F;
  using U = typename B::U;
  const F sqrt2 = B::broadcast(1.41421356237309504880);
  const F ln2_hi = B::broadcast(6.93147180369123816490e-01);
  const F ln2_lo = B::broadcast(1.90821492927058770002e-10);

  U bits = B::bitcast_u(x);
  U expo_raw = B::shr(bits, 52);                 // biased exponent (sign assumed 0)
  F e = B::sub(B::small_u_to_f(expo_raw), B::broadcast(1023.0));
  U mant = B::or_u(B::and_u(bits, B::broadcast_u(0x000FFFFFFFFFFFFFull)),
                   B::broadcast_u(0x3FF0000000000000ull));
  F m = B::bitcast_f(mant);  // in [1,2)
  // fold [sqrt2, 2) down so z stays small
  typename B::M big = B::ge(m, sqrt2);
  m = B::select(big, B::mul(m, B::broadcast(0.5)), m);
  e = B::select(big, B::add(e, B::broadcast(1.0)), e);

  F z = B::div(B::sub(m, B::broadcast(1.0)), B::add(m, B::broadcast(1.0)));
  F z2 = B::mul(z, z);
  // 2*atanh(z) = 2z(1 + z^2/3 + z^4/5 + ...)
  F q = B::broadcast(2.0 / 15.0);
  q = B::fma(q, z2, B::broadcast(2.0 / 13.0));
  q = B::fma(q, z2, B::broadcast(2.0 / 11.0));
  q = B::fma(q, z2, B::broadcast(2.0 / 9.0));
  q = B::fma(q, z2, B::broadcast(2.0 / 7.0));
  q = B::fma(q, z2, B::broadcast(2.0 / 5.0));
  q = B::fma(q, z2, B::broadcast(2.0 / 3.0));
  q = B::fma(q, z2, B::broadcast(2.0));
  F lm = B::mul(q, z);

  F res = B::fma(e, ln2_lo, lm);
  return B::fma(e, ln2_hi, res);
}

// Inverse standard-normal CDF, rational approximation (central + tails),
// |relative error| < 1.2e-9 which is far below Monte Carlo resolution here.
template <class B>
typename B::F norm_inv(typename B::F u) {
  using F = typename B::F;
  const F plow = B::broadcast(0.02425);
  const F phigh = B::broadcast(1.0 - 0.02425);
  const F one = B::broadcast(1.0);
  const F half = B::broadcast(0.5);

  // central region
  F q = B::sub(u, half);
  F r = B::mul(q, q);
  F num = B::broadcast(-3.969683028665376e+01);
  num = B::fma(num, r, B::broadcast(2.209460984245205e+02));
  num = B::fma(num, r, B::broadcast(-2.759285104469687e+02));
  num = B::fma(num, r, B::broadcast(1.383577518672690e+02));
  num = B::fma(num, r, B::broadcast(-3.066479806614716e+01));
  num = B::fma(num, r, B::broadcast(2.506628277459239e+00));
  F den = B::broadcast(-5.447609879822406e+01);
  den = B::fma(den, r, B::broadcast(1.615858368580409e+02));
  den = B::fma(den, r, B::broadcast(-1.556989798598866e+02));
  den = B::fma(den, r, B::broadcast(6.680131188771972e+01));
  den = B::fma(den, r, B::broadcast(-1.328068155288572e+01));
  den = B::fma(den, r, one);
  F central = B::div(B::mul(q, num), den);

  // tail region helper evaluated at s = sqrt(-2 log(pt)), pt = min(u, 1-u)
  F pt = B::min(u, B::sub(one, u));
  F s = B::sqrt(B::mul(B::broadcast(-2.0), log_b<B>(pt)));
  F tn = B::broadcast(-7.784894002430293e-03);
  tn = B::fma(tn, s, B::broadcast(-3.223964580411365e-01));
  tn = B::fma(tn, s, B::broadcast(-2.400758277161838e+00));
  tn = B::fma(tn, s, B::broadcast(-2.549732539343734e+00));
  tn = B::fma(tn, s, B::broadcast(4.374664141464968e+00));
  tn = B::fma(tn, s, B::broadcast(2.938163982698783e+00));
  F td = B::broadcast(7.784695709041462e-03);
  td = B::fma(td, s, B::broadcast(3.224671290700398e-01));
  td = B::fma(td, s, B::broadcast(2.445134137142996e+00));
  td = B::fma(td, s, B::broadcast(3.754408661907416e+00));
  td = B::fma(td, s, one);
  F tail = B::div(tn, td);  // value for the lower tail
  F signed_tail = B::select(B::lt(u, half), tail, B::neg(tail));

  typename B::M in_tail_lo = B::lt(u, plow);
  typename B::M in_tail_hi = B::lt(phigh, u);
  F res = B::select(in_tail_lo, signed_tail, central);
  res = B::select(in_tail_hi, signed_tail, res);
  return res;
}

template <class B>
typename B::F normal_draw(std::uint64_t key, typename B::U idx) {
  return norm_inv<B>(uniform_open<B>(key, idx));
}

}  // namespace defport::mc
