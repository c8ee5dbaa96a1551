#pragma once

// Four-lane double exp/log for AVX2+FMA. Cephes-style range reduction and
// rational approximations; close to 1 ulp on the ranges the kernels use.
// Only include from translation units compiled with -mavx2 -mfma.

#include <immintrin.h>

namespace cne::kernels::avx2 {

/// exp for x in [-708, 708] (the caller clamps).
inline __m256d exp_pd(__m256d x) {
  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634073599)),
                                     _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(6.93145751953125E-1), x);
  x = _mm256_fnmadd_pd(fx, _mm256_set1_pd(1.42860682030941723212E-6), x);
  const __m256d xx = _mm256_mul_pd(x, x);

  __m256d px = _mm256_fmadd_pd(_mm256_set1_pd(1.26177193074810590878E-4), xx,
                               _mm256_set1_pd(3.02994407707441961300E-2));
  px = _mm256_fmadd_pd(px, xx, _mm256_set1_pd(9.99999999999999999910E-1));
  px = _mm256_mul_pd(px, x);

  __m256d qx = _mm256_fmadd_pd(_mm256_set1_pd(3.00198505138664455042E-6), xx,
                               _mm256_set1_pd(2.52448340349684104192E-3));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.27265548208155028766E-1));
  qx = _mm256_fmadd_pd(qx, xx, _mm256_set1_pd(2.00000000000000000009E0));

  __m256d r = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  r = _mm256_fmadd_pd(_mm256_set1_pd(2.0), r, _mm256_set1_pd(1.0));

  // Scale by 2^fx through the exponent field; |fx| <= 1022 keeps it normal.
  const __m128i n32 = _mm256_cvtpd_epi32(fx);
  __m256i n64 = _mm256_cvtepi32_epi64(n32);
  n64 = _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(r, _mm256_castsi256_pd(n64));
}

/// Natural log for positive, normal x.
inline __m256d log_pd(__m256d x) {
  const __m256i bits = _mm256_castpd_si256(x);

  // Exponent field to double via the 2^52 magic constant.
  const __m256i ebits = _mm256_srli_epi64(bits, 52);
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);
  __m256d e = _mm256_sub_pd(
      _mm256_castsi256_pd(_mm256_or_si256(ebits, _mm256_castpd_si256(magic))), magic);
  e = _mm256_sub_pd(e, _mm256_set1_pd(1022.0));

  // Mantissa in [0.5, 1).
  const __m256i mant_mask = _mm256_set1_epi64x(0x000FFFFFFFFFFFFFLL);
  const __m256i half_bits = _mm256_set1_epi64x(0x3FE0000000000000LL);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, mant_mask), half_bits));

  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d small = _mm256_cmp_pd(m, _mm256_set1_pd(0.70710678118654752440), _CMP_LT_OQ);
  e = _mm256_sub_pd(e, _mm256_and_pd(small, one));
  m = _mm256_sub_pd(_mm256_add_pd(m, _mm256_and_pd(small, m)), one);

  const __m256d z = _mm256_mul_pd(m, m);

  __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(1.01875663804580931796E-4), m,
                              _mm256_set1_pd(4.97494994976747001425E-1));
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(4.70579119878881725854E0));
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(1.44989225341610930846E1));
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(1.79368678507819816313E1));
  p = _mm256_fmadd_pd(p, m, _mm256_set1_pd(7.70838733755885391666E0));

  __m256d q = _mm256_add_pd(m, _mm256_set1_pd(1.12873587189167450590E1));
  q = _mm256_fmadd_pd(q, m, _mm256_set1_pd(4.52279145837532221105E1));
  q = _mm256_fmadd_pd(q, m, _mm256_set1_pd(8.29875266912776603211E1));
  q = _mm256_fmadd_pd(q, m, _mm256_set1_pd(7.11544750618563894466E1));
  q = _mm256_fmadd_pd(q, m, _mm256_set1_pd(2.31251620126765340583E1));

  __m256d y = _mm256_mul_pd(m, _mm256_div_pd(_mm256_mul_pd(z, p), q));
  y = _mm256_fnmadd_pd(e, _mm256_set1_pd(2.121944400546905827679e-4), y);
  y = _mm256_fnmadd_pd(_mm256_set1_pd(0.5), z, y);
  __m256d r = _mm256_add_pd(m, y);
  return _mm256_fmadd_pd(e, _mm256_set1_pd(0.693359375), r);
}

/// Lane sum in a fixed order.
inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace cne::kernels::avx2
