//
// Copyright 2026 The dp-saddle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

// AVX2+FMA variants. This translation unit is the only one compiled with
// -mavx2 -mfma; nothing here may be called unless the dispatcher verified the
// CPU supports both.

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "dpsaddle/kernels.h"

namespace dpsaddle::kernels::avx2 {
namespace {

// Cephes exp: Padé form on |r| ≤ ln2/2 after Cody–Waite reduction.
constexpr double kLog2e = 1.4426950408889634074;
constexpr double kC1 = 6.93145751953125E-1;
constexpr double kC2 = 1.42860682030941723212E-6;
constexpr double kP0 = 1.26177193074810590878E-4;
constexpr double kP1 = 3.02994407707441961300E-2;
constexpr double kP2 = 9.99999999999999999910E-1;
constexpr double kQ0 = 3.00198505138664455042E-6;
constexpr double kQ1 = 2.52448340349684104192E-3;
constexpr double kQ2 = 2.27265548208155028766E-1;
constexpr double kQ3 = 2.00000000000000000009E0;

// 2^k for integral k in [-1022, 1023] held in a double lane.
inline __m256d Pow2(__m256d k) {
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);  // 2^52
  const __m256d biased = _mm256_add_pd(k, _mm256_set1_pd(1023.0));
  const __m256i bits =
      _mm256_slli_epi64(_mm256_castpd_si256(_mm256_add_pd(biased, magic)), 52);
  return _mm256_castsi256_pd(bits);
}

inline __m256d Exp(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-700.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);
  x = _mm256_min_pd(x, _mm256_set1_pd(709.0));

  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(kLog2e)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kC1), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(kC2), r);
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d p = _mm256_fmadd_pd(_mm256_set1_pd(kP0), rr, _mm256_set1_pd(kP1));
  p = _mm256_fmadd_pd(p, rr, _mm256_set1_pd(kP2));
  p = _mm256_mul_pd(p, r);
  __m256d q = _mm256_fmadd_pd(_mm256_set1_pd(kQ0), rr, _mm256_set1_pd(kQ1));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kQ2));
  q = _mm256_fmadd_pd(q, rr, _mm256_set1_pd(kQ3));

  const __m256d two = _mm256_set1_pd(2.0);
  __m256d e = _mm256_div_pd(_mm256_mul_pd(two, p), _mm256_sub_pd(q, p));
  e = _mm256_add_pd(e, _mm256_set1_pd(1.0));

  // Split the scale so neither factor leaves the normal range.
  const __m256d n1 = _mm256_floor_pd(_mm256_mul_pd(n, _mm256_set1_pd(0.5)));
  const __m256d n2 = _mm256_sub_pd(n, n1);
  e = _mm256_mul_pd(_mm256_mul_pd(e, Pow2(n1)), Pow2(n2));
  return _mm256_andnot_pd(underflow, e);
}

inline double HorizontalSum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

void ExpShifted(std::span<const double> a, double shift,
                std::span<double> out) {
  const std::size_t n = a.size();
  const __m256d vshift = _mm256_set1_pd(shift);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_sub_pd(_mm256_loadu_pd(a.data() + i), vshift);
    _mm256_storeu_pd(out.data() + i, Exp(x));
  }
  for (; i < n; ++i) {
    const double x = a[i] - shift;
    out[i] = x < -700.0 ? 0.0 : std::exp(x);
  }
}

MomentSums WeightedMoments(std::span<const double> weights,
                           std::span<const double> values, double center) {
  const std::size_t n = weights.size();
  const __m256d c = _mm256_set1_pd(center);
  const __m256d sign = _mm256_set1_pd(-0.0);
  __m256d s0 = _mm256_setzero_pd();
  __m256d s1 = _mm256_setzero_pd();
  __m256d s2 = _mm256_setzero_pd();
  __m256d s3 = _mm256_setzero_pd();
  __m256d s4 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d w = _mm256_loadu_pd(weights.data() + i);
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(values.data() + i), c);
    const __m256d wd = _mm256_mul_pd(w, d);
    const __m256d wd2 = _mm256_mul_pd(wd, d);
    s0 = _mm256_add_pd(s0, w);
    s1 = _mm256_add_pd(s1, wd);
    s2 = _mm256_add_pd(s2, wd2);
    s3 = _mm256_fmadd_pd(wd2, d, s3);
    s4 = _mm256_fmadd_pd(_mm256_mul_pd(wd2, d), d, s4);
    a3 = _mm256_fmadd_pd(wd2, _mm256_andnot_pd(sign, d), a3);
  }
  MomentSums m{HorizontalSum(s0), HorizontalSum(s1), HorizontalSum(s2),
               HorizontalSum(s3), HorizontalSum(s4), HorizontalSum(a3)};
  for (; i < n; ++i) {
    const double w = weights[i];
    const double d = values[i] - center;
    const double d2 = d * d;
    m.s0 += w;
    m.s1 += w * d;
    m.s2 += w * d2;
    m.s3 += w * d2 * d;
    m.s4 += w * d2 * d2;
    m.abs3 += w * d2 * std::abs(d);
  }
  return m;
}

}  // namespace dpsaddle::kernels::avx2
