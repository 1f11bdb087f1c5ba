// Copyright 2026 The pnr-scope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// AVX2+FMA lane of the grid kernels. Four doubles per vector; remainders fall
// back to the scalar reference so the two lanes always cover the same inputs.

#include <immintrin.h>

#include <cmath>
#include <vector>

#include "kernels_detail.hpp"
#include "pnr/kernels.hpp"

namespace pnr::kernels::detail {
namespace {

constexpr double kPiHi = 3.14159265358979311600e+00;
constexpr double kPiLo = 1.22464679914735320717e-16;

inline __m256d abs_pd(__m256d v) {
    return _mm256_andnot_pd(_mm256_set1_pd(-0.0), v);
}

// exp(x) for x in [-708, 709]; inputs below -708 flush to +0.
inline __m256d vexp(__m256d x) {
    const __m256d log2e = _mm256_set1_pd(1.4426950408889634074);
    const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
    const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);

    const __m256d underflow = _mm256_cmp_pd(x, _mm256_set1_pd(-708.0), _CMP_LT_OQ);
    __m256d xc = _mm256_min_pd(x, _mm256_set1_pd(709.0));
    xc = _mm256_max_pd(xc, _mm256_set1_pd(-708.0));

    const __m256d n = _mm256_round_pd(_mm256_mul_pd(xc, log2e),
                                      _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    __m256d r = _mm256_fnmadd_pd(n, ln2_hi, xc);
    r = _mm256_fnmadd_pd(n, ln2_lo, r);

    // Taylor polynomial of exp on |r| <= ln2/2, degree 13.
    __m256d p = _mm256_set1_pd(1.6059043836821613e-10);  // 1/13!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.08767569878681e-09));   // 1/12!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.505210838544172e-08));  // 1/11!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.7557319223985893e-07)); // 1/10!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.755731922398589e-06));  // 1/9!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(2.48015873015873e-05));   // 1/8!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.984126984126984e-04));  // 1/7!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.388888888888889e-03));  // 1/6!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(8.333333333333333e-03));  // 1/5!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(4.166666666666666e-02));  // 1/4!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.666666666666667e-01));  // 1/3!
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(5.0e-01));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));
    p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(1.0));

    // Scale by 2^n through the exponent bits (n in [-1022, 1024] here).
    const __m128i n32 = _mm256_cvtpd_epi32(n);
    const __m256i n64 = _mm256_cvtepi32_epi64(n32);
    const __m256i bits =
        _mm256_slli_epi64(_mm256_add_epi64(n64, _mm256_set1_epi64x(1023)), 52);
    const __m256d result = _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
    return _mm256_andnot_pd(underflow, result);
}

// sinc^2(u) with the same argument reduction as the scalar kernel: the
// integer part of u is subtracted exactly, so nulls stay exact.
inline __m256d vsinc2(__m256d u) {
    const __m256d q = _mm256_round_pd(u, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
    const __m256d r = _mm256_sub_pd(u, q);
    const __m256d z = _mm256_fmadd_pd(r, _mm256_set1_pd(kPiHi),
                                      _mm256_mul_pd(r, _mm256_set1_pd(kPiLo)));
    const __m256d w = _mm256_mul_pd(z, z);

    // Odd Taylor polynomial of sin on |z| <= pi/2.
    __m256d p = _mm256_set1_pd(-8.2206352466243295e-18);                 // -1/19!
    p = _mm256_fmadd_pd(p, w, _mm256_set1_pd(2.8114572543455206e-15));   // 1/17!
    p = _mm256_fmadd_pd(p, w, _mm256_set1_pd(-7.6471637318198164e-13));  // -1/15!
    p = _mm256_fmadd_pd(p, w, _mm256_set1_pd(1.6059043836821613e-10));   // 1/13!
    p = _mm256_fmadd_pd(p, w, _mm256_set1_pd(-2.5052108385441720e-08));  // -1/11!
    p = _mm256_fmadd_pd(p, w, _mm256_set1_pd(2.7557319223985893e-06));   // 1/9!
    p = _mm256_fmadd_pd(p, w, _mm256_set1_pd(-1.9841269841269841e-04));  // -1/7!
    p = _mm256_fmadd_pd(p, w, _mm256_set1_pd(8.3333333333333333e-03));   // 1/5!
    p = _mm256_fmadd_pd(p, w, _mm256_set1_pd(-1.6666666666666667e-01));  // -1/3!
    __m256d s = _mm256_fmadd_pd(_mm256_mul_pd(z, w), p, z);

    // Negate where round(u) is odd: frac(q/2) is exactly 0.0 or 0.5.
    const __m256d half = _mm256_mul_pd(q, _mm256_set1_pd(0.5));
    const __m256d frac = _mm256_sub_pd(half, _mm256_floor_pd(half));
    const __m256d odd = _mm256_cmp_pd(frac, _mm256_set1_pd(0.5), _CMP_EQ_OQ);
    s = _mm256_xor_pd(s, _mm256_and_pd(odd, _mm256_set1_pd(-0.0)));

    const __m256d denom = _mm256_mul_pd(u, _mm256_set1_pd(kPiHi));
    const __m256d v = _mm256_div_pd(s, denom);
    __m256d out = _mm256_mul_pd(v, v);

    // Small-|u| series and huge-|u| flush, matching the scalar kernel.
    const __m256d au = abs_pd(u);
    const __m256d zz = _mm256_mul_pd(u, _mm256_set1_pd(kPiHi));
    const __m256d g = _mm256_fnmadd_pd(_mm256_mul_pd(zz, zz),
                                       _mm256_set1_pd(1.0 / 6.0), _mm256_set1_pd(1.0));
    const __m256d small_val = _mm256_mul_pd(g, g);
    const __m256d small = _mm256_cmp_pd(au, _mm256_set1_pd(1e-8), _CMP_LT_OQ);
    out = _mm256_blendv_pd(out, small_val, small);
    const __m256d big = _mm256_cmp_pd(au, _mm256_set1_pd(1e15), _CMP_GT_OQ);
    return _mm256_andnot_pd(big, out);
}

}  // namespace

void gaussian_grid_avx2(std::span<const double> x, double waist, std::span<double> out) {
    const double a = -2.0 / (waist * waist);
    const __m256d av = _mm256_set1_pd(a);
    const size_t n = x.size();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d xv = _mm256_loadu_pd(x.data() + i);
        const __m256d arg = _mm256_mul_pd(av, _mm256_mul_pd(xv, xv));
        _mm256_storeu_pd(out.data() + i, vexp(arg));
    }
    for (; i < n; ++i) {
        out[i] = std::exp(a * x[i] * x[i]);
    }
}

void slit_sinc2_grid_avx2(std::span<const double> x, double u_per_m,
                          std::span<double> out) {
    const __m256d cv = _mm256_set1_pd(u_per_m);
    const size_t n = x.size();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d u = _mm256_mul_pd(_mm256_loadu_pd(x.data() + i), cv);
        _mm256_storeu_pd(out.data() + i, vsinc2(u));
    }
    for (; i < n; ++i) {
        out[i] = sinc2(x[i] * u_per_m);
    }
}

void beamsplitter_grid_avx2(std::span<const double> source_pmf, int k,
                            std::span<const double> t2, std::span<double> out) {
    const int j_max = static_cast<int>(source_pmf.size()) - 1;
    const size_t n = t2.size();
    if (k > j_max) {
        for (size_t i = 0; i < n; ++i) out[i] = 0.0;
        return;
    }

    std::vector<double> ratio(j_max + 1, 0.0);
    for (int j = k + 1; j <= j_max; ++j) {
        ratio[j] = static_cast<double>(j) / static_cast<double>(j - k);
    }

    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d t = _mm256_loadu_pd(t2.data() + i);
        const __m256d om = _mm256_sub_pd(_mm256_set1_pd(1.0), t);

        // c = t^k by squaring, mirroring the scalar multiply sequence.
        __m256d c = _mm256_set1_pd(1.0);
        __m256d b = t;
        int e = k;
        while (e > 0) {
            if (e & 1) c = _mm256_mul_pd(c, b);
            b = _mm256_mul_pd(b, b);
            e >>= 1;
        }

        __m256d acc = _mm256_mul_pd(_mm256_set1_pd(source_pmf[k]), c);
        for (int j = k + 1; j <= j_max; ++j) {
            c = _mm256_mul_pd(c, _mm256_mul_pd(om, _mm256_set1_pd(ratio[j])));
            acc = _mm256_fmadd_pd(_mm256_set1_pd(source_pmf[j]), c, acc);
        }
        _mm256_storeu_pd(out.data() + i, acc);
    }
    for (; i < n; ++i) {
        out[i] = beamsplitter_point(source_pmf, k, t2[i]);
    }
}

}  // namespace pnr::kernels::detail
