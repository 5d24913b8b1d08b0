// AVX2 kernel variants. This translation unit is the only one compiled
// with -mavx2; it is reached solely through the dispatch table after a
// runtime CPU check, so the rest of the build stays baseline-x86-64.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cstddef>

#include "kernels_impl.hpp"

namespace desmqa::kernels::detail {

namespace {

inline double hsum_pd(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swap = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double dot_f32_avx2(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 av = _mm256_loadu_ps(a + i);
        __m256 bv = _mm256_loadu_ps(b + i);
        __m256d alo = _mm256_cvtps_pd(_mm256_castps256_ps128(av));
        __m256d blo = _mm256_cvtps_pd(_mm256_castps256_ps128(bv));
        __m256d ahi = _mm256_cvtps_pd(_mm256_extractf128_ps(av, 1));
        __m256d bhi = _mm256_cvtps_pd(_mm256_extractf128_ps(bv, 1));
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(alo, blo));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(ahi, bhi));
    }
    double acc = hsum_pd(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i)
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

double dot_f64_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d av = _mm256_loadu_pd(a + i);
        __m256d bv = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(av, bv));
    }
    double out = hsum_pd(acc);
    for (; i < n; ++i) out += a[i] * b[i];
    return out;
}

double dot_f32_f64_avx2(const float* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d av = _mm256_cvtps_pd(_mm_loadu_ps(a + i));
        __m256d bv = _mm256_loadu_pd(b + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(av, bv));
    }
    double out = hsum_pd(acc);
    for (; i < n; ++i) out += static_cast<double>(a[i]) * b[i];
    return out;
}

// mul then add (no FMA) so each element rounds exactly like the scalar
// reference; the equivalence tests assert bit equality.
void axpy_f32_avx2(float a, const float* x, float* y, std::size_t n) {
    __m256 av = _mm256_set1_ps(a);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256 xv = _mm256_loadu_ps(x + i);
        __m256 yv = _mm256_loadu_ps(y + i);
        _mm256_storeu_ps(y + i, _mm256_add_ps(yv, _mm256_mul_ps(av, xv)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void add_div_f32_f64_avx2(double d, const float* x, double* acc,
                          std::size_t n) {
    __m256d dv = _mm256_set1_pd(d);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d xv = _mm256_cvtps_pd(_mm_loadu_ps(x + i));
        __m256d yv = _mm256_loadu_pd(acc + i);
        _mm256_storeu_pd(acc + i, _mm256_add_pd(yv, _mm256_div_pd(xv, dv)));
    }
    for (; i < n; ++i) acc[i] += static_cast<double>(x[i]) / d;
}

}  // namespace

const Vtable kAvx2 = {dot_f32_avx2, dot_f64_avx2, dot_f32_f64_avx2,
                      axpy_f32_avx2, add_div_f32_f64_avx2};

}  // namespace desmqa::kernels::detail

#endif  // x86-64
