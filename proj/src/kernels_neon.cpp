// NEON kernel variants for aarch64, reached through the runtime dispatch
// table. NEON is baseline on aarch64, so no CPU probe is needed.

#if defined(__aarch64__)

#include <arm_neon.h>

#include <cstddef>

#include "kernels_impl.hpp"

namespace desmqa::kernels::detail {

namespace {

double dot_f32_neon(const float* a, const float* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t av = vld1q_f32(a + i);
        float32x4_t bv = vld1q_f32(b + i);
        float64x2_t alo = vcvt_f64_f32(vget_low_f32(av));
        float64x2_t blo = vcvt_f64_f32(vget_low_f32(bv));
        float64x2_t ahi = vcvt_f64_f32(vget_high_f32(av));
        float64x2_t bhi = vcvt_f64_f32(vget_high_f32(bv));
        acc0 = vaddq_f64(acc0, vmulq_f64(alo, blo));
        acc1 = vaddq_f64(acc1, vmulq_f64(ahi, bhi));
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i)
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

double dot_f64_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    }
    double out = vaddvq_f64(acc);
    for (; i < n; ++i) out += a[i] * b[i];
    return out;
}

double dot_f32_f64_neon(const float* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t av = vcvt_f64_f32(vld1_f32(a + i));
        acc = vaddq_f64(acc, vmulq_f64(av, vld1q_f64(b + i)));
    }
    double out = vaddvq_f64(acc);
    for (; i < n; ++i) out += static_cast<double>(a[i]) * b[i];
    return out;
}

// mul then add (no fused multiply-add) to round exactly like the scalar
// reference; the equivalence tests assert bit equality.
void axpy_f32_neon(float a, const float* x, float* y, std::size_t n) {
    float32x4_t av = vdupq_n_f32(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        float32x4_t xv = vld1q_f32(x + i);
        float32x4_t yv = vld1q_f32(y + i);
        vst1q_f32(y + i, vaddq_f32(yv, vmulq_f32(av, xv)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void add_div_f32_f64_neon(double d, const float* x, double* acc,
                          std::size_t n) {
    float64x2_t dv = vdupq_n_f64(d);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t xv = vcvt_f64_f32(vld1_f32(x + i));
        float64x2_t yv = vld1q_f64(acc + i);
        vst1q_f64(acc + i, vaddq_f64(yv, vdivq_f64(xv, dv)));
    }
    for (; i < n; ++i) acc[i] += static_cast<double>(x[i]) / d;
}

}  // namespace

const Vtable kNeon = {dot_f32_neon, dot_f64_neon, dot_f32_f64_neon,
                      axpy_f32_neon, add_div_f32_f64_neon};

}  // namespace desmqa::kernels::detail

#endif  // aarch64
