#pragma once

#include <cstddef>

// Internal dispatch table shared by the kernel translation units.

namespace desmqa::kernels::detail {

struct Vtable {
    double (*dot_f32)(const float*, const float*, std::size_t);
    double (*dot_f64)(const double*, const double*, std::size_t);
    double (*dot_f32_f64)(const float*, const double*, std::size_t);
    void (*axpy_f32)(float, const float*, float*, std::size_t);
    void (*add_div_f32_f64)(double, const float*, double*, std::size_t);
};

#if defined(__x86_64__) || defined(_M_X64)
extern const Vtable kAvx2;  // kernels_avx2.cpp
#endif
#if defined(__aarch64__)
extern const Vtable kNeon;  // kernels_neon.cpp
#endif

}  // namespace desmqa::kernels::detail
