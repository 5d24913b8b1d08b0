#include "desmqa/kernels.hpp"

#include <atomic>
#include <cstdlib>

#include "kernels_impl.hpp"

namespace desmqa::kernels {

namespace detail {

namespace {

double dot_f32_scalar(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

double dot_f64_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

double dot_f32_f64_scalar(const float* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(a[i]) * b[i];
    return acc;
}

void axpy_f32_scalar(float a, const float* x, float* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void add_div_f32_f64_scalar(double d, const float* x, double* acc,
                            std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(x[i]) / d;
}

constexpr Vtable kScalar = {dot_f32_scalar, dot_f64_scalar, dot_f32_f64_scalar,
                            axpy_f32_scalar, add_div_f32_f64_scalar};

const Vtable* table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &kScalar;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            if (__builtin_cpu_supports("avx2")) return &kAvx2;
#endif
            return nullptr;
        case Backend::neon:
#if defined(__aarch64__)
            return &kNeon;
#else
            return nullptr;
#endif
    }
    return nullptr;
}

Backend detect_best() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2")) return Backend::avx2;
#elif defined(__aarch64__)
    return Backend::neon;
#endif
    return Backend::scalar;
}

struct Dispatch {
    std::atomic<const Vtable*> table;
    std::atomic<Backend> backend;

    Dispatch() {
        Backend b = detect_best();
        if (const char* env = std::getenv("DESMQA_KERNELS")) {
            std::string name(env);
            if (!name.empty() && name != "auto") {
                if (name == "scalar" && table_for(Backend::scalar))
                    b = Backend::scalar;
                else if (name == "avx2" && table_for(Backend::avx2))
                    b = Backend::avx2;
                else if (name == "neon" && table_for(Backend::neon))
                    b = Backend::neon;
            }
        }
        backend.store(b);
        table.store(table_for(b));
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

}  // namespace

}  // namespace detail

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "?";
}

std::vector<Backend> supported_backends() {
    std::vector<Backend> out{Backend::scalar};
    if (detail::table_for(Backend::avx2)) out.push_back(Backend::avx2);
    if (detail::table_for(Backend::neon)) out.push_back(Backend::neon);
    return out;
}

Backend active_backend() { return detail::dispatch().backend.load(); }

bool set_backend(Backend b) {
    const detail::Vtable* t = detail::table_for(b);
    if (!t) return false;
    detail::dispatch().backend.store(b);
    detail::dispatch().table.store(t);
    return true;
}

bool select_backend_by_name(const std::string& name) {
    if (name == "auto") return set_backend(detail::detect_best());
    if (name == "scalar") return set_backend(Backend::scalar);
    if (name == "avx2") return set_backend(Backend::avx2);
    if (name == "neon") return set_backend(Backend::neon);
    return false;
}

double dot_f32(const float* a, const float* b, std::size_t n) {
    return detail::dispatch().table.load()->dot_f32(a, b, n);
}

double dot_f64(const double* a, const double* b, std::size_t n) {
    return detail::dispatch().table.load()->dot_f64(a, b, n);
}

double dot_f32_f64(const float* a, const double* b, std::size_t n) {
    return detail::dispatch().table.load()->dot_f32_f64(a, b, n);
}

void axpy_f32(float a, const float* x, float* y, std::size_t n) {
    detail::dispatch().table.load()->axpy_f32(a, x, y, n);
}

void add_div_f32_f64(double d, const float* x, double* acc, std::size_t n) {
    detail::dispatch().table.load()->add_div_f32_f64(d, x, acc, n);
}

}  // namespace desmqa::kernels
