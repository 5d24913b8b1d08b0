#pragma once

#include <cstddef>
#include <string>
#include <vector>

// Vector kernels behind the embedding trainer and the DESM scorer.
//
// Every kernel has a scalar reference implementation plus SIMD variants
// (AVX2 on x86-64, NEON on aarch64) selected once at runtime. The
// element-wise kernels (axpy_f32, add_div_f32_f64) produce bit-identical
// results on every backend; the dot-product reductions accumulate in a
// different order per backend and agree within a few ULPs (see
// tests/test_kernels.cpp for the equivalence suite).
//
// Backend selection: auto-detected at first use, overridable with the
// DESMQA_KERNELS environment variable ("scalar", "avx2", "neon", "auto")
// or programmatically via set_backend().

namespace desmqa::kernels {

enum class Backend { scalar, avx2, neon };

const char* backend_name(Backend b);

// Backends usable on this CPU. Always contains Backend::scalar.
std::vector<Backend> supported_backends();

Backend active_backend();

// Switches the active backend. Returns false (and leaves the selection
// unchanged) if the CPU does not support it. Not thread-safe against
// in-flight kernel calls; switch before spawning workers.
bool set_backend(Backend b);

// Parses "scalar" / "avx2" / "neon" / "auto" and applies it.
// Returns false on an unknown name or unsupported backend.
bool select_backend_by_name(const std::string& name);

// sum(a[i] * b[i]), accumulated in double.
double dot_f32(const float* a, const float* b, std::size_t n);

// sum(a[i] * b[i]) over doubles.
double dot_f64(const double* a, const double* b, std::size_t n);

// sum(a[i] * b[i]) with f32 a widened into the f64 accumulation; the form
// the scorer uses to compare embedding rows against f64 centroids.
double dot_f32_f64(const float* a, const double* b, std::size_t n);

// y[i] += a * x[i]  (bit-identical across backends)
void axpy_f32(float a, const float* x, float* y, std::size_t n);

// acc[i] += x[i] / d, widening f32 input into a f64 accumulator
// (bit-identical across backends). Division rather than multiplication by
// a precomputed reciprocal: the quotient rounds once, so a row divided by
// its own norm yields exactly +/-1 components when the row is axis-aligned,
// and oppositely-signed rows cancel to an exact zero centroid.
void add_div_f32_f64(double d, const float* x, double* acc, std::size_t n);

}  // namespace desmqa::kernels
