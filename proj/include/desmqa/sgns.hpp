#pragma once

#include <cmath>
#include <cstddef>
#include <cstring>
#include <type_traits>

#include "desmqa/kernels.hpp"

// Skip-gram negative sampling objective for a single training step: one
// center word, one observed context word, k sampled negatives. Kept header-
// only and templated on the scalar type so the float path the trainer runs
// and the double path the finite-difference tests probe share one formula.
//
// Sigmoid and log-sigmoid are evaluated exactly (no lookup table, no input
// clipping); the loss is smooth in the inputs, which is what makes central
// finite differences agree with the analytic gradients to tight tolerance.

namespace desmqa::sgns {

inline double sigmoid(double x) {
    if (x >= 0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// log(sigmoid(x)), stable for large |x|.
inline double log_sigmoid(double x) {
    return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x));
}

template <class Real>
inline double dot(const Real* a, const Real* b, std::size_t dim) {
    if constexpr (std::is_same_v<Real, float>) {
        return kernels::dot_f32(a, b, dim);
    } else {
        return kernels::dot_f64(a, b, dim);
    }
}

// Loss of one step:
//   L = -log sigmoid(center.pos) - sum_k log sigmoid(-center.neg_k)
template <class Real>
double pair_loss(const Real* center, const Real* pos, const Real* const* negs,
                 std::size_t n_negs, std::size_t dim) {
    double loss = -log_sigmoid(dot(center, pos, dim));
    for (std::size_t k = 0; k < n_negs; ++k) {
        loss -= log_sigmoid(-dot(center, negs[k], dim));
    }
    return loss;
}

// Same loss, also writing the analytic gradients:
//   dL/dpos    = (sigmoid(s_pos) - 1) * center
//   dL/dneg_k  =  sigmoid(s_k)       * center
//   dL/dcenter = (sigmoid(s_pos) - 1) * pos + sum_k sigmoid(s_k) * neg_k
// d_negs may repeat rows; each slot gets the gradient of its own term.
template <class Real>
double pair_loss_and_grads(const Real* center, const Real* pos,
                           const Real* const* negs, std::size_t n_negs,
                           std::size_t dim, Real* d_center, Real* d_pos,
                           Real* const* d_negs) {
    const auto scale_into = [dim](Real coef, const Real* src, Real* dst) {
        if constexpr (std::is_same_v<Real, float>) {
            std::memset(dst, 0, dim * sizeof(float));
            kernels::axpy_f32(coef, src, dst, dim);
        } else {
            for (std::size_t i = 0; i < dim; ++i) dst[i] = coef * src[i];
        }
    };
    const auto add_into = [dim](Real coef, const Real* src, Real* dst) {
        if constexpr (std::is_same_v<Real, float>) {
            kernels::axpy_f32(coef, src, dst, dim);
        } else {
            for (std::size_t i = 0; i < dim; ++i) dst[i] += coef * src[i];
        }
    };

    const double s_pos = dot(center, pos, dim);
    const Real coef_pos = Real(sigmoid(s_pos) - 1.0);
    double loss = -log_sigmoid(s_pos);
    scale_into(coef_pos, center, d_pos);
    scale_into(coef_pos, pos, d_center);
    for (std::size_t k = 0; k < n_negs; ++k) {
        const double s_neg = dot(center, negs[k], dim);
        const Real coef_neg = Real(sigmoid(s_neg));
        loss -= log_sigmoid(-s_neg);
        scale_into(coef_neg, center, d_negs[k]);
        add_into(coef_neg, negs[k], d_center);
    }
    return loss;
}

}  // namespace desmqa::sgns
