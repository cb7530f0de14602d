#pragma once

// Reference implementations. The AVX2 variants are tested against these.

#include <cmath>
#include <cstddef>

#include "minav/kernels.hpp"

namespace minav::kernels::scalar {

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
    T acc = 0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void lerp(T tau, const T* src, T* dst, std::size_t n) {
    const T keep = T(1) - tau;
    for (std::size_t i = 0; i < n; ++i) dst[i] = tau * src[i] + keep * dst[i];
}

template <typename T>
void adam(T* param, const T* grad, T* m, T* v, std::size_t n, const AdamCoeffs& c) {
    const T b1 = T(c.beta1), b2 = T(c.beta2);
    const T step = T(c.lr * c.bias_correction1);
    const T bc2 = T(c.bias_correction2);
    const T eps = T(c.eps);
    for (std::size_t i = 0; i < n; ++i) {
        m[i] = b1 * m[i] + (T(1) - b1) * grad[i];
        v[i] = b2 * v[i] + (T(1) - b2) * grad[i] * grad[i];
        param[i] -= step * m[i] / (std::sqrt(v[i] * bc2) + eps);
    }
}

template <typename T>
void linear_forward(const T* x, const T* w, const T* bias, T* y, std::size_t rows,
                    std::size_t in, std::size_t out) {
    for (std::size_t b = 0; b < rows; ++b) {
        for (std::size_t o = 0; o < out; ++o) {
            y[b * out + o] = bias[o] + dot(x + b * in, w + o * in, in);
        }
    }
}

template <typename T>
void linear_backward_input(const T* dy, const T* w, T* dx, std::size_t rows, std::size_t in,
                           std::size_t out) {
    for (std::size_t b = 0; b < rows; ++b) {
        T* row = dx + b * in;
        for (std::size_t i = 0; i < in; ++i) row[i] = 0;
        for (std::size_t o = 0; o < out; ++o) axpy(dy[b * out + o], w + o * in, row, in);
    }
}

template <typename T>
void linear_backward_weight(const T* dy, const T* x, T* dw, T* dbias, std::size_t rows,
                            std::size_t in, std::size_t out) {
    for (std::size_t o = 0; o < out; ++o) {
        T* wrow = dw + o * in;
        T bsum = 0;
        for (std::size_t b = 0; b < rows; ++b) {
            const T g = dy[b * out + o];
            bsum += g;
            axpy(g, x + b * in, wrow, in);
        }
        dbias[o] += bsum;
    }
}

}  // namespace minav::kernels::scalar
