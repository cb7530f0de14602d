#pragma once

// Dense inner loops used by the networks, with a scalar reference path and an
// AVX2/FMA path chosen once at runtime. Both paths are instantiated for float
// (training) and double (gradient checks).

#include <cstddef>
#include <string_view>

namespace minav::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// True when the binary carries AVX2 code and the CPU reports AVX2 + FMA.
bool avx2_available();

/// ISA used by the dispatching entry points below. Defaults to the best
/// available; `MINAV_FORCE_SCALAR=1` in the environment pins the scalar path.
Isa active_isa();

/// Overrides the dispatch choice (tests, benchmarks). Requesting avx2 on a
/// machine without it falls back to scalar; the effective ISA is returned.
Isa set_active_isa(Isa isa);

struct AdamCoeffs {
    double lr;
    double beta1;
    double beta2;
    double eps;
    double bias_correction1;  // 1 / (1 - beta1^t)
    double bias_correction2;  // 1 / (1 - beta2^t)
};

template <typename T>
struct KernelTable {
    T (*dot)(const T* a, const T* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(T alpha, const T* x, T* y, std::size_t n);
    // dst = tau * src + (1 - tau) * dst
    void (*lerp)(T tau, const T* src, T* dst, std::size_t n);
    void (*adam)(T* param, const T* grad, T* m, T* v, std::size_t n, const AdamCoeffs& c);
    // Y[b, o] = bias[o] + sum_i X[b, i] * W[o, i]; X is rows x in, W is out x in.
    void (*linear_forward)(const T* x, const T* w, const T* bias, T* y, std::size_t rows,
                           std::size_t in, std::size_t out);
    // dX[b, i] = sum_o dY[b, o] * W[o, i]
    void (*linear_backward_input)(const T* dy, const T* w, T* dx, std::size_t rows,
                                  std::size_t in, std::size_t out);
    // dW[o, i] += sum_b dY[b, o] * X[b, i];  dbias[o] += sum_b dY[b, o]
    void (*linear_backward_weight)(const T* dy, const T* x, T* dw, T* dbias, std::size_t rows,
                                   std::size_t in, std::size_t out);
};

template <typename T>
const KernelTable<T>& table(Isa isa);
template <>
const KernelTable<float>& table<float>(Isa isa);
template <>
const KernelTable<double>& table<double>(Isa isa);

template <typename T>
const KernelTable<T>& active() {
    return table<T>(active_isa());
}

template <typename T>
inline T dot(const T* a, const T* b, std::size_t n) {
    return active<T>().dot(a, b, n);
}

template <typename T>
inline void axpy(T alpha, const T* x, T* y, std::size_t n) {
    active<T>().axpy(alpha, x, y, n);
}

}  // namespace minav::kernels
