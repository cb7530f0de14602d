#include "minav/kernels.hpp"
#include "minav/kernels_scalar.hpp"

#if defined(MINAV_BUILD_AVX2)
#include <immintrin.h>
#endif

namespace minav::kernels {

#if defined(MINAV_BUILD_AVX2)

namespace {

template <typename T>
struct Simd;

template <>
struct Simd<float> {
    using reg = __m256;
    static constexpr std::size_t width = 8;
    static reg zero() { return _mm256_setzero_ps(); }
    static reg set1(float v) { return _mm256_set1_ps(v); }
    static reg load(const float* p) { return _mm256_loadu_ps(p); }
    static void store(float* p, reg v) { _mm256_storeu_ps(p, v); }
    static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_ps(a, b, c); }
    static reg add(reg a, reg b) { return _mm256_add_ps(a, b); }
    static reg mul(reg a, reg b) { return _mm256_mul_ps(a, b); }
    static reg div(reg a, reg b) { return _mm256_div_ps(a, b); }
    static reg sqrt(reg a) { return _mm256_sqrt_ps(a); }
    static float hsum(reg v) {
        __m128 lo = _mm256_castps256_ps128(v);
        __m128 hi = _mm256_extractf128_ps(v, 1);
        lo = _mm_add_ps(lo, hi);
        __m128 shuf = _mm_movehdup_ps(lo);
        __m128 sums = _mm_add_ps(lo, shuf);
        shuf = _mm_movehl_ps(shuf, sums);
        sums = _mm_add_ss(sums, shuf);
        return _mm_cvtss_f32(sums);
    }
};

template <>
struct Simd<double> {
    using reg = __m256d;
    static constexpr std::size_t width = 4;
    static reg zero() { return _mm256_setzero_pd(); }
    static reg set1(double v) { return _mm256_set1_pd(v); }
    static reg load(const double* p) { return _mm256_loadu_pd(p); }
    static void store(double* p, reg v) { _mm256_storeu_pd(p, v); }
    static reg fmadd(reg a, reg b, reg c) { return _mm256_fmadd_pd(a, b, c); }
    static reg add(reg a, reg b) { return _mm256_add_pd(a, b); }
    static reg mul(reg a, reg b) { return _mm256_mul_pd(a, b); }
    static reg div(reg a, reg b) { return _mm256_div_pd(a, b); }
    static reg sqrt(reg a) { return _mm256_sqrt_pd(a); }
    static double hsum(reg v) {
        __m128d lo = _mm256_castpd256_pd128(v);
        __m128d hi = _mm256_extractf128_pd(v, 1);
        lo = _mm_add_pd(lo, hi);
        __m128d high64 = _mm_unpackhi_pd(lo, lo);
        return _mm_cvtsd_f64(_mm_add_sd(lo, high64));
    }
};

template <typename T>
T dot(const T* a, const T* b, std::size_t n) {
    using S = Simd<T>;
    constexpr std::size_t w = S::width;
    auto acc0 = S::zero(), acc1 = S::zero();
    std::size_t i = 0;
    for (; i + 2 * w <= n; i += 2 * w) {
        acc0 = S::fmadd(S::load(a + i), S::load(b + i), acc0);
        acc1 = S::fmadd(S::load(a + i + w), S::load(b + i + w), acc1);
    }
    for (; i + w <= n; i += w) acc0 = S::fmadd(S::load(a + i), S::load(b + i), acc0);
    T acc = S::hsum(S::add(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

template <typename T>
void axpy(T alpha, const T* x, T* y, std::size_t n) {
    using S = Simd<T>;
    constexpr std::size_t w = S::width;
    const auto va = S::set1(alpha);
    std::size_t i = 0;
    for (; i + w <= n; i += w) S::store(y + i, S::fmadd(va, S::load(x + i), S::load(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void lerp(T tau, const T* src, T* dst, std::size_t n) {
    using S = Simd<T>;
    constexpr std::size_t w = S::width;
    const T keep = T(1) - tau;
    const auto vt = S::set1(tau), vk = S::set1(keep);
    std::size_t i = 0;
    for (; i + w <= n; i += w) {
        S::store(dst + i, S::fmadd(vt, S::load(src + i), S::mul(vk, S::load(dst + i))));
    }
    for (; i < n; ++i) dst[i] = tau * src[i] + keep * dst[i];
}

template <typename T>
void adam(T* param, const T* grad, T* m, T* v, std::size_t n, const AdamCoeffs& c) {
    using S = Simd<T>;
    constexpr std::size_t w = S::width;
    const T b1 = T(c.beta1), b2 = T(c.beta2);
    const T step = T(c.lr * c.bias_correction1);
    const T bc2 = T(c.bias_correction2);
    const T eps = T(c.eps);
    const auto vb1 = S::set1(b1), vb2 = S::set1(b2);
    const auto v1b1 = S::set1(T(1) - b1), v1b2 = S::set1(T(1) - b2);
    const auto vstep = S::set1(-step), vbc2 = S::set1(bc2), veps = S::set1(eps);
    std::size_t i = 0;
    for (; i + w <= n; i += w) {
        const auto g = S::load(grad + i);
        const auto mm = S::fmadd(vb1, S::load(m + i), S::mul(v1b1, g));
        const auto vv = S::fmadd(vb2, S::load(v + i), S::mul(v1b2, S::mul(g, g)));
        S::store(m + i, mm);
        S::store(v + i, vv);
        const auto denom = S::add(S::sqrt(S::mul(vv, vbc2)), veps);
        S::store(param + i, S::fmadd(vstep, S::div(mm, denom), S::load(param + i)));
    }
    if (i < n) {
        scalar::adam(param + i, grad + i, m + i, v + i, n - i, c);
    }
}

template <typename T>
void linear_forward_row(const T* xr, const T* wt, const T* bias, T* yr, std::size_t in,
                        std::size_t out) {
    using S = Simd<T>;
    constexpr std::size_t w = S::width;
    std::size_t o = 0;
    for (; o + 4 <= out; o += 4) {
        const T* w0 = wt + (o + 0) * in;
        const T* w1 = wt + (o + 1) * in;
        const T* w2 = wt + (o + 2) * in;
        const T* w3 = wt + (o + 3) * in;
        auto a0 = S::zero(), a1 = S::zero(), a2 = S::zero(), a3 = S::zero();
        std::size_t i = 0;
        for (; i + w <= in; i += w) {
            const auto xv = S::load(xr + i);
            a0 = S::fmadd(S::load(w0 + i), xv, a0);
            a1 = S::fmadd(S::load(w1 + i), xv, a1);
            a2 = S::fmadd(S::load(w2 + i), xv, a2);
            a3 = S::fmadd(S::load(w3 + i), xv, a3);
        }
        T s0 = S::hsum(a0), s1 = S::hsum(a1), s2 = S::hsum(a2), s3 = S::hsum(a3);
        for (; i < in; ++i) {
            s0 += w0[i] * xr[i];
            s1 += w1[i] * xr[i];
            s2 += w2[i] * xr[i];
            s3 += w3[i] * xr[i];
        }
        yr[o + 0] = bias[o + 0] + s0;
        yr[o + 1] = bias[o + 1] + s1;
        yr[o + 2] = bias[o + 2] + s2;
        yr[o + 3] = bias[o + 3] + s3;
    }
    for (; o < out; ++o) yr[o] = bias[o] + dot(xr, wt + o * in, in);
}

template <typename T>
void linear_forward(const T* x, const T* wt, const T* bias, T* y, std::size_t rows,
                    std::size_t in, std::size_t out) {
    using S = Simd<T>;
    constexpr std::size_t w = S::width;
    std::size_t b = 0;
    // Two rows x four outputs per block: every weight load feeds two FMAs.
    for (; b + 2 <= rows; b += 2) {
        const T* xa = x + b * in;
        const T* xb = xa + in;
        T* ya = y + b * out;
        T* yb = ya + out;
        std::size_t o = 0;
        for (; o + 4 <= out; o += 4) {
            const T* w0 = wt + (o + 0) * in;
            const T* w1 = wt + (o + 1) * in;
            const T* w2 = wt + (o + 2) * in;
            const T* w3 = wt + (o + 3) * in;
            auto a0 = S::zero(), a1 = S::zero(), a2 = S::zero(), a3 = S::zero();
            auto b0 = S::zero(), b1 = S::zero(), b2 = S::zero(), b3 = S::zero();
            std::size_t i = 0;
            for (; i + w <= in; i += w) {
                const auto xv = S::load(xa + i), xu = S::load(xb + i);
                const auto v0 = S::load(w0 + i), v1 = S::load(w1 + i);
                const auto v2 = S::load(w2 + i), v3 = S::load(w3 + i);
                a0 = S::fmadd(v0, xv, a0);
                a1 = S::fmadd(v1, xv, a1);
                a2 = S::fmadd(v2, xv, a2);
                a3 = S::fmadd(v3, xv, a3);
                b0 = S::fmadd(v0, xu, b0);
                b1 = S::fmadd(v1, xu, b1);
                b2 = S::fmadd(v2, xu, b2);
                b3 = S::fmadd(v3, xu, b3);
            }
            T s[8] = {S::hsum(a0), S::hsum(a1), S::hsum(a2), S::hsum(a3),
                      S::hsum(b0), S::hsum(b1), S::hsum(b2), S::hsum(b3)};
            for (; i < in; ++i) {
                s[0] += w0[i] * xa[i];
                s[1] += w1[i] * xa[i];
                s[2] += w2[i] * xa[i];
                s[3] += w3[i] * xa[i];
                s[4] += w0[i] * xb[i];
                s[5] += w1[i] * xb[i];
                s[6] += w2[i] * xb[i];
                s[7] += w3[i] * xb[i];
            }
            for (std::size_t k = 0; k < 4; ++k) {
                ya[o + k] = bias[o + k] + s[k];
                yb[o + k] = bias[o + k] + s[4 + k];
            }
        }
        for (; o < out; ++o) {
            ya[o] = bias[o] + dot(xa, wt + o * in, in);
            yb[o] = bias[o] + dot(xb, wt + o * in, in);
        }
    }
    for (; b < rows; ++b) linear_forward_row(x + b * in, wt, bias, y + b * out, in, out);
}

template <typename T>
void linear_backward_input(const T* dy, const T* wt, T* dx, std::size_t rows, std::size_t in,
                           std::size_t out) {
    using S = Simd<T>;
    constexpr std::size_t w = S::width;
    for (std::size_t b = 0; b < rows; ++b) {
        T* row = dx + b * in;
        const T* g = dy + b * out;
        for (std::size_t i = 0; i < in; ++i) row[i] = 0;
        // Four weight rows per pass so each dx load/store serves four outputs.
        std::size_t o = 0;
        for (; o + 4 <= out; o += 4) {
            const T* w0 = wt + (o + 0) * in;
            const T* w1 = wt + (o + 1) * in;
            const T* w2 = wt + (o + 2) * in;
            const T* w3 = wt + (o + 3) * in;
            const auto g0 = S::set1(g[o]), g1 = S::set1(g[o + 1]), g2 = S::set1(g[o + 2]),
                       g3 = S::set1(g[o + 3]);
            std::size_t i = 0;
            for (; i + w <= in; i += w) {
                auto acc = S::load(row + i);
                acc = S::fmadd(g0, S::load(w0 + i), acc);
                acc = S::fmadd(g1, S::load(w1 + i), acc);
                acc = S::fmadd(g2, S::load(w2 + i), acc);
                acc = S::fmadd(g3, S::load(w3 + i), acc);
                S::store(row + i, acc);
            }
            for (; i < in; ++i) row[i] += g[o] * w0[i] + g[o + 1] * w1[i] + g[o + 2] * w2[i] + g[o + 3] * w3[i];
        }
        for (; o < out; ++o) axpy(g[o], wt + o * in, row, in);
    }
}

template <typename T>
void linear_backward_weight(const T* dy, const T* x, T* dw, T* dbias, std::size_t rows,
                            std::size_t in, std::size_t out) {
    using S = Simd<T>;
    constexpr std::size_t w = S::width;
    for (std::size_t o = 0; o < out; ++o) {
        T* wrow = dw + o * in;
        T bsum = 0;
        std::size_t b = 0;
        // Four samples per pass over the gradient row.
        for (; b + 4 <= rows; b += 4) {
            const T c0 = dy[(b + 0) * out + o], c1 = dy[(b + 1) * out + o];
            const T c2 = dy[(b + 2) * out + o], c3 = dy[(b + 3) * out + o];
            bsum += c0 + c1 + c2 + c3;
            if (c0 == T(0) && c1 == T(0) && c2 == T(0) && c3 == T(0)) continue;
            const T* x0 = x + (b + 0) * in;
            const T* x1 = x + (b + 1) * in;
            const T* x2 = x + (b + 2) * in;
            const T* x3 = x + (b + 3) * in;
            const auto v0 = S::set1(c0), v1 = S::set1(c1), v2 = S::set1(c2), v3 = S::set1(c3);
            std::size_t i = 0;
            for (; i + w <= in; i += w) {
                auto acc = S::load(wrow + i);
                acc = S::fmadd(v0, S::load(x0 + i), acc);
                acc = S::fmadd(v1, S::load(x1 + i), acc);
                acc = S::fmadd(v2, S::load(x2 + i), acc);
                acc = S::fmadd(v3, S::load(x3 + i), acc);
                S::store(wrow + i, acc);
            }
            for (; i < in; ++i) wrow[i] += c0 * x0[i] + c1 * x1[i] + c2 * x2[i] + c3 * x3[i];
        }
        for (; b < rows; ++b) {
            const T g = dy[b * out + o];
            bsum += g;
            if (g != T(0)) axpy(g, x + b * in, wrow, in);
        }
        dbias[o] += bsum;
    }
}

template <typename T>
KernelTable<T> make_table() {
    return {&dot<T>,
            &axpy<T>,
            &lerp<T>,
            &adam<T>,
            &linear_forward<T>,
            &linear_backward_input<T>,
            &linear_backward_weight<T>};
}

}  // namespace

namespace detail {
bool avx2_compiled() { return true; }
const KernelTable<float>& avx2_table_f32() {
    static const KernelTable<float> t = make_table<float>();
    return t;
}
const KernelTable<double>& avx2_table_f64() {
    static const KernelTable<double> t = make_table<double>();
    return t;
}
}  // namespace detail

#else  // !MINAV_BUILD_AVX2

namespace detail {
bool avx2_compiled() { return false; }
const KernelTable<float>& avx2_table_f32() { return table<float>(Isa::scalar); }
const KernelTable<double>& avx2_table_f64() { return table<double>(Isa::scalar); }
}  // namespace detail

#endif

}  // namespace minav::kernels
