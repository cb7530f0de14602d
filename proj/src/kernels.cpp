#include "minav/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "minav/kernels_scalar.hpp"

namespace minav::kernels {

namespace detail {
bool avx2_compiled();
const KernelTable<float>& avx2_table_f32();
const KernelTable<double>& avx2_table_f64();
}  // namespace detail

namespace {

template <typename T>
KernelTable<T> make_scalar_table() {
    return {&scalar::dot<T>,
            &scalar::axpy<T>,
            &scalar::lerp<T>,
            &scalar::adam<T>,
            &scalar::linear_forward<T>,
            &scalar::linear_backward_input<T>,
            &scalar::linear_backward_weight<T>};
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa initial_isa() {
    if (const char* env = std::getenv("MINAV_FORCE_SCALAR"); env && std::strcmp(env, "0") != 0) {
        return Isa::scalar;
    }
    return avx2_available() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& isa_slot() {
    static std::atomic<Isa> slot{initial_isa()};
    return slot;
}

}  // namespace

std::string_view to_string(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool avx2_available() {
    static const bool ok = detail::avx2_compiled() && cpu_has_avx2();
    return ok;
}

Isa active_isa() { return isa_slot().load(std::memory_order_relaxed); }

Isa set_active_isa(Isa isa) {
    if (isa == Isa::avx2 && !avx2_available()) isa = Isa::scalar;
    isa_slot().store(isa, std::memory_order_relaxed);
    return isa;
}

template <>
const KernelTable<float>& table<float>(Isa isa) {
    static const KernelTable<float> scalar_table = make_scalar_table<float>();
    return isa == Isa::avx2 && avx2_available() ? detail::avx2_table_f32() : scalar_table;
}

template <>
const KernelTable<double>& table<double>(Isa isa) {
    static const KernelTable<double> scalar_table = make_scalar_table<double>();
    return isa == Isa::avx2 && avx2_available() ? detail::avx2_table_f64() : scalar_table;
}

}  // namespace minav::kernels
