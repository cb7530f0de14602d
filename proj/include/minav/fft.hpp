#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace minav {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

/// In-place iterative radix-2 FFT. `inverse` applies the 1/n scaling.
/// Throws invalid-input when the length is not a power of two.
void fft_inplace(std::span<std::complex<double>> data, bool inverse);

}  // namespace minav
