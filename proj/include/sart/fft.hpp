#pragma once

#include <complex>
#include <cstddef>

namespace sart::fft {

using cplx = std::complex<double>;

// Unnormalised in-place DFT of `howmany` lines of length n. Element k of line
// m lives at data[m*dist + k*stride]. sign = -1 gives sum x_k e^{-2 pi i jk/n}.
void transform(cplx* data, std::size_t n, std::size_t howmany, std::size_t stride, std::size_t dist, int sign);

inline void transform(cplx* data, std::size_t n, int sign) { transform(data, n, 1, 1, n, sign); }

// Signed frequency index of FFT bin k: 0, 1, ..., n/2-1, -n/2, ..., -1.
inline long freq_index(std::size_t k, std::size_t n) {
    return k < (n + 1) / 2 ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace sart::fft
