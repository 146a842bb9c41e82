#pragma once

#include <cstddef>
#include <vector>

#include "pdlink/waveform.hpp"

namespace pdlink {

// In-place forward DFT (unnormalized) and inverse DFT (scaled by 1/N).
// Backed by FFTW with a process-wide plan cache; safe to call from several
// threads at once. FFTW_ESTIMATE keeps planning deterministic.
void fft_forward(std::vector<cplx>& x);
void fft_inverse(std::vector<cplx>& x);

// Signed bin frequency in Hz for bin k of an n-point transform.
inline double bin_freq(std::size_t k, std::size_t n, double rate) {
    const double kk = (k <= n / 2) ? double(k) : double(k) - double(n);
    return kk * rate / double(n);
}

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace pdlink
