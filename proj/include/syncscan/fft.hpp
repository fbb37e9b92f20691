#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace syncscan {

// Real-to-complex FFT of `frame` zero-padded to `fft_size` (power of two).
// Returns fft_size/2 + 1 bins (DC .. Nyquist). Backed by FFTW with cached
// plans; deterministic (FFTW_ESTIMATE).
std::vector<std::complex<double>> real_fft(std::span<const double> frame, size_t fft_size);

} // namespace syncscan
