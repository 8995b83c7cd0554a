#pragma once

#include <complex>
#include <vector>

namespace bht {

using cplx = std::complex<double>;

/// In-place radix-agnostic DFT of length n = v.size() (power of two), via FFTW.
/// sign -1: forward (e^{-2 pi i qk/n}), +1: backward, unnormalized.
/// Plans use FFTW_ESTIMATE and are cached per (n, sign); results are
/// bit-identical across calls and threads for identical inputs.
void fft_inplace(cplx* v, std::size_t n, int sign);

/// Row transforms of an N x N row-major array (x direction).
void fft_rows(cplx* a, std::size_t N, int sign);
/// Column transforms (y direction).
void fft_cols(cplx* a, std::size_t N, int sign);

} // namespace bht
