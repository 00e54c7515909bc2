#pragma once

#include <complex>
#include <span>

namespace wmnv::fft {

using cplx = std::complex<double>;

// Unnormalized forward transforms (e^{-2πi jk/n}); the inverse ones divide by the
// element count. 2D layout is row-major with `rows` slow, `cols` fast. Plans are
// cached per shape and reused; execution is reentrant.
void forward_2d(int rows, int cols, std::span<const cplx> in, std::span<cplx> out);
void inverse_2d(int rows, int cols, std::span<const cplx> in, std::span<cplx> out);
void forward_1d(int n, std::span<const cplx> in, std::span<cplx> out);
void inverse_1d(int n, std::span<const cplx> in, std::span<cplx> out);

/// Signed frequency of FFT bin `i` out of `n`: 0, 1, ..., n/2-1, -n/2, ..., -1.
inline int frequency(int i, int n) { return i < (n + 1) / 2 ? i : i - n; }

} // namespace wmnv::fft
