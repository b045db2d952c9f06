#pragma once

// Thin FFTW wrapper.  Unnormalized transforms in FFT bin order.

#include <span>

#include "qmlab/grid.hpp"

namespace qmlab::detail {

enum class FftDirection { forward, backward };

/// In-place n-dimensional DFT: forward computes sum_j u_j exp(-2 pi i k j / N).
void fft_inplace(std::span<Complex> data, const TorusGrid& grid, FftDirection dir);

}  // namespace qmlab::detail
