#pragma once

#include <complex>
#include <span>

namespace hesc::fft {

using cplx = std::complex<double>;

// Unnormalized n x n DFTs (row-major). forward uses exp(-2 pi i k j / n),
// backward exp(+2 pi i k j / n). in and out must not alias. Safe to call from
// several threads at once; plans are created once per size and shared.
void forward(int n, std::span<const cplx> in, std::span<cplx> out);
void backward(int n, std::span<const cplx> in, std::span<cplx> out);

// 1D transforms of length n.
void forward_1d(int n, std::span<const cplx> in, std::span<cplx> out);
void backward_1d(int n, std::span<const cplx> in, std::span<cplx> out);

}  // namespace hesc::fft
