#pragma once

#include <complex>
#include <span>

namespace kdiff {

// Thin wrapper over FFTW. Transforms are unnormalized:
//   forward[k]  = sum_j in[j] exp(-2*pi*i*j*k/n)
//   backward[k] = sum_j in[j] exp(+2*pi*i*j*k/n)
// Plans are cached per length in estimate mode and execution is serialized on
// internal buffers, so results never depend on the OpenMP thread count.
void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);
void fft_backward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

} // namespace kdiff
