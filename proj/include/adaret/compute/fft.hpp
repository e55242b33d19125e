// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "adaret/compute/tensor.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

/// Half spectrum of a real signal laid out (bins, cols), row-major. For a
/// source length L there are floor(L/2)+1 bins.
struct ComplexSpectrum {
    std::size_t bins = 0;
    std::size_t cols = 0;
    std::vector<Real> re;
    std::vector<Real> im;

    static ComplexSpectrum zeros(std::size_t bins, std::size_t cols);
    static ComplexSpectrum identity(std::size_t bins, std::size_t cols);
};

constexpr std::size_t spectrum_bins(std::size_t length) { return length / 2 + 1; }

/// DFT coefficients 0..floor(L/2) of a length-L signal. Radix-2 for powers of
/// two, direct summation otherwise.
ComplexSpectrum fft_real_forward(std::span<const Real> signal);
/// Column-wise transform of a row-major (rows x cols) matrix along rows.
ComplexSpectrum fft_real_forward(std::span<const Real> matrix, std::size_t rows, std::size_t cols);

/// Inverse of fft_real_forward: returns a row-major (length x cols) real matrix.
/// Imaginary parts of the DC and (even-length) Nyquist bins are ignored.
std::vector<Real> fft_real_inverse(const ComplexSpectrum& spectrum, std::size_t length);

ComplexSpectrum complex_elementwise_mul(const ComplexSpectrum& a, const ComplexSpectrum& b);

/// Differentiable spectrum pair, each [B, bins, d].
struct SpectrumTensor {
    Tensor re;
    Tensor im;
};

/// Real FFT of x [B, L, d] along the position axis.
SpectrumTensor rfft(const Tensor& x);
/// Inverse of rfft back to [B, length, d].
Tensor irfft(const SpectrumTensor& spectrum, std::size_t length);

/// irfft(W (.) rfft(x)) with a learnable complex filter W given as
/// w_re/w_im of shape [bins, d], broadcast over the batch.
Tensor spectral_filter(const Tensor& x, const Tensor& w_re, const Tensor& w_im);

}  // namespace compute
ADARET_END_NAMESPACE
