// SPDX-License-Identifier: Apache-2.0
#include "adaret/compute/fft.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "adaret/compute/ops.hpp"

ADARET_BEGIN_NAMESPACE
namespace compute {

namespace {

using cd = std::complex<double>;

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// Iterative radix-2 Cooley-Tukey, unnormalized. inverse uses e^{+i...}.
void fft_radix2(std::vector<cd>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        const cd wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

struct Twiddles {
    std::vector<double> cos_t, sin_t;
    explicit Twiddles(std::size_t n) : cos_t(n), sin_t(n) {
        for (std::size_t m = 0; m < n; ++m) {
            const double ang = 2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(n);
            cos_t[m] = std::cos(ang);
            sin_t[m] = std::sin(ang);
        }
    }
};

// Strided real signal of length n -> floor(n/2)+1 bins.
std::vector<cd> rfft_1d(const Real* x, std::size_t n, std::size_t stride) {
    const std::size_t bins = spectrum_bins(n);
    std::vector<cd> out(bins);
    if (is_power_of_two(n)) {
        std::vector<cd> a(n);
        for (std::size_t i = 0; i < n; ++i) a[i] = cd(static_cast<double>(x[i * stride]), 0.0);
        fft_radix2(a, false);
        for (std::size_t k = 0; k < bins; ++k) out[k] = a[k];
        return out;
    }
    const Twiddles tw(n);
    for (std::size_t k = 0; k < bins; ++k) {
        double re = 0, im = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t m = (k * i) % n;
            const double v = x[i * stride];
            re += v * tw.cos_t[m];
            im -= v * tw.sin_t[m];
        }
        out[k] = cd(re, im);
    }
    return out;
}

// Hermitian half spectrum -> real signal of length n, normalized by 1/n.
std::vector<double> irfft_1d(const std::vector<cd>& z, std::size_t n) {
    const std::size_t bins = spectrum_bins(n);
    const bool even = n % 2 == 0;
    std::vector<double> y(n);
    if (is_power_of_two(n)) {
        std::vector<cd> a(n);
        a[0] = cd(z[0].real(), 0.0);
        for (std::size_t k = 1; k < bins; ++k) {
            if (even && k == n / 2) {
                a[k] = cd(z[k].real(), 0.0);
            } else {
                a[k] = z[k];
                a[n - k] = std::conj(z[k]);
            }
        }
        fft_radix2(a, true);
        for (std::size_t i = 0; i < n; ++i) y[i] = a[i].real() / static_cast<double>(n);
        return y;
    }
    const Twiddles tw(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = z[0].real();
        for (std::size_t k = 1; k < bins; ++k) {
            const std::size_t m = (k * i) % n;
            if (even && k == n / 2) {
                acc += z[k].real() * tw.cos_t[m];
            } else {
                acc += 2.0 * (z[k].real() * tw.cos_t[m] - z[k].imag() * tw.sin_t[m]);
            }
        }
        y[i] = acc / static_cast<double>(n);
    }
    return y;
}

// Hermitian weight of bin k: 1 for DC and Nyquist, 2 otherwise.
double bin_weight(std::size_t k, std::size_t n) {
    if (k == 0) return 1.0;
    if (n % 2 == 0 && k == n / 2) return 1.0;
    return 2.0;
}

}  // namespace

ComplexSpectrum ComplexSpectrum::zeros(std::size_t bins, std::size_t cols) {
    return {bins, cols, std::vector<Real>(bins * cols, Real(0)), std::vector<Real>(bins * cols, Real(0))};
}

ComplexSpectrum ComplexSpectrum::identity(std::size_t bins, std::size_t cols) {
    return {bins, cols, std::vector<Real>(bins * cols, Real(1)), std::vector<Real>(bins * cols, Real(0))};
}

ComplexSpectrum fft_real_forward(std::span<const Real> signal) {
    return fft_real_forward(signal, signal.size(), 1);
}

ComplexSpectrum fft_real_forward(std::span<const Real> matrix, std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw ShapeError("fft_real_forward: empty signal");
    if (matrix.size() != rows * cols) throw ShapeError("fft_real_forward: matrix size mismatch");
    auto spec = ComplexSpectrum::zeros(spectrum_bins(rows), cols);
    for (std::size_t c = 0; c < cols; ++c) {
        const auto z = rfft_1d(matrix.data() + c, rows, cols);
        for (std::size_t k = 0; k < spec.bins; ++k) {
            spec.re[k * cols + c] = static_cast<Real>(z[k].real());
            spec.im[k * cols + c] = static_cast<Real>(z[k].imag());
        }
    }
    return spec;
}

std::vector<Real> fft_real_inverse(const ComplexSpectrum& spectrum, std::size_t length) {
    if (length == 0) throw ShapeError("fft_real_inverse: empty signal");
    if (spectrum.bins != spectrum_bins(length)) {
        throw ShapeError("fft_real_inverse: " + std::to_string(spectrum.bins) + " bins inconsistent with length " +
                         std::to_string(length));
    }
    const std::size_t cols = spectrum.cols;
    std::vector<Real> out(length * cols);
    std::vector<cd> z(spectrum.bins);
    for (std::size_t c = 0; c < cols; ++c) {
        for (std::size_t k = 0; k < spectrum.bins; ++k) z[k] = cd(spectrum.re[k * cols + c], spectrum.im[k * cols + c]);
        const auto y = irfft_1d(z, length);
        for (std::size_t i = 0; i < length; ++i) out[i * cols + c] = static_cast<Real>(y[i]);
    }
    return out;
}

ComplexSpectrum complex_elementwise_mul(const ComplexSpectrum& a, const ComplexSpectrum& b) {
    if (a.bins != b.bins || a.cols != b.cols) throw ShapeError("complex_elementwise_mul: shape mismatch");
    auto out = ComplexSpectrum::zeros(a.bins, a.cols);
    for (std::size_t i = 0; i < out.re.size(); ++i) {
        out.re[i] = a.re[i] * b.re[i] - a.im[i] * b.im[i];
        out.im[i] = a.re[i] * b.im[i] + a.im[i] * b.re[i];
    }
    return out;
}

namespace {

// Real DFT basis for length L: cos and sin of 2 pi k i / L, row k = bin.
struct DftBasis {
    std::size_t L, F;
    std::vector<Real> cos_t, sin_t;
    explicit DftBasis(std::size_t length) : L(length), F(spectrum_bins(length)), cos_t(F * L), sin_t(F * L) {
        for (std::size_t k = 0; k < F; ++k) {
            for (std::size_t i = 0; i < L; ++i) {
                const double ang = 2.0 * std::numbers::pi * static_cast<double>((k * i) % L) / static_cast<double>(L);
                cos_t[k * L + i] = static_cast<Real>(std::cos(ang));
                sin_t[k * L + i] = static_cast<Real>(std::sin(ang));
            }
        }
    }
};

// Forward rfft of every (b, column) slice of x [B, L, d], vectorized over d.
void rfft_batch(const Real* x, std::size_t B, std::size_t L, std::size_t d, std::vector<Real>& re,
                std::vector<Real>& im) {
    const DftBasis basis(L);
    const std::size_t F = basis.F;
    re.assign(B * F * d, Real(0));
    im.assign(B * F * d, Real(0));
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t k = 0; k < F; ++k) {
            Real* rr = re.data() + (b * F + k) * d;
            Real* ri = im.data() + (b * F + k) * d;
            for (std::size_t i = 0; i < L; ++i) {
                const Real c = basis.cos_t[k * L + i];
                const Real s = basis.sin_t[k * L + i];
                const Real* xr = x + (b * L + i) * d;
                for (std::size_t j = 0; j < d; ++j) {
                    rr[j] += c * xr[j];
                    ri[j] -= s * xr[j];
                }
            }
        }
    }
}

// out[b, i, :] += sum_k (a_k re[b, k, :] cos - a_k im[b, k, :] sin) with a_k = scale(k).
// Either part may be null.
template <class Scale>
void dft_synthesize(const Real* re, const Real* im, std::size_t B, std::size_t L, std::size_t d, Scale scale,
                    Real* out) {
    const DftBasis basis(L);
    const std::size_t F = basis.F;
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t i = 0; i < L; ++i) {
            Real* o = out + (b * L + i) * d;
            for (std::size_t k = 0; k < F; ++k) {
                const Real a = static_cast<Real>(scale(k));
                const Real c = a * basis.cos_t[k * L + i];
                const Real s = a * basis.sin_t[k * L + i];
                if (re) {
                    const Real* r = re + (b * F + k) * d;
                    for (std::size_t j = 0; j < d; ++j) o[j] += c * r[j];
                }
                if (im) {
                    const Real* m = im + (b * F + k) * d;
                    for (std::size_t j = 0; j < d; ++j) o[j] -= s * m[j];
                }
            }
        }
    }
}

// Adjoint of rfft: dx[n] = sum_k gre_k cos(2 pi k n / L) - gim_k sin(2 pi k n / L).
void rfft_adjoint(const Real* gre, const Real* gim, std::size_t B, std::size_t L, std::size_t d, Real* gx) {
    dft_synthesize(gre, gim, B, L, d, [](std::size_t) { return 1.0; }, gx);
}

}  // namespace

SpectrumTensor rfft(const Tensor& x) {
    if (x.rank() != 3) throw ShapeError("rfft: expected [B, L, d], got " + to_string(x.shape()));
    const std::size_t B = x.dim(0), L = x.dim(1), d = x.dim(2);
    if (L == 0) throw ShapeError("rfft: empty signal");
    const std::size_t F = spectrum_bins(L);
    std::vector<Real> re, im;
    rfft_batch(x.data().data(), B, L, d, re, im);
    auto re_t = make_result(
        {B, F, d}, std::move(re), {x},
        [B, L, d](Node& self) {
            Node& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            rfft_adjoint(self.grad.data(), nullptr, B, L, d, p.grad.data());
        },
        "rfft_re");
    auto im_t = make_result(
        {B, F, d}, std::move(im), {x},
        [B, L, d](Node& self) {
            Node& p = *self.parents[0];
            if (!p.requires_grad) return;
            p.ensure_grad();
            rfft_adjoint(nullptr, self.grad.data(), B, L, d, p.grad.data());
        },
        "rfft_im");
    return {re_t, im_t};
}

Tensor irfft(const SpectrumTensor& spectrum, std::size_t length) {
    const auto& re = spectrum.re;
    const auto& im = spectrum.im;
    if (re.rank() != 3 || re.shape() != im.shape()) throw ShapeError("irfft: expected matching [B, bins, d] parts");
    const std::size_t B = re.dim(0), F = re.dim(1), d = re.dim(2);
    if (length == 0 || F != spectrum_bins(length)) {
        throw ShapeError("irfft: " + std::to_string(F) + " bins inconsistent with length " + std::to_string(length));
    }
    std::vector<Real> out(B * length * d, Real(0));
    dft_synthesize(re.data().data(), im.data().data(), B, length, d,
                   [length](std::size_t k) { return bin_weight(k, length) / static_cast<double>(length); },
                   out.data());
    return make_result(
        {B, length, d}, std::move(out), {re, im},
        [B, F, d, length](Node& self) {
            Node& pre = *self.parents[0];
            Node& pim = *self.parents[1];
            if (!pre.requires_grad && !pim.requires_grad) return;
            std::vector<Real> gre, gim;
            rfft_batch(self.grad.data(), B, length, d, gre, gim);
            const bool even = length % 2 == 0;
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t k = 0; k < F; ++k) {
                    const Real w = static_cast<Real>(bin_weight(k, length) / static_cast<double>(length));
                    const bool real_only = k == 0 || (even && k == length / 2);
                    for (std::size_t c = 0; c < d; ++c) {
                        const std::size_t at = (b * F + k) * d + c;
                        gre[at] *= w;
                        gim[at] = real_only ? Real(0) : gim[at] * w;
                    }
                }
            }
            if (pre.requires_grad) {
                pre.ensure_grad();
                for (std::size_t i = 0; i < gre.size(); ++i) pre.grad[i] += gre[i];
            }
            if (pim.requires_grad) {
                pim.ensure_grad();
                for (std::size_t i = 0; i < gim.size(); ++i) pim.grad[i] += gim[i];
            }
        },
        "irfft");
}

Tensor spectral_filter(const Tensor& x, const Tensor& w_re, const Tensor& w_im) {
    if (x.rank() != 3) throw ShapeError("spectral_filter: expected [B, L, d]");
    const std::size_t L = x.dim(1);
    const Shape expected{spectrum_bins(L), x.dim(2)};
    require_shape(w_re, expected, "spectral_filter real part");
    require_shape(w_im, expected, "spectral_filter imaginary part");
    const auto spec = rfft(x);
    // (a + bi)(c + di) = (ac - bd) + (ad + bc)i
    SpectrumTensor filtered{
        sub(mul_bcast(spec.re, w_re), mul_bcast(spec.im, w_im)),
        add(mul_bcast(spec.re, w_im), mul_bcast(spec.im, w_re)),
    };
    return irfft(filtered, L);
}

}  // namespace compute
ADARET_END_NAMESPACE
