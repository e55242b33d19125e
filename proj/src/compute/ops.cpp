// SPDX-License-Identifier: Apache-2.0
#include "adaret/compute/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

ADARET_BEGIN_NAMESPACE
namespace compute {

namespace {

// Accumulate into a parent's gradient if it takes one.
inline Real* grad_of(Node& self, std::size_t parent) {
    Node& p = *self.parents[parent];
    if (!p.requires_grad) return nullptr;
    p.ensure_grad();
    return p.grad.data();
}

void require_same(const Tensor& a, const Tensor& b, const char* op) {
    if (a.shape() != b.shape()) {
        throw ShapeError(std::string(op) + ": shape mismatch " + to_string(a.shape()) + " vs " +
                         to_string(b.shape()));
    }
}

std::size_t suffix_size(const Tensor& a, const Tensor& b, const char* op) {
    const auto& sa = a.shape();
    const auto& sb = b.shape();
    if (sb.size() > sa.size() || !std::equal(sb.rbegin(), sb.rend(), sa.rbegin())) {
        throw ShapeError(std::string(op) + ": " + to_string(sb) + " is not a suffix of " + to_string(sa));
    }
    return b.numel();
}

std::size_t last_dim(const Tensor& x, const char* op) {
    if (x.rank() == 0) throw ShapeError(std::string(op) + ": scalar input");
    return x.shape().back();
}

template <typename F, typename D>
Tensor unary(const Tensor& x, F f, D df, const char* name) {
    const auto xs = x.data();
    std::vector<Real> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = f(xs[i]);
    return make_result(
        x.shape(), std::move(out), {x},
        [df](Node& self) {
            Real* gx = grad_of(self, 0);
            if (!gx) return;
            const auto& xv = self.parents[0]->value;
            for (std::size_t i = 0; i < xv.size(); ++i) gx[i] += self.grad[i] * df(xv[i], self.value[i]);
        },
        name);
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same(a, b, "add");
    std::vector<Real> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] + b[i];
    return make_result(
        a.shape(), std::move(out), {a, b},
        [](Node& self) {
            for (std::size_t p = 0; p < 2; ++p) {
                if (Real* g = grad_of(self, p)) {
                    for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
                }
            }
        },
        "add");
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same(a, b, "sub");
    std::vector<Real> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] - b[i];
    return make_result(
        a.shape(), std::move(out), {a, b},
        [](Node& self) {
            if (Real* g = grad_of(self, 0)) {
                for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
            }
            if (Real* g = grad_of(self, 1)) {
                for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] -= self.grad[i];
            }
        },
        "sub");
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same(a, b, "mul");
    std::vector<Real> out(a.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a[i] * b[i];
    return make_result(
        a.shape(), std::move(out), {a, b},
        [](Node& self) {
            const auto& av = self.parents[0]->value;
            const auto& bv = self.parents[1]->value;
            if (Real* g = grad_of(self, 0)) {
                for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * bv[i];
            }
            if (Real* g = grad_of(self, 1)) {
                for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i] * av[i];
            }
        },
        "mul");
}

Tensor add_bcast(const Tensor& a, const Tensor& b) {
    const std::size_t inner = suffix_size(a, b, "add_bcast");
    const std::size_t outer = a.numel() / inner;
    std::vector<Real> out(a.numel());
    const Real* av = a.data().data();
    const Real* bv = b.data().data();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) out[o * inner + i] = av[o * inner + i] + bv[i];
    }
    return make_result(
        a.shape(), std::move(out), {a, b},
        [inner, outer](Node& self) {
            const Real* g = self.grad.data();
            if (Real* ga = grad_of(self, 0)) {
                for (std::size_t i = 0; i < self.grad.size(); ++i) ga[i] += g[i];
            }
            if (Real* gb = grad_of(self, 1)) {
                for (std::size_t o = 0; o < outer; ++o) {
                    for (std::size_t i = 0; i < inner; ++i) gb[i] += g[o * inner + i];
                }
            }
        },
        "add_bcast");
}

Tensor mul_bcast(const Tensor& a, const Tensor& b) {
    const std::size_t inner = suffix_size(a, b, "mul_bcast");
    const std::size_t outer = a.numel() / inner;
    std::vector<Real> out(a.numel());
    const Real* av = a.data().data();
    const Real* bv = b.data().data();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t i = 0; i < inner; ++i) out[o * inner + i] = av[o * inner + i] * bv[i];
    }
    return make_result(
        a.shape(), std::move(out), {a, b},
        [inner, outer](Node& self) {
            const Real* g = self.grad.data();
            const Real* av = self.parents[0]->value.data();
            const Real* bv = self.parents[1]->value.data();
            if (Real* ga = grad_of(self, 0)) {
                for (std::size_t o = 0; o < outer; ++o) {
                    for (std::size_t i = 0; i < inner; ++i) ga[o * inner + i] += g[o * inner + i] * bv[i];
                }
            }
            if (Real* gb = grad_of(self, 1)) {
                for (std::size_t o = 0; o < outer; ++o) {
                    for (std::size_t i = 0; i < inner; ++i) gb[i] += g[o * inner + i] * av[o * inner + i];
                }
            }
        },
        "mul_bcast");
}

Tensor scale(const Tensor& x, Real factor) {
    return unary(
        x, [factor](Real v) { return v * factor; }, [factor](Real, Real) { return factor; }, "scale");
}

Tensor relu(const Tensor& x) {
    return unary(
        x, [](Real v) { return v > 0 ? v : Real(0); }, [](Real v, Real) { return v > 0 ? Real(1) : Real(0); },
        "relu");
}

Tensor gelu(const Tensor& x) {
    constexpr Real c = Real(0.7978845608028654);  // sqrt(2/pi)
    constexpr Real a = Real(0.044715);
    return unary(
        x,
        [](Real v) { return Real(0.5) * v * (Real(1) + std::tanh(c * (v + a * v * v * v))); },
        [](Real v, Real) {
            const Real t = std::tanh(c * (v + a * v * v * v));
            return Real(0.5) * (Real(1) + t) + Real(0.5) * v * (Real(1) - t * t) * c * (Real(1) + 3 * a * v * v);
        },
        "gelu");
}

Tensor sigmoid(const Tensor& x) {
    return unary(
        x,
        [](Real v) {
            if (v >= 0) return Real(1) / (Real(1) + std::exp(-v));
            const Real e = std::exp(v);
            return e / (Real(1) + e);
        },
        [](Real, Real y) { return y * (Real(1) - y); }, "sigmoid");
}

Tensor tanh(const Tensor& x) {
    return unary(
        x, [](Real v) { return std::tanh(v); }, [](Real, Real y) { return Real(1) - y * y; }, "tanh");
}

Tensor matmul(const Tensor& x, const Tensor& w) {
    if (w.rank() != 2) throw ShapeError("matmul: weight must be 2-D, got " + to_string(w.shape()));
    const std::size_t K = w.dim(0);
    const std::size_t N = w.dim(1);
    if (last_dim(x, "matmul") != K) {
        throw ShapeError("matmul: inner dimensions disagree " + to_string(x.shape()) + " x " + to_string(w.shape()));
    }
    const std::size_t R = x.numel() / K;
    Shape shape = x.shape();
    shape.back() = N;

    std::vector<Real> out(R * N, Real(0));
    const Real* xv = x.data().data();
    const Real* wv = w.data().data();
    for (std::size_t r = 0; r < R; ++r) {
        Real* o = out.data() + r * N;
        for (std::size_t k = 0; k < K; ++k) {
            const Real a = xv[r * K + k];
            const Real* wr = wv + k * N;
            for (std::size_t n = 0; n < N; ++n) o[n] += a * wr[n];
        }
    }
    return make_result(
        std::move(shape), std::move(out), {x, w},
        [R, K, N](Node& self) {
            const Real* g = self.grad.data();
            const Real* xv = self.parents[0]->value.data();
            const Real* wv = self.parents[1]->value.data();
            if (Real* gx = grad_of(self, 0)) {
                // gx = g W^T, accumulated row by row against a transposed copy of W.
                std::vector<Real> wt(K * N);
                for (std::size_t k = 0; k < K; ++k) {
                    for (std::size_t n = 0; n < N; ++n) wt[n * K + k] = wv[k * N + n];
                }
                for (std::size_t r = 0; r < R; ++r) {
                    const Real* gr = g + r * N;
                    Real* gxr = gx + r * K;
                    for (std::size_t n = 0; n < N; ++n) {
                        const Real a = gr[n];
                        if (a == 0) continue;
                        const Real* wtn = wt.data() + n * K;
                        for (std::size_t k = 0; k < K; ++k) gxr[k] += a * wtn[k];
                    }
                }
            }
            if (Real* gw = grad_of(self, 1)) {
                for (std::size_t r = 0; r < R; ++r) {
                    const Real* gr = g + r * N;
                    for (std::size_t k = 0; k < K; ++k) {
                        const Real a = xv[r * K + k];
                        Real* gwr = gw + k * N;
                        for (std::size_t n = 0; n < N; ++n) gwr[n] += a * gr[n];
                    }
                }
            }
        },
        "matmul");
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(1)) {
        throw ShapeError("matmul_nt: incompatible shapes " + to_string(a.shape()) + " and " + to_string(b.shape()));
    }
    const std::size_t M = a.dim(0), K = a.dim(1), N = b.dim(0);
    std::vector<Real> out(M * N);
    const Real* av = a.data().data();
    const Real* bv = b.data().data();
    for (std::size_t m = 0; m < M; ++m) {
        for (std::size_t n = 0; n < N; ++n) {
            Real acc = 0;
            for (std::size_t k = 0; k < K; ++k) acc += av[m * K + k] * bv[n * K + k];
            out[m * N + n] = acc;
        }
    }
    return make_result(
        {M, N}, std::move(out), {a, b},
        [M, K, N](Node& self) {
            const Real* g = self.grad.data();
            const Real* av = self.parents[0]->value.data();
            const Real* bv = self.parents[1]->value.data();
            Real* ga = grad_of(self, 0);
            Real* gb = grad_of(self, 1);
            for (std::size_t m = 0; m < M; ++m) {
                for (std::size_t n = 0; n < N; ++n) {
                    const Real gmn = g[m * N + n];
                    if (gmn == 0) continue;
                    if (ga) {
                        for (std::size_t k = 0; k < K; ++k) ga[m * K + k] += gmn * bv[n * K + k];
                    }
                    if (gb) {
                        for (std::size_t k = 0; k < K; ++k) gb[n * K + k] += gmn * av[m * K + k];
                    }
                }
            }
        },
        "matmul_nt");
}

Tensor dense(const Tensor& x, const Tensor& w, const Tensor& b) {
    if (b.rank() != 1 || b.dim(0) != w.dim(1)) {
        throw ShapeError("dense: bias " + to_string(b.shape()) + " does not match weight " + to_string(w.shape()));
    }
    return add_bcast(matmul(x, w), b);
}

Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, Real eps) {
    const std::size_t d = last_dim(x, "layer_norm");
    require_shape(gamma, {d}, "layer_norm gamma");
    require_shape(beta, {d}, "layer_norm beta");
    const std::size_t rows = x.numel() / d;

    std::vector<Real> out(x.numel());
    std::vector<Real> xhat(x.numel());
    std::vector<Real> inv_std(rows);
    const Real* xv = x.data().data();
    for (std::size_t r = 0; r < rows; ++r) {
        const Real* row = xv + r * d;
        double mu = 0;
        for (std::size_t j = 0; j < d; ++j) mu += row[j];
        mu /= static_cast<double>(d);
        double var = 0;
        for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
        var /= static_cast<double>(d);
        const double inv = 1.0 / std::sqrt(var + static_cast<double>(eps));
        inv_std[r] = static_cast<Real>(inv);
        for (std::size_t j = 0; j < d; ++j) {
            const Real h = static_cast<Real>((row[j] - mu) * inv);
            xhat[r * d + j] = h;
            out[r * d + j] = gamma[j] * h + beta[j];
        }
    }
    return make_result(
        x.shape(), std::move(out), {x, gamma, beta},
        [d, rows, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node& self) {
            const Real* g = self.grad.data();
            const auto& gam = self.parents[1]->value;
            Real* gx = grad_of(self, 0);
            Real* gg = grad_of(self, 1);
            Real* gb = grad_of(self, 2);
            std::vector<Real> gh(d);
            for (std::size_t r = 0; r < rows; ++r) {
                const Real* gr = g + r * d;
                const Real* hr = xhat.data() + r * d;
                if (gg) {
                    for (std::size_t j = 0; j < d; ++j) gg[j] += gr[j] * hr[j];
                }
                if (gb) {
                    for (std::size_t j = 0; j < d; ++j) gb[j] += gr[j];
                }
                if (gx) {
                    double mean_gh = 0, mean_ghh = 0;
                    for (std::size_t j = 0; j < d; ++j) {
                        gh[j] = gr[j] * gam[j];
                        mean_gh += gh[j];
                        mean_ghh += gh[j] * hr[j];
                    }
                    mean_gh /= static_cast<double>(d);
                    mean_ghh /= static_cast<double>(d);
                    for (std::size_t j = 0; j < d; ++j) {
                        gx[r * d + j] += static_cast<Real>(inv_std[r] * (gh[j] - mean_gh - hr[j] * mean_ghh));
                    }
                }
            }
        },
        "layer_norm");
}

namespace {

// Softmax of one row restricted to mask; writes probabilities into p.
void softmax_row(const Real* s, const std::uint8_t* m, std::size_t n, Real* p) {
    Real mx = -std::numeric_limits<Real>::infinity();
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[j]) {
            mx = any ? std::max(mx, s[j]) : s[j];
            any = true;
        }
    }
    if (!any) throw ShapeError("masked_softmax: no valid attention targets");
    double total = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[j]) {
            const double e = std::exp(static_cast<double>(s[j] - mx));
            p[j] = static_cast<Real>(e);
            total += e;
        } else {
            p[j] = 0;
        }
    }
    const double inv = 1.0 / total;
    for (std::size_t j = 0; j < n; ++j) {
        if (m[j]) p[j] = static_cast<Real>(p[j] * inv);
    }
}

// ds = p * (dp - sum(p * dp)) for one row.
void softmax_row_backward(const Real* p, const Real* dp, std::size_t n, Real* ds) {
    double dot = 0;
    for (std::size_t j = 0; j < n; ++j) dot += static_cast<double>(p[j]) * dp[j];
    for (std::size_t j = 0; j < n; ++j) ds[j] = static_cast<Real>(p[j] * (dp[j] - dot));
}

}  // namespace

Tensor masked_softmax(const Tensor& scores, std::span<const std::uint8_t> mask) {
    const std::size_t n = last_dim(scores, "masked_softmax");
    if (mask.size() != scores.numel()) throw ShapeError("masked_softmax: mask size mismatch");
    const std::size_t rows = scores.numel() / n;
    std::vector<Real> out(scores.numel());
    for (std::size_t r = 0; r < rows; ++r) {
        softmax_row(scores.data().data() + r * n, mask.data() + r * n, n, out.data() + r * n);
    }
    return make_result(
        scores.shape(), std::move(out), {scores},
        [n, rows](Node& self) {
            Real* gs = grad_of(self, 0);
            if (!gs) return;
            std::vector<Real> ds(n);
            for (std::size_t r = 0; r < rows; ++r) {
                softmax_row_backward(self.value.data() + r * n, self.grad.data() + r * n, n, ds.data());
                for (std::size_t j = 0; j < n; ++j) gs[r * n + j] += ds[j];
            }
        },
        "masked_softmax");
}

Tensor attention(const Tensor& q, const Tensor& k, const Tensor& v, std::size_t heads,
                 std::span<const std::uint8_t> mask, std::vector<Real>* weights) {
    if (q.rank() != 3 || k.rank() != 3 || v.rank() != 3) throw ShapeError("attention: expected 3-D q/k/v");
    const std::size_t B = q.dim(0), Lq = q.dim(1), D = q.dim(2), Lk = k.dim(1);
    if (k.dim(0) != B || v.dim(0) != B || k.dim(2) != D || v.shape() != k.shape()) {
        throw ShapeError("attention: q " + to_string(q.shape()) + ", k " + to_string(k.shape()) + ", v " +
                         to_string(v.shape()));
    }
    if (heads == 0 || D % heads != 0) throw ShapeError("attention: dimension not divisible by head count");
    if (mask.size() != B * Lq * Lk) throw ShapeError("attention: mask size mismatch");
    const std::size_t dh = D / heads;
    const Real scale_factor = Real(1) / std::sqrt(static_cast<Real>(dh));

    std::vector<Real> probs(B * heads * Lq * Lk);
    std::vector<Real> out(B * Lq * D, Real(0));
    std::vector<Real> row(Lk);
    const Real* qv = q.data().data();
    const Real* kv = k.data().data();
    const Real* vv = v.data().data();
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t h = 0; h < heads; ++h) {
            for (std::size_t i = 0; i < Lq; ++i) {
                const Real* qi = qv + (b * Lq + i) * D + h * dh;
                for (std::size_t j = 0; j < Lk; ++j) {
                    const Real* kj = kv + (b * Lk + j) * D + h * dh;
                    Real acc = 0;
                    for (std::size_t c = 0; c < dh; ++c) acc += qi[c] * kj[c];
                    row[j] = acc * scale_factor;
                }
                Real* p = probs.data() + ((b * heads + h) * Lq + i) * Lk;
                softmax_row(row.data(), mask.data() + (b * Lq + i) * Lk, Lk, p);
                Real* o = out.data() + (b * Lq + i) * D + h * dh;
                for (std::size_t j = 0; j < Lk; ++j) {
                    if (p[j] == 0) continue;
                    const Real* vj = vv + (b * Lk + j) * D + h * dh;
                    for (std::size_t c = 0; c < dh; ++c) o[c] += p[j] * vj[c];
                }
            }
        }
    }
    if (weights) *weights = probs;
    return make_result(
        {B, Lq, D}, std::move(out), {q, k, v},
        [B, Lq, Lk, D, heads, dh, scale_factor, probs = std::move(probs)](Node& self) {
            const Real* g = self.grad.data();
            const Real* qv = self.parents[0]->value.data();
            const Real* kv = self.parents[1]->value.data();
            const Real* vv = self.parents[2]->value.data();
            Real* gq = grad_of(self, 0);
            Real* gk = grad_of(self, 1);
            Real* gv = grad_of(self, 2);
            std::vector<Real> dp(Lk), ds(Lk);
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t h = 0; h < heads; ++h) {
                    for (std::size_t i = 0; i < Lq; ++i) {
                        const Real* p = probs.data() + ((b * heads + h) * Lq + i) * Lk;
                        const Real* gi = g + (b * Lq + i) * D + h * dh;
                        for (std::size_t j = 0; j < Lk; ++j) {
                            const Real* vj = vv + (b * Lk + j) * D + h * dh;
                            Real acc = 0;
                            for (std::size_t c = 0; c < dh; ++c) acc += gi[c] * vj[c];
                            dp[j] = acc;
                            if (gv && p[j] != 0) {
                                Real* gvj = gv + (b * Lk + j) * D + h * dh;
                                for (std::size_t c = 0; c < dh; ++c) gvj[c] += p[j] * gi[c];
                            }
                        }
                        softmax_row_backward(p, dp.data(), Lk, ds.data());
                        const Real* qi = qv + (b * Lq + i) * D + h * dh;
                        for (std::size_t j = 0; j < Lk; ++j) {
                            const Real s = ds[j] * scale_factor;
                            if (s == 0) continue;
                            const Real* kj = kv + (b * Lk + j) * D + h * dh;
                            if (gq) {
                                Real* gqi = gq + (b * Lq + i) * D + h * dh;
                                for (std::size_t c = 0; c < dh; ++c) gqi[c] += s * kj[c];
                            }
                            if (gk) {
                                Real* gkj = gk + (b * Lk + j) * D + h * dh;
                                for (std::size_t c = 0; c < dh; ++c) gkj[c] += s * qi[c];
                            }
                        }
                    }
                }
            }
        },
        "attention");
}

Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng) {
    if (p < 0.0 || p >= 1.0) throw ConfigError("dropout: probability must be in [0, 1), got " + std::to_string(p));
    if (mode == Mode::eval || p == 0.0) return x;
    const Real keep_scale = static_cast<Real>(1.0 / (1.0 - p));
    std::vector<Real> factor(x.numel());
    for (auto& f : factor) f = rng.bernoulli(p) ? Real(0) : keep_scale;
    std::vector<Real> out(x.numel());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * factor[i];
    return make_result(
        x.shape(), std::move(out), {x},
        [factor = std::move(factor)](Node& self) {
            if (Real* g = grad_of(self, 0)) {
                for (std::size_t i = 0; i < factor.size(); ++i) g[i] += self.grad[i] * factor[i];
            }
        },
        "dropout");
}

Tensor gather_rows(const Tensor& table, std::span<const int> ids, const Shape& index_shape, int pad_id) {
    if (table.rank() != 2) throw ShapeError("gather_rows: table must be 2-D");
    if (numel(index_shape) != ids.size()) throw ShapeError("gather_rows: index shape does not match id count");
    const std::size_t V = table.dim(0), d = table.dim(1);
    std::vector<int> idx(ids.begin(), ids.end());
    std::vector<Real> out(idx.size() * d, Real(0));
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const int id = idx[r];
        if (id < 0 || static_cast<std::size_t>(id) >= V) {
            throw ShapeError("gather_rows: id " + std::to_string(id) + " out of range [0, " + std::to_string(V) + ")");
        }
        if (id == pad_id) continue;
        std::copy_n(table.data().data() + static_cast<std::size_t>(id) * d, d, out.data() + r * d);
    }
    Shape shape = index_shape;
    shape.push_back(d);
    return make_result(
        std::move(shape), std::move(out), {table},
        [d, pad_id, idx = std::move(idx)](Node& self) {
            Real* gt = grad_of(self, 0);
            if (!gt) return;
            for (std::size_t r = 0; r < idx.size(); ++r) {
                if (idx[r] == pad_id) continue;
                Real* dst = gt + static_cast<std::size_t>(idx[r]) * d;
                const Real* src = self.grad.data() + r * d;
                for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
            }
        },
        "gather_rows");
}

Tensor select_positions(const Tensor& x, std::span<const std::size_t> positions) {
    if (x.rank() != 3) throw ShapeError("select_positions: expected [B, L, d]");
    const std::size_t B = x.dim(0), L = x.dim(1), d = x.dim(2);
    if (positions.size() != B) throw ShapeError("select_positions: one position per row required");
    std::vector<std::size_t> pos(positions.begin(), positions.end());
    std::vector<Real> out(B * d);
    for (std::size_t b = 0; b < B; ++b) {
        if (pos[b] >= L) throw ShapeError("select_positions: position out of range");
        std::copy_n(x.data().data() + (b * L + pos[b]) * d, d, out.data() + b * d);
    }
    return make_result(
        {B, d}, std::move(out), {x},
        [L, d, pos = std::move(pos)](Node& self) {
            Real* gx = grad_of(self, 0);
            if (!gx) return;
            for (std::size_t b = 0; b < pos.size(); ++b) {
                Real* dst = gx + (b * L + pos[b]) * d;
                for (std::size_t j = 0; j < d; ++j) dst[j] += self.grad[b * d + j];
            }
        },
        "select_positions");
}

Tensor concat_last(const Tensor& a, const Tensor& b) {
    const std::size_t n = last_dim(a, "concat_last");
    const std::size_t m = last_dim(b, "concat_last");
    Shape lead_a(a.shape().begin(), a.shape().end() - 1);
    Shape lead_b(b.shape().begin(), b.shape().end() - 1);
    if (lead_a != lead_b) throw ShapeError("concat_last: leading shapes disagree");
    const std::size_t rows = a.numel() / n;
    std::vector<Real> out(rows * (n + m));
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(a.data().data() + r * n, n, out.data() + r * (n + m));
        std::copy_n(b.data().data() + r * m, m, out.data() + r * (n + m) + n);
    }
    Shape shape = lead_a;
    shape.push_back(n + m);
    return make_result(
        std::move(shape), std::move(out), {a, b},
        [rows, n, m](Node& self) {
            Real* ga = grad_of(self, 0);
            Real* gb = grad_of(self, 1);
            for (std::size_t r = 0; r < rows; ++r) {
                const Real* g = self.grad.data() + r * (n + m);
                if (ga) {
                    for (std::size_t j = 0; j < n; ++j) ga[r * n + j] += g[j];
                }
                if (gb) {
                    for (std::size_t j = 0; j < m; ++j) gb[r * m + j] += g[n + j];
                }
            }
        },
        "concat_last");
}

Tensor where_rows(const Tensor& a, const Tensor& b, std::span<const std::uint8_t> take_a) {
    require_same(a, b, "where_rows");
    const std::size_t d = last_dim(a, "where_rows");
    const std::size_t rows = a.numel() / d;
    if (take_a.size() != rows) throw ShapeError("where_rows: selector size mismatch");
    std::vector<std::uint8_t> sel(take_a.begin(), take_a.end());
    std::vector<Real> out(a.numel());
    for (std::size_t r = 0; r < rows; ++r) {
        const Real* src = (sel[r] ? a.data().data() : b.data().data()) + r * d;
        std::copy_n(src, d, out.data() + r * d);
    }
    return make_result(
        a.shape(), std::move(out), {a, b},
        [d, sel = std::move(sel)](Node& self) {
            Real* ga = grad_of(self, 0);
            Real* gb = grad_of(self, 1);
            for (std::size_t r = 0; r < sel.size(); ++r) {
                Real* dst = sel[r] ? ga : gb;
                if (!dst) continue;
                for (std::size_t j = 0; j < d; ++j) dst[r * d + j] += self.grad[r * d + j];
            }
        },
        "where_rows");
}

Tensor masked_mean_slots(const Tensor& x, std::span<const std::uint8_t> mask) {
    if (x.rank() != 3) throw ShapeError("masked_mean_slots: expected [B, C, d]");
    const std::size_t B = x.dim(0), C = x.dim(1), d = x.dim(2);
    if (mask.size() != B * C) throw ShapeError("masked_mean_slots: mask size mismatch");
    std::vector<Real> weight(B * C, Real(0));
    for (std::size_t b = 0; b < B; ++b) {
        std::size_t count = 0;
        for (std::size_t c = 0; c < C; ++c) count += mask[b * C + c] ? 1 : 0;
        if (count == 0) continue;
        for (std::size_t c = 0; c < C; ++c) {
            if (mask[b * C + c]) weight[b * C + c] = Real(1) / static_cast<Real>(count);
        }
    }
    std::vector<Real> out(B * d, Real(0));
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t c = 0; c < C; ++c) {
            const Real w = weight[b * C + c];
            if (w == 0) continue;
            const Real* src = x.data().data() + (b * C + c) * d;
            for (std::size_t j = 0; j < d; ++j) out[b * d + j] += w * src[j];
        }
    }
    return make_result(
        {B, d}, std::move(out), {x},
        [B, C, d, weight = std::move(weight)](Node& self) {
            Real* gx = grad_of(self, 0);
            if (!gx) return;
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t c = 0; c < C; ++c) {
                    const Real w = weight[b * C + c];
                    if (w == 0) continue;
                    for (std::size_t j = 0; j < d; ++j) gx[(b * C + c) * d + j] += w * self.grad[b * d + j];
                }
            }
        },
        "masked_mean_slots");
}

Tensor repeat_positions(const Tensor& x, std::size_t length) {
    if (x.rank() != 2) throw ShapeError("repeat_positions: expected [B, d]");
    const std::size_t B = x.dim(0), d = x.dim(1);
    std::vector<Real> out(B * length * d);
    for (std::size_t b = 0; b < B; ++b) {
        for (std::size_t l = 0; l < length; ++l) {
            std::copy_n(x.data().data() + b * d, d, out.data() + (b * length + l) * d);
        }
    }
    return make_result(
        {B, length, d}, std::move(out), {x},
        [B, length, d](Node& self) {
            Real* gx = grad_of(self, 0);
            if (!gx) return;
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t l = 0; l < length; ++l) {
                    for (std::size_t j = 0; j < d; ++j) gx[b * d + j] += self.grad[(b * length + l) * d + j];
                }
            }
        },
        "repeat_positions");
}

Tensor sum(const Tensor& x) {
    double total = 0;
    for (auto v : x.data()) total += v;
    return make_result(
        {}, {static_cast<Real>(total)}, {x},
        [](Node& self) {
            if (Real* g = grad_of(self, 0)) {
                const auto n = self.parents[0]->value.size();
                for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[0];
            }
        },
        "sum");
}

Tensor mean(const Tensor& x) {
    if (x.numel() == 0) throw ShapeError("mean: empty tensor");
    return scale(sum(x), Real(1) / static_cast<Real>(x.numel()));
}

Tensor reshape(const Tensor& x, Shape shape) {
    if (numel(shape) != x.numel()) {
        throw ShapeError("reshape: " + to_string(x.shape()) + " -> " + to_string(shape));
    }
    std::vector<Real> out(x.data().begin(), x.data().end());
    return make_result(
        std::move(shape), std::move(out), {x},
        [](Node& self) {
            if (Real* g = grad_of(self, 0)) {
                for (std::size_t i = 0; i < self.grad.size(); ++i) g[i] += self.grad[i];
            }
        },
        "reshape");
}

Tensor gather_scores(const Tensor& f, const Tensor& table, std::span<const int> ids, std::size_t per_row) {
    if (f.rank() != 2 || table.rank() != 2 || f.dim(1) != table.dim(1)) {
        throw ShapeError("gather_scores: incompatible shapes " + to_string(f.shape()) + " and " +
                         to_string(table.shape()));
    }
    const std::size_t B = f.dim(0), d = f.dim(1), V = table.dim(0);
    if (ids.size() != B * per_row) throw ShapeError("gather_scores: id count mismatch");
    std::vector<int> idx(ids.begin(), ids.end());
    std::vector<Real> out(B * per_row);
    for (std::size_t b = 0; b < B; ++b) {
        const Real* fb = f.data().data() + b * d;
        for (std::size_t j = 0; j < per_row; ++j) {
            const int id = idx[b * per_row + j];
            if (id < 0 || static_cast<std::size_t>(id) >= V) throw ShapeError("gather_scores: id out of range");
            const Real* e = table.data().data() + static_cast<std::size_t>(id) * d;
            Real acc = 0;
            for (std::size_t c = 0; c < d; ++c) acc += fb[c] * e[c];
            out[b * per_row + j] = acc;
        }
    }
    return make_result(
        {B, per_row}, std::move(out), {f, table},
        [B, d, per_row, idx = std::move(idx)](Node& self) {
            const Real* fv = self.parents[0]->value.data();
            const Real* tv = self.parents[1]->value.data();
            Real* gf = grad_of(self, 0);
            Real* gt = grad_of(self, 1);
            for (std::size_t b = 0; b < B; ++b) {
                for (std::size_t j = 0; j < per_row; ++j) {
                    const Real g = self.grad[b * per_row + j];
                    if (g == 0) continue;
                    const auto id = static_cast<std::size_t>(idx[b * per_row + j]);
                    if (gf) {
                        for (std::size_t c = 0; c < d; ++c) gf[b * d + c] += g * tv[id * d + c];
                    }
                    // Row 0 is the frozen padding embedding.
                    if (gt && id != 0) {
                        for (std::size_t c = 0; c < d; ++c) gt[id * d + c] += g * fv[b * d + c];
                    }
                }
            }
        },
        "gather_scores");
}

}  // namespace compute
ADARET_END_NAMESPACE
