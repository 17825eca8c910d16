// SPDX-License-Identifier: Apache-2.0
//
// risbeam - beam-training workbench for RIS-assisted THz MU-MIMO
// Copyright (C) 2026 the risbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Minimal reverse-mode tensor kernel: exactly the primitives the beam
// classifier needs (conv2d, linear, batched matmul, softmax, dropout,
// residual add, cross-entropy), each with an explicit backward closure
// recorded on a tape. Templated on the scalar so the same code runs the
// 32-bit training path and a 64-bit build for finite-difference checks.
//
// Every parallel loop is written gather-style - one thread owns one output
// element and walks its own reduction serially - so results are bitwise
// identical for any worker count.

#ifndef RISBEAM_TENSOR_HPP
#define RISBEAM_TENSOR_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "risbeam/common.hpp"

namespace risbeam::nn {

template <typename T>
struct Tensor {
    std::vector<std::size_t> shape; // up to 4 axes
    std::vector<T> v;               // values, contiguous row-major
    std::vector<T> g;               // gradient buffer, empty until needed

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s))
    {
        if (shape.empty() || shape.size() > 4)
            throw std::invalid_argument("tensor rank must be 1..4");
        v.assign(numel_of(shape), T{});
    }

    static std::size_t numel_of(const std::vector<std::size_t> &s)
    {
        std::size_t n = 1;
        for (std::size_t d : s)
            n *= d;
        return n;
    }

    std::size_t numel() const { return v.size(); }

    void ensure_grad()
    {
        if (g.size() != v.size())
            g.assign(v.size(), T{});
    }
    void zero_grad()
    {
        if (!g.empty())
            std::fill(g.begin(), g.end(), T{});
    }
};

template <typename T> using TensorPtr = std::shared_ptr<Tensor<T>>;

template <typename T>
TensorPtr<T> make_tensor(std::vector<std::size_t> shape)
{
    return std::make_shared<Tensor<T>>(std::move(shape));
}

inline std::string shape_str(const std::vector<std::size_t> &s)
{
    std::string out = "[";
    for (std::size_t i = 0; i < s.size(); ++i)
        out += (i ? "x" : "") + std::to_string(s[i]);
    return out + "]";
}

[[noreturn]] inline void shape_error(const char *op, const std::vector<std::size_t> &a,
                                     const std::vector<std::size_t> &b)
{
    throw std::invalid_argument(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                                shape_str(b));
}

// Records backward closures during the forward pass; backward() runs them in
// reverse and accumulates into each tensor's grad buffer.
template <typename T>
class Tape {
  public:
    void record(std::function<void()> op) { ops_.push_back(std::move(op)); }

    void backward(const TensorPtr<T> &loss)
    {
        if (loss->numel() != 1)
            throw std::invalid_argument("backward: loss must be a scalar tensor");
        loss->ensure_grad();
        loss->g[0] = T{1};
        for (auto it = ops_.rbegin(); it != ops_.rend(); ++it)
            (*it)();
    }

    void clear() { ops_.clear(); }
    std::size_t size() const { return ops_.size(); }

  private:
    std::vector<std::function<void()>> ops_;
};

namespace detail {

// counter-based uniform in [0,1); deterministic whatever the threading
inline double unit_hash(std::uint64_t seed, std::uint64_t i)
{
    std::uint64_t s = seed + (i + 1) * 0x9e3779b97f4a7c15ULL;
    return static_cast<double>(splitmix64(s) >> 11) * 0x1.0p-53;
}

constexpr std::size_t kParallelCutoff = 1 << 14;

} // namespace detail

// ---------------------------------------------------------------- conv2d
// x [B, Cin, H, W], kernels [Cout, Cin, KH, KW] (odd sizes), bias [Cout];
// stride 1, zero padding keeps the spatial size.
template <typename T>
TensorPtr<T> conv2d(Tape<T> &tape, const TensorPtr<T> &x, const TensorPtr<T> &k,
                    const TensorPtr<T> &bias)
{
    if (x->shape.size() != 4 || k->shape.size() != 4)
        shape_error("conv2d", x->shape, k->shape);
    const int batch = static_cast<int>(x->shape[0]), c_in = static_cast<int>(x->shape[1]);
    const int h = static_cast<int>(x->shape[2]), w = static_cast<int>(x->shape[3]);
    const int c_out = static_cast<int>(k->shape[0]);
    const int kh = static_cast<int>(k->shape[2]), kw = static_cast<int>(k->shape[3]);
    if (static_cast<int>(k->shape[1]) != c_in || kh % 2 == 0 || kw % 2 == 0)
        shape_error("conv2d", x->shape, k->shape);
    if (bias->shape.size() != 1 || static_cast<int>(bias->shape[0]) != c_out)
        shape_error("conv2d bias", bias->shape, k->shape);
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;

    auto y = make_tensor<T>({static_cast<std::size_t>(batch), static_cast<std::size_t>(c_out),
                             static_cast<std::size_t>(h), static_cast<std::size_t>(w)});
    const T *xv = x->v.data();
    const T *kv = k->v.data();
    const T *bv = bias->v.data();
    T *yv = y->v.data();

    const bool par = y->numel() * c_in * kh * kw > detail::kParallelCutoff;
#pragma omp parallel for collapse(2) schedule(static) num_threads(max_threads()) if (par)
    for (int b = 0; b < batch; ++b)
        for (int co = 0; co < c_out; ++co)
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < w; ++j) {
                    T s = bv[co];
                    for (int ci = 0; ci < c_in; ++ci)
                        for (int ki = 0; ki < kh; ++ki) {
                            int ii = i + ki - ph;
                            if (ii < 0 || ii >= h)
                                continue;
                            const T *xrow = xv + ((static_cast<std::size_t>(b) * c_in + ci) * h + ii) * w;
                            const T *krow = kv + ((static_cast<std::size_t>(co) * c_in + ci) * kh + ki) * kw;
                            for (int kj = 0; kj < kw; ++kj) {
                                int jj = j + kj - pw;
                                if (jj < 0 || jj >= w)
                                    continue;
                                s += xrow[jj] * krow[kj];
                            }
                        }
                    yv[((static_cast<std::size_t>(b) * c_out + co) * h + i) * w + j] = s;
                }

    tape.record([x, k, bias, y, batch, c_in, h, w, c_out, kh, kw, ph, pw, par]() {
        x->ensure_grad();
        k->ensure_grad();
        bias->ensure_grad();
        const T *gy = y->g.data();
        const T *xv2 = x->v.data();
        const T *kv2 = k->v.data();

        // dx: gather over output positions that touch each input element
        T *gx = x->g.data();
#pragma omp parallel for collapse(2) schedule(static) num_threads(max_threads()) if (par)
        for (int b = 0; b < batch; ++b)
            for (int ci = 0; ci < c_in; ++ci)
                for (int i = 0; i < h; ++i)
                    for (int j = 0; j < w; ++j) {
                        T s{};
                        for (int co = 0; co < c_out; ++co)
                            for (int ki = 0; ki < kh; ++ki) {
                                int oi = i - ki + ph;
                                if (oi < 0 || oi >= h)
                                    continue;
                                for (int kj = 0; kj < kw; ++kj) {
                                    int oj = j - kj + pw;
                                    if (oj < 0 || oj >= w)
                                        continue;
                                    s += gy[((static_cast<std::size_t>(b) * c_out + co) * h + oi) * w + oj] *
                                         kv2[((static_cast<std::size_t>(co) * c_in + ci) * kh + ki) * kw + kj];
                                }
                            }
                        gx[((static_cast<std::size_t>(b) * c_in + ci) * h + i) * w + j] += s;
                    }

        // dk: each kernel element reduces over batch and positions
        T *gk = k->g.data();
#pragma omp parallel for collapse(2) schedule(static) num_threads(max_threads()) if (par)
        for (int co = 0; co < c_out; ++co)
            for (int ci = 0; ci < c_in; ++ci)
                for (int ki = 0; ki < kh; ++ki)
                    for (int kj = 0; kj < kw; ++kj) {
                        T s{};
                        for (int b = 0; b < batch; ++b)
                            for (int i = 0; i < h; ++i) {
                                int ii = i + ki - ph;
                                if (ii < 0 || ii >= h)
                                    continue;
                                for (int j = 0; j < w; ++j) {
                                    int jj = j + kj - pw;
                                    if (jj < 0 || jj >= w)
                                        continue;
                                    s += gy[((static_cast<std::size_t>(b) * c_out + co) * h + i) * w + j] *
                                         xv2[((static_cast<std::size_t>(b) * c_in + ci) * h + ii) * w + jj];
                                }
                            }
                        gk[((static_cast<std::size_t>(co) * c_in + ci) * kh + ki) * kw + kj] += s;
                    }

        T *gb = bias->g.data();
        for (int co = 0; co < c_out; ++co) {
            T s{};
            for (int b = 0; b < batch; ++b)
                for (int i = 0; i < h; ++i)
                    for (int j = 0; j < w; ++j)
                        s += gy[((static_cast<std::size_t>(b) * c_out + co) * h + i) * w + j];
            gb[co] += s;
        }
    });
    return y;
}

// ------------------------------------------------------------------ relu
template <typename T>
TensorPtr<T> relu(Tape<T> &tape, const TensorPtr<T> &x)
{
    auto y = make_tensor<T>(x->shape);
    for (std::size_t i = 0; i < x->numel(); ++i)
        y->v[i] = x->v[i] > T{} ? x->v[i] : T{};
    tape.record([x, y]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < x->numel(); ++i)
            if (x->v[i] > T{})
                x->g[i] += y->g[i];
    });
    return y;
}

// ------------------------------------------------------------------- add
template <typename T>
TensorPtr<T> residual_add(Tape<T> &tape, const TensorPtr<T> &a, const TensorPtr<T> &b)
{
    if (a->shape != b->shape)
        shape_error("residual_add", a->shape, b->shape);
    auto y = make_tensor<T>(a->shape);
    for (std::size_t i = 0; i < y->numel(); ++i)
        y->v[i] = a->v[i] + b->v[i];
    tape.record([a, b, y]() {
        a->ensure_grad();
        b->ensure_grad();
        for (std::size_t i = 0; i < y->numel(); ++i) {
            a->g[i] += y->g[i];
            b->g[i] += y->g[i];
        }
    });
    return y;
}

template <typename T>
TensorPtr<T> add(Tape<T> &tape, const TensorPtr<T> &a, const TensorPtr<T> &b)
{
    return residual_add(tape, a, b);
}

// ---------------------------------------------------------------- scale
template <typename T>
TensorPtr<T> scale(Tape<T> &tape, const TensorPtr<T> &x, T c)
{
    auto y = make_tensor<T>(x->shape);
    for (std::size_t i = 0; i < x->numel(); ++i)
        y->v[i] = c * x->v[i];
    tape.record([x, y, c]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < x->numel(); ++i)
            x->g[i] += c * y->g[i];
    });
    return y;
}

// ---------------------------------------------------------------- linear
// y = x Wt + b applied to the last axis; x [..., din], wt [din, dout].
template <typename T>
TensorPtr<T> linear(Tape<T> &tape, const TensorPtr<T> &x, const TensorPtr<T> &wt,
                    const TensorPtr<T> &b)
{
    if (wt->shape.size() != 2 || x->shape.empty() || x->shape.back() != wt->shape[0])
        shape_error("linear", x->shape, wt->shape);
    const std::size_t din = wt->shape[0], dout = wt->shape[1];
    if (b->shape.size() != 1 || b->shape[0] != dout)
        shape_error("linear bias", b->shape, wt->shape);
    const std::size_t rows = x->numel() / din;

    std::vector<std::size_t> yshape = x->shape;
    yshape.back() = dout;
    auto y = make_tensor<T>(yshape);

    const T *xv = x->v.data();
    const T *wv = wt->v.data();
    const T *bv = b->v.data();
    T *yv = y->v.data();
    const bool par = rows * din * dout > detail::kParallelCutoff;
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (par)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(rows); ++r)
        for (std::size_t o = 0; o < dout; ++o) {
            T s = bv[o];
            const T *xr = xv + static_cast<std::size_t>(r) * din;
            for (std::size_t i = 0; i < din; ++i)
                s += xr[i] * wv[i * dout + o];
            yv[static_cast<std::size_t>(r) * dout + o] = s;
        }

    tape.record([x, wt, b, y, rows, din, dout, par]() {
        x->ensure_grad();
        wt->ensure_grad();
        b->ensure_grad();
        const T *gy = y->g.data();
        const T *xv2 = x->v.data();
        const T *wv2 = wt->v.data();

        T *gx = x->g.data();
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (par)
        for (std::int64_t r = 0; r < static_cast<std::int64_t>(rows); ++r)
            for (std::size_t i = 0; i < din; ++i) {
                T s{};
                const T *gyr = gy + static_cast<std::size_t>(r) * dout;
                for (std::size_t o = 0; o < dout; ++o)
                    s += gyr[o] * wv2[i * dout + o];
                gx[static_cast<std::size_t>(r) * din + i] += s;
            }

        T *gw = wt->g.data();
#pragma omp parallel for schedule(static) num_threads(max_threads()) if (par)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(din); ++i)
            for (std::size_t o = 0; o < dout; ++o) {
                T s{};
                for (std::size_t r = 0; r < rows; ++r)
                    s += xv2[r * din + i] * gy[r * dout + o];
                gw[static_cast<std::size_t>(i) * dout + o] += s;
            }

        T *gb = b->g.data();
        for (std::size_t o = 0; o < dout; ++o) {
            T s{};
            for (std::size_t r = 0; r < rows; ++r)
                s += gy[r * dout + o];
            gb[o] += s;
        }
    });
    return y;
}

// ------------------------------------------------------------------- bmm
// Batched matmul on the last two axes; a [..., R, P], b [..., P, C] (or
// [..., C, P] with transpose_b). Leading axes must agree.
template <typename T>
TensorPtr<T> matmul(Tape<T> &tape, const TensorPtr<T> &a, const TensorPtr<T> &b,
                    bool transpose_b = false)
{
    if (a->shape.size() < 2 || b->shape.size() != a->shape.size())
        shape_error("matmul", a->shape, b->shape);
    const std::size_t rank = a->shape.size();
    std::size_t batch = 1;
    for (std::size_t d = 0; d + 2 < rank; ++d) {
        if (a->shape[d] != b->shape[d])
            shape_error("matmul", a->shape, b->shape);
        batch *= a->shape[d];
    }
    const std::size_t rows = a->shape[rank - 2], inner = a->shape[rank - 1];
    const std::size_t cols = transpose_b ? b->shape[rank - 2] : b->shape[rank - 1];
    const std::size_t b_inner = transpose_b ? b->shape[rank - 1] : b->shape[rank - 2];
    if (b_inner != inner)
        shape_error("matmul", a->shape, b->shape);

    std::vector<std::size_t> yshape(a->shape.begin(), a->shape.end() - 2);
    yshape.push_back(rows);
    yshape.push_back(cols);
    auto y = make_tensor<T>(yshape);

    auto a_at = [&](const T *p, std::size_t n, std::size_t r, std::size_t c) {
        return p[(n * rows + r) * inner + c];
    };
    auto b_at = [&, transpose_b](const T *p, std::size_t n, std::size_t r, std::size_t c) {
        return transpose_b ? p[(n * cols + c) * inner + r] : p[(n * inner + r) * cols + c];
    };

    const T *av = a->v.data();
    const T *bv = b->v.data();
    T *yv = y->v.data();
    for (std::size_t n = 0; n < batch; ++n)
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                T s{};
                for (std::size_t i = 0; i < inner; ++i)
                    s += a_at(av, n, r, i) * b_at(bv, n, i, c);
                yv[(n * rows + r) * cols + c] = s;
            }

    tape.record([a, b, y, batch, rows, cols, inner, transpose_b]() {
        a->ensure_grad();
        b->ensure_grad();
        const T *gy = y->g.data();
        const T *av2 = a->v.data();
        const T *bv2 = b->v.data();
        T *ga = a->g.data();
        T *gb = b->g.data();
        for (std::size_t n = 0; n < batch; ++n) {
            // dA = dY * B^T (or dY * B when B was transposed)
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t i = 0; i < inner; ++i) {
                    T s{};
                    for (std::size_t c = 0; c < cols; ++c) {
                        T bval = transpose_b ? bv2[(n * cols + c) * inner + i]
                                             : bv2[(n * inner + i) * cols + c];
                        s += gy[(n * rows + r) * cols + c] * bval;
                    }
                    ga[(n * rows + r) * inner + i] += s;
                }
            // dB
            if (transpose_b) {
                for (std::size_t c = 0; c < cols; ++c)
                    for (std::size_t i = 0; i < inner; ++i) {
                        T s{};
                        for (std::size_t r = 0; r < rows; ++r)
                            s += gy[(n * rows + r) * cols + c] * av2[(n * rows + r) * inner + i];
                        gb[(n * cols + c) * inner + i] += s;
                    }
            } else {
                for (std::size_t i = 0; i < inner; ++i)
                    for (std::size_t c = 0; c < cols; ++c) {
                        T s{};
                        for (std::size_t r = 0; r < rows; ++r)
                            s += av2[(n * rows + r) * inner + i] * gy[(n * rows + r) * cols + c];
                        gb[(n * inner + i) * cols + c] += s;
                    }
            }
        }
    });
    return y;
}

// ---------------------------------------------------------- softmax_rows
// softmax over the last axis, numerically shifted by the row max
template <typename T>
TensorPtr<T> softmax_rows(Tape<T> &tape, const TensorPtr<T> &x)
{
    const std::size_t cols = x->shape.back();
    const std::size_t rows = x->numel() / cols;
    auto y = make_tensor<T>(x->shape);
    for (std::size_t r = 0; r < rows; ++r) {
        const T *xr = x->v.data() + r * cols;
        T *yr = y->v.data() + r * cols;
        T m = xr[0];
        for (std::size_t c = 1; c < cols; ++c)
            m = std::max(m, xr[c]);
        T sum{};
        for (std::size_t c = 0; c < cols; ++c) {
            yr[c] = std::exp(xr[c] - m);
            sum += yr[c];
        }
        for (std::size_t c = 0; c < cols; ++c)
            yr[c] /= sum;
    }
    tape.record([x, y, rows, cols]() {
        x->ensure_grad();
        for (std::size_t r = 0; r < rows; ++r) {
            const T *yr = y->v.data() + r * cols;
            const T *gy = y->g.data() + r * cols;
            T dot{};
            for (std::size_t c = 0; c < cols; ++c)
                dot += gy[c] * yr[c];
            T *gx = x->g.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c)
                gx[c] += yr[c] * (gy[c] - dot);
        }
    });
    return y;
}

// --------------------------------------------------------------- dropout
// Train mode zeroes each element with probability `rate` and scales the
// survivors by 1/(1-rate); eval mode is the identity. The mask depends only
// on (seed, element index).
template <typename T>
TensorPtr<T> dropout(Tape<T> &tape, const TensorPtr<T> &x, double rate, bool training,
                     std::uint64_t seed)
{
    if (rate < 0.0 || rate >= 1.0)
        throw std::invalid_argument("dropout rate must be in [0, 1)");
    auto y = make_tensor<T>(x->shape);
    if (!training || rate == 0.0) {
        y->v = x->v;
        tape.record([x, y]() {
            x->ensure_grad();
            for (std::size_t i = 0; i < x->numel(); ++i)
                x->g[i] += y->g[i];
        });
        return y;
    }
    const T inv_keep = T(1.0 / (1.0 - rate));
    auto mask = std::make_shared<std::vector<bool>>(x->numel());
    for (std::size_t i = 0; i < x->numel(); ++i) {
        bool keep = detail::unit_hash(seed, i) >= rate;
        (*mask)[i] = keep;
        y->v[i] = keep ? x->v[i] * inv_keep : T{};
    }
    tape.record([x, y, mask, inv_keep]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < x->numel(); ++i)
            if ((*mask)[i])
                x->g[i] += y->g[i] * inv_keep;
    });
    return y;
}

// --------------------------------------------------------------- reshape
template <typename T>
TensorPtr<T> reshape(Tape<T> &tape, const TensorPtr<T> &x, std::vector<std::size_t> shape)
{
    if (Tensor<T>::numel_of(shape) != x->numel())
        shape_error("reshape", x->shape, shape);
    auto y = make_tensor<T>(std::move(shape));
    y->v = x->v;
    tape.record([x, y]() {
        x->ensure_grad();
        for (std::size_t i = 0; i < x->numel(); ++i)
            x->g[i] += y->g[i];
    });
    return y;
}

// ------------------------------------------------------------ stack_rows
// Stacks L tensors of shape [B, D] into [B, L, D].
template <typename T>
TensorPtr<T> stack_rows(Tape<T> &tape, const std::vector<TensorPtr<T>> &parts)
{
    if (parts.empty())
        throw std::invalid_argument("stack_rows: no inputs");
    const std::size_t batch = parts[0]->shape[0];
    const std::size_t d = parts[0]->shape[1];
    for (const auto &p : parts)
        if (p->shape.size() != 2 || p->shape[0] != batch || p->shape[1] != d)
            shape_error("stack_rows", parts[0]->shape, p->shape);
    const std::size_t l = parts.size();
    auto y = make_tensor<T>({batch, l, d});
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t b = 0; b < batch; ++b)
            std::copy(parts[i]->v.begin() + b * d, parts[i]->v.begin() + (b + 1) * d,
                      y->v.begin() + (b * l + i) * d);
    tape.record([parts, y, batch, d, l]() {
        for (std::size_t i = 0; i < l; ++i) {
            parts[i]->ensure_grad();
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t c = 0; c < d; ++c)
                    parts[i]->g[b * d + c] += y->g[(b * l + i) * d + c];
        }
    });
    return y;
}

// ------------------------------------------------------------ concat_cols
// Concatenates [B, D_i] tensors into [B, sum D_i].
template <typename T>
TensorPtr<T> concat_cols(Tape<T> &tape, const std::vector<TensorPtr<T>> &parts)
{
    if (parts.empty())
        throw std::invalid_argument("concat_cols: no inputs");
    const std::size_t batch = parts[0]->shape[0];
    std::size_t total = 0;
    for (const auto &p : parts) {
        if (p->shape.size() != 2 || p->shape[0] != batch)
            shape_error("concat_cols", parts[0]->shape, p->shape);
        total += p->shape[1];
    }
    auto y = make_tensor<T>({batch, total});
    std::size_t at = 0;
    for (const auto &p : parts) {
        const std::size_t d = p->shape[1];
        for (std::size_t b = 0; b < batch; ++b)
            std::copy(p->v.begin() + b * d, p->v.begin() + (b + 1) * d,
                      y->v.begin() + b * total + at);
        at += d;
    }
    tape.record([parts, y, batch, total]() {
        std::size_t at2 = 0;
        for (const auto &p : parts) {
            p->ensure_grad();
            const std::size_t d = p->shape[1];
            for (std::size_t b = 0; b < batch; ++b)
                for (std::size_t c = 0; c < d; ++c)
                    p->g[b * d + c] += y->g[b * total + at2 + c];
            at2 += d;
        }
    });
    return y;
}

// ------------------------------------------------------------ slice_axis1
// Rows [from, to) of the middle axis of a [B, L, D] tensor.
template <typename T>
TensorPtr<T> slice_axis1(Tape<T> &tape, const TensorPtr<T> &x, std::size_t from, std::size_t to)
{
    if (x->shape.size() != 3 || from >= to || to > x->shape[1])
        throw std::invalid_argument("slice_axis1: bad range for shape " + shape_str(x->shape));
    const std::size_t batch = x->shape[0], l = x->shape[1], d = x->shape[2];
    const std::size_t out_l = to - from;
    auto y = make_tensor<T>({batch, out_l, d});
    for (std::size_t b = 0; b < batch; ++b)
        for (std::size_t i = 0; i < out_l; ++i)
            std::copy(x->v.begin() + (b * l + from + i) * d,
                      x->v.begin() + (b * l + from + i + 1) * d,
                      y->v.begin() + (b * out_l + i) * d);
    tape.record([x, y, batch, l, d, from, out_l]() {
        x->ensure_grad();
        for (std::size_t b = 0; b < batch; ++b)
            for (std::size_t i = 0; i < out_l; ++i)
                for (std::size_t c = 0; c < d; ++c)
                    x->g[(b * l + from + i) * d + c] += y->g[(b * out_l + i) * d + c];
    });
    return y;
}

// ---------------------------------------------------------- cross_entropy
// Mean over rows of -log softmax(logits)[label]; natural-log convention.
// logits [..., C] flattened to [N, C]; labels length N.
template <typename T>
TensorPtr<T> cross_entropy(Tape<T> &tape, const TensorPtr<T> &logits,
                           std::span<const std::uint32_t> labels)
{
    const std::size_t cols = logits->shape.back();
    const std::size_t rows = logits->numel() / cols;
    if (labels.size() != rows)
        throw std::invalid_argument("cross_entropy: label count != logit rows");
    for (std::size_t r = 0; r < rows; ++r)
        if (labels[r] >= cols)
            throw std::invalid_argument("cross_entropy: label out of range");

    auto lse = std::make_shared<std::vector<T>>(rows);
    auto y = make_tensor<T>({1});
    T loss{};
    for (std::size_t r = 0; r < rows; ++r) {
        const T *lr = logits->v.data() + r * cols;
        T m = lr[0];
        for (std::size_t c = 1; c < cols; ++c)
            m = std::max(m, lr[c]);
        T sum{};
        for (std::size_t c = 0; c < cols; ++c)
            sum += std::exp(lr[c] - m);
        (*lse)[r] = m + std::log(sum);
        loss += (*lse)[r] - lr[labels[r]];
    }
    y->v[0] = loss / T(rows);

    std::vector<std::uint32_t> lab(labels.begin(), labels.end());
    tape.record([logits, y, lse, lab = std::move(lab), rows, cols]() {
        logits->ensure_grad();
        const T gout = y->g[0] / T(rows);
        for (std::size_t r = 0; r < rows; ++r) {
            const T *lr = logits->v.data() + r * cols;
            T *gr = logits->g.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) {
                T p = std::exp(lr[c] - (*lse)[r]);
                gr[c] += gout * (p - (c == lab[r] ? T{1} : T{}));
            }
        }
    });
    return y;
}

} // namespace risbeam::nn

#endif
