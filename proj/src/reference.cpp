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

#include "risbeam/reference.hpp"

#include <cmath>
#include <limits>

namespace risbeam::ref {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

CMat dense_mul(const CMat &a, const CMat &b)
{
    CMat c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            cxd s{};
            for (std::size_t k = 0; k < a.cols(); ++k)
                s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}
} // namespace

CMat dense_phase_matrix(const BeamSelection &sel, const CodebookTriple &cb,
                        const SystemConfig &cfg)
{
    CMat phi(cfg.m, cfg.m);
    for (int ms = 0; ms < cfg.m_s; ++ms)
        for (int b = 0; b < cfg.m_b; ++b) {
            int i = ms * cfg.m_b + b;
            phi(i, i) = cfg.reflect_amplitude * cb.s[sel.s_idx[ms]][b];
        }
    return phi;
}

CMat dense_block_combiner(const BeamSelection &sel, const CodebookTriple &cb,
                          const SystemConfig &cfg)
{
    CMat wr(cfg.n_s, cfg.n_r);
    for (int n = 0; n < cfg.n_s; ++n)
        for (int b = 0; b < cfg.n_b; ++b)
            wr(n, n * cfg.n_b + b) = cb.w[sel.w_idx[n]][b];
    return wr;
}

CMat equivalent_channel_dense(const ChannelSet &ch, const BeamSelection &sel,
                              const CodebookTriple &cb, const SystemConfig &cfg)
{
    CMat phi = dense_phase_matrix(sel, cb, cfg);
    CMat wr = dense_block_combiner(sel, cb, cfg);
    CMat left = dense_mul(dense_mul(wr, ch.h_r), phi); // N_s x M

    CMat hbar(cfg.n_s, cfg.k);
    for (int k = 0; k < cfg.k; ++k) {
        CMat f(cfg.n_t, 1);
        for (int j = 0; j < cfg.n_t; ++j)
            f(j, 0) = cb.f[sel.f_idx[k]][j];
        CMat col = dense_mul(dense_mul(left, ch.h_users[k]), f); // N_s x 1
        for (int n = 0; n < cfg.n_s; ++n)
            hbar(n, k) = col(n, 0);
    }
    return hbar;
}

CMat gram_inverse_gauss_jordan(const CMat &hbar)
{
    const int n = static_cast<int>(hbar.cols());
    CMat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            cxd s{};
            for (std::size_t r = 0; r < hbar.rows(); ++r)
                s += std::conj(hbar(r, i)) * hbar(r, j);
            g(i, j) = s;
        }

    CMat inv = CMat::identity(n);
    for (int c = 0; c < n; ++c) {
        int p = c;
        double best = std::abs(g(c, c));
        for (int r = c + 1; r < n; ++r)
            if (std::abs(g(r, c)) > best) {
                best = std::abs(g(r, c));
                p = r;
            }
        if (best == 0.0)
            throw rank_deficiency_error("gram_inverse_gauss_jordan: singular matrix", kInf);
        if (p != c)
            for (int j = 0; j < n; ++j) {
                std::swap(g(c, j), g(p, j));
                std::swap(inv(c, j), inv(p, j));
            }
        cxd pivot = g(c, c);
        for (int j = 0; j < n; ++j) {
            g(c, j) /= pivot;
            inv(c, j) /= pivot;
        }
        for (int r = 0; r < n; ++r) {
            if (r == c)
                continue;
            cxd m = g(r, c);
            if (m == cxd{})
                continue;
            for (int j = 0; j < n; ++j) {
                g(r, j) -= m * g(c, j);
                inv(r, j) -= m * inv(c, j);
            }
        }
    }
    return inv;
}

double sum_rate_dense(const ChannelSet &ch, const BeamSelection &sel, const CodebookTriple &cb,
                      const SystemConfig &cfg)
{
    CMat hbar = equivalent_channel_dense(ch, sel, cb, cfg);
    CMat inv = gram_inverse_gauss_jordan(hbar);
    const double snr_scale =
        cfg.power_watts() / (static_cast<double>(cfg.n_t) * cfg.n_b * cfg.n0);
    double rate = 0.0;
    for (int k = 0; k < cfg.k; ++k)
        rate += std::log2(1.0 + snr_scale / inv(k, k).real());
    return rate;
}

SearchReport exhaustive_search_sixloop(const ChannelSet &ch, const CodebookTriple &cb,
                                       const SystemConfig &cfg)
{
    if (cfg.k != 2 || cfg.m_s != 2 || cfg.n_s != 2)
        throw std::invalid_argument("sixloop oracle expects K = M_s = N_s = 2");

    const std::uint32_t nf = static_cast<std::uint32_t>(cb.f.size());
    const std::uint32_t ns = static_cast<std::uint32_t>(cb.s.size());
    const std::uint32_t nw = static_cast<std::uint32_t>(cb.w.size());

    SearchReport rep;
    rep.best_rate = -kInf;
    BeamSelection sel{{0, 0}, {0, 0}, {0, 0}};
    for (std::uint32_t f0 = 0; f0 < nf; ++f0)
        for (std::uint32_t f1 = 0; f1 < nf; ++f1)
            for (std::uint32_t s0 = 0; s0 < ns; ++s0)
                for (std::uint32_t s1 = 0; s1 < ns; ++s1)
                    for (std::uint32_t w0 = 0; w0 < nw; ++w0)
                        for (std::uint32_t w1 = 0; w1 < nw; ++w1) {
                            sel.f_idx = {f0, f1};
                            sel.s_idx = {s0, s1};
                            sel.w_idx = {w0, w1};
                            double r;
                            try {
                                r = sum_rate_dense(ch, sel, cb, cfg);
                            } catch (const rank_deficiency_error &) {
                                r = -kInf;
                            }
                            ++rep.candidates_evaluated;
                            if (r > rep.best_rate) {
                                rep.best_rate = r;
                                rep.best_selection = sel;
                            }
                        }
    return rep;
}

CMat equivalent_channel_instrumented(const ChannelSet &ch, const BeamSelection &sel,
                                     const CodebookTriple &cb, const SystemConfig &cfg,
                                     MultCounter &counter)
{
    CMat phi = dense_phase_matrix(sel, cb, cfg);
    CMat hbar(cfg.n_s, cfg.k);

    std::vector<cxd> t1(cfg.n_t), t2(cfg.m), t3(cfg.m), t4(cfg.n_r);
    for (int k = 0; k < cfg.k; ++k)
        for (int n = 0; n < cfg.n_s; ++n) {
            // beam times unit symbol: N_t multiplications
            for (int j = 0; j < cfg.n_t; ++j) {
                t1[j] = cb.f[sel.f_idx[k]][j] * cxd(1.0, 0.0);
                ++counter.chain;
            }
            // H_k t1: M * N_t
            for (int i = 0; i < cfg.m; ++i) {
                cxd s{};
                for (int j = 0; j < cfg.n_t; ++j) {
                    s += ch.h_users[k](i, j) * t1[j];
                    ++counter.chain;
                }
                t2[i] = s;
            }
            // Phi t2 as a dense M x M product: M^2
            for (int i = 0; i < cfg.m; ++i) {
                cxd s{};
                for (int j = 0; j < cfg.m; ++j) {
                    s += phi(i, j) * t2[j];
                    ++counter.chain;
                }
                t3[i] = s;
            }
            // H_r t3: N_r * M
            for (int i = 0; i < cfg.n_r; ++i) {
                cxd s{};
                for (int j = 0; j < cfg.m; ++j) {
                    s += ch.h_r(i, j) * t3[j];
                    ++counter.chain;
                }
                t4[i] = s;
            }
            // subarray combiner dot, tallied separately
            cxd s{};
            for (int b = 0; b < cfg.n_b; ++b) {
                s += cb.w[sel.w_idx[n]][b] * t4[n * cfg.n_b + b];
                ++counter.combine;
            }
            hbar(n, k) = s;
        }
    return hbar;
}

int numerical_rank(CMat a, double rel_tol)
{
    const std::size_t rows = a.rows(), cols = a.cols();
    double max_entry = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        max_entry = std::max(max_entry, std::abs(a.data()[i]));
    if (max_entry == 0.0)
        return 0;
    const double tol = rel_tol * max_entry;

    int rank = 0;
    std::size_t r0 = 0;
    for (std::size_t c = 0; c < cols && r0 < rows; ++c) {
        std::size_t p = r0;
        double best = std::abs(a(r0, c));
        for (std::size_t r = r0 + 1; r < rows; ++r)
            if (std::abs(a(r, c)) > best) {
                best = std::abs(a(r, c));
                p = r;
            }
        if (best <= tol)
            continue;
        if (p != r0)
            for (std::size_t j = 0; j < cols; ++j)
                std::swap(a(r0, j), a(p, j));
        for (std::size_t r = r0 + 1; r < rows; ++r) {
            cxd m = a(r, c) / a(r0, c);
            for (std::size_t j = 0; j < cols; ++j)
                a(r, j) -= m * a(r0, j);
        }
        ++rank;
        ++r0;
    }
    return rank;
}

template <typename T>
std::vector<T> conv2d_naive(const std::vector<T> &x, int batch, int c_in, int h, int w,
                            const std::vector<T> &k, int c_out, int kh, int kw,
                            const std::vector<T> &bias)
{
    const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
    std::vector<T> y(static_cast<std::size_t>(batch) * c_out * h * w);
    for (int b = 0; b < batch; ++b)
        for (int co = 0; co < c_out; ++co)
            for (int i = 0; i < h; ++i)
                for (int j = 0; j < w; ++j) {
                    T s = bias[co];
                    for (int ci = 0; ci < c_in; ++ci)
                        for (int ki = 0; ki < kh; ++ki)
                            for (int kj = 0; kj < kw; ++kj) {
                                int ii = i + ki - ph, jj = j + kj - pw;
                                if (ii < 0 || ii >= h || jj < 0 || jj >= w)
                                    continue;
                                s += x[((static_cast<std::size_t>(b) * c_in + ci) * h + ii) * w + jj] *
                                     k[((static_cast<std::size_t>(co) * c_in + ci) * kh + ki) * kw + kj];
                            }
                    y[((static_cast<std::size_t>(b) * c_out + co) * h + i) * w + j] = s;
                }
    return y;
}

template std::vector<float> conv2d_naive<float>(const std::vector<float> &, int, int, int, int,
                                                const std::vector<float> &, int, int, int,
                                                const std::vector<float> &);
template std::vector<double> conv2d_naive<double>(const std::vector<double> &, int, int, int, int,
                                                  const std::vector<double> &, int, int, int,
                                                  const std::vector<double> &);

} // namespace risbeam::ref
