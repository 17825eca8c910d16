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

#include "risbeam/metric.hpp"

#include <cmath>
#include <limits>

namespace risbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogDetFloor = -690.77552789821368; // log(1e-300)
constexpr double kCondLimit = 1e12;
constexpr double kLn2 = 0.6931471805599453;

// In-place partial-pivot LU on an n x n buffer; returns log|det|, -inf when
// singular. Allocation-free so sweep hot paths can reuse scratch space.
double logdet_inplace(cxd *a, int n)
{
    double logdet = 0.0;
    for (int c = 0; c < n; ++c) {
        int p = c;
        double best = std::abs(a[c * n + c]);
        for (int r = c + 1; r < n; ++r) {
            double m = std::abs(a[r * n + c]);
            if (m > best) {
                best = m;
                p = r;
            }
        }
        if (p != c)
            for (int j = 0; j < n; ++j)
                std::swap(a[c * n + j], a[p * n + j]);
        cxd pivot = a[c * n + c];
        double pm = std::abs(pivot);
        if (pm == 0.0)
            return -kInf;
        logdet += std::log(pm);
        for (int r = c + 1; r < n; ++r) {
            cxd m = a[r * n + c] / pivot;
            for (int j = c + 1; j < n; ++j)
                a[r * n + j] -= m * a[c * n + j];
        }
    }
    return logdet;
}

double log2_one_plus_exp_gamma(double log_gamma)
{
    if (log_gamma >= 700.0)
        return log_gamma / kLn2; // 1 + gamma == gamma to machine precision
    return std::log1p(std::exp(log_gamma)) / kLn2;
}

} // namespace

void validate_selection(const BeamSelection &sel, const CodebookTriple &cb,
                        const SystemConfig &cfg)
{
    if (static_cast<int>(sel.f_idx.size()) != cfg.k ||
        static_cast<int>(sel.s_idx.size()) != cfg.m_s ||
        static_cast<int>(sel.w_idx.size()) != cfg.n_s)
        throw std::invalid_argument("selection index counts do not match the configuration");
    for (auto i : sel.f_idx)
        if (i >= cb.f.size())
            throw std::invalid_argument("user beam index out of codebook bounds");
    for (auto i : sel.s_idx)
        if (i >= cb.s.size())
            throw std::invalid_argument("RIS phase index out of codebook bounds");
    for (auto i : sel.w_idx)
        if (i >= cb.w.size())
            throw std::invalid_argument("BS beam index out of codebook bounds");
}

std::vector<cxd> assemble_phase_matrix(const BeamSelection &sel, const CodebookTriple &cb,
                                       const SystemConfig &cfg)
{
    validate_selection(sel, cb, cfg);
    std::vector<cxd> diag(static_cast<std::size_t>(cfg.m));
    for (int ms = 0; ms < cfg.m_s; ++ms) {
        const auto &lam = cb.s[sel.s_idx[ms]];
        if (static_cast<int>(lam.size()) != cfg.m_b)
            throw std::invalid_argument("phase codeword length does not match M_B");
        for (int b = 0; b < cfg.m_b; ++b)
            diag[static_cast<std::size_t>(ms) * cfg.m_b + b] = cfg.reflect_amplitude * lam[b];
    }
    return diag;
}

BlockCombiner assemble_block_combiner(const BeamSelection &sel, const CodebookTriple &cb,
                                      const SystemConfig &cfg)
{
    validate_selection(sel, cb, cfg);
    BlockCombiner wr;
    wr.n_b = cfg.n_b;
    wr.rows.reserve(cfg.n_s);
    for (int n = 0; n < cfg.n_s; ++n) {
        const auto &w = cb.w[sel.w_idx[n]];
        if (static_cast<int>(w.size()) != cfg.n_b)
            throw std::invalid_argument("combiner codeword length does not match N_B");
        wr.rows.push_back(w);
    }
    return wr;
}

CMat equivalent_channel(const ChannelSet &ch, const BeamSelection &sel, const CodebookTriple &cb,
                        const SystemConfig &cfg)
{
    if (static_cast<int>(ch.h_r.rows()) != cfg.n_r || static_cast<int>(ch.h_r.cols()) != cfg.m ||
        static_cast<int>(ch.h_users.size()) != cfg.k)
        throw std::invalid_argument("channel dimensions do not match the configuration");

    auto phase = assemble_phase_matrix(sel, cb, cfg);
    auto wr = assemble_block_combiner(sel, cb, cfg);

    CMat hbar(cfg.n_s, cfg.k);
    std::vector<cxd> u(cfg.m), y(cfg.n_r);
    for (int k = 0; k < cfg.k; ++k) {
        const CMat &hk = ch.h_users[k];
        if (static_cast<int>(hk.rows()) != cfg.m || static_cast<int>(hk.cols()) != cfg.n_t)
            throw std::invalid_argument("user channel dimensions do not match the configuration");
        const auto &f = cb.f[sel.f_idx[k]];
        if (static_cast<int>(f.size()) != cfg.n_t)
            throw std::invalid_argument("user beam length does not match N_t");

        // u = Phi * (H_k f), then y = H_r u, then one dot per BS subarray
        for (int i = 0; i < cfg.m; ++i) {
            cxd s{};
            for (int j = 0; j < cfg.n_t; ++j)
                s += hk(i, j) * f[j];
            u[i] = phase[i] * s;
        }
        for (int i = 0; i < cfg.n_r; ++i) {
            cxd s{};
            const cxd *row = ch.h_r.row(i);
            for (int j = 0; j < cfg.m; ++j)
                s += row[j] * u[j];
            y[i] = s;
        }
        for (int n = 0; n < cfg.n_s; ++n) {
            cxd s{};
            const auto &w = wr.rows[n];
            for (int b = 0; b < cfg.n_b; ++b)
                s += w[b] * y[static_cast<std::size_t>(n) * cfg.n_b + b];
            hbar(n, k) = s;
        }
    }
    return hbar;
}

CMat zf_combiner(const CMat &hbar)
{
    CMat g = gram(hbar);
    auto f = lu_factor(g);
    if (f.singular)
        throw rank_deficiency_error("zf_combiner: singular Gram matrix", kInf);
    CMat inv = lu_solve(f, CMat::identity(g.rows()));
    double cond = norm1(g) * norm1(inv);
    if (!(cond < kCondLimit))
        throw rank_deficiency_error("zf_combiner: Gram condition estimate too large", cond);
    return mul(inv, adjoint(hbar));
}

double diag_inverse_entry(const CMat &hbar, int k)
{
    const int users = static_cast<int>(hbar.cols());
    if (k < 0 || k >= users)
        throw std::invalid_argument("diag_inverse_entry: user index out of range");

    CMat g = gram(hbar);
    auto fd = lu_factor(g);
    if (fd.singular || fd.log_abs_det < kLogDetFloor)
        throw rank_deficiency_error("diag_inverse_entry: Gram determinant below 1e-300",
                                    fd.singular ? kInf : std::exp(-fd.log_abs_det));

    if (users == 1)
        return std::exp(-fd.log_abs_det); // empty minor has determinant 1

    CMat minor(users - 1, users - 1);
    for (int i = 0, mi = 0; i < users; ++i) {
        if (i == k)
            continue;
        for (int j = 0, mj = 0; j < users; ++j) {
            if (j == k)
                continue;
            minor(mi, mj) = g(i, j);
            ++mj;
        }
        ++mi;
    }
    auto fn = lu_factor(minor);
    if (fn.singular)
        return 0.0;
    cxd phase = fn.det_phase * std::conj(fd.det_phase);
    return std::exp(fn.log_abs_det - fd.log_abs_det) * phase.real();
}

double sum_rate_hbar(const CMat &hbar, const SystemConfig &cfg, RateMode mode)
{
    const int users = static_cast<int>(hbar.cols());
    if (users < 1)
        throw std::invalid_argument("sum_rate: need at least one user");
    const double snr_scale =
        cfg.power_watts() / (static_cast<double>(cfg.n_t) * cfg.n_b * cfg.n0);

    double rate = 0.0;
    if (mode == RateMode::direct) {
        CMat g = gram(hbar);
        auto f = lu_factor(g);
        if (f.singular || f.log_abs_det < kLogDetFloor)
            throw rank_deficiency_error("sum_rate: rank-deficient equivalent channel", kInf);
        CMat inv = lu_solve(f, CMat::identity(g.rows()));
        for (int k = 0; k < users; ++k) {
            double d = inv(k, k).real();
            rate += log2_one_plus_exp_gamma(std::log(snr_scale) - std::log(d));
        }
    } else {
        for (int k = 0; k < users; ++k) {
            double d = diag_inverse_entry(hbar, k);
            rate += log2_one_plus_exp_gamma(std::log(snr_scale) - std::log(d));
        }
    }
    return rate;
}

double sum_rate(const ChannelSet &ch, const BeamSelection &sel, const CodebookTriple &cb,
                const SystemConfig &cfg, RateMode mode)
{
    return sum_rate_hbar(equivalent_channel(ch, sel, cb, cfg), cfg, mode);
}

SelectionEvaluator::SelectionEvaluator(const ChannelSet &ch, const CodebookTriple &cb,
                                       const SystemConfig &cfg)
    : ch_(ch), cb_(cb), cfg_(cfg),
      snr_scale_(cfg.power_watts() / (static_cast<double>(cfg.n_t) * cfg.n_b * cfg.n0)),
      phase_(cfg.m), z_(cfg.m), hbar_(cfg.n_s, cfg.k), gram_(cfg.k, cfg.k)
{
    // cache H_k f for every (user, user-beam) pair
    r_kf_.resize(static_cast<std::size_t>(cfg.k) * cb.f.size());
    for (int k = 0; k < cfg.k; ++k) {
        const CMat &hk = ch.h_users[k];
        for (std::size_t f = 0; f < cb.f.size(); ++f) {
            std::vector<cxd> r(cfg.m);
            for (int i = 0; i < cfg.m; ++i) {
                cxd s{};
                for (int j = 0; j < cfg.n_t; ++j)
                    s += hk(i, j) * cb.f[f][j];
                r[i] = s;
            }
            r_kf_[static_cast<std::size_t>(k) * cb.f.size() + f] = std::move(r);
        }
    }
    y_.assign(cfg.k, std::vector<cxd>(cfg.n_r));
    scratch_den_.resize(static_cast<std::size_t>(cfg.k) * cfg.k);
    scratch_num_.resize(static_cast<std::size_t>(cfg.k) * cfg.k);
}

void SelectionEvaluator::build_phase(std::span<const std::uint32_t> s_idx)
{
    for (int ms = 0; ms < cfg_.m_s; ++ms) {
        const auto &lam = cb_.s[s_idx[ms]];
        for (int b = 0; b < cfg_.m_b; ++b)
            phase_[static_cast<std::size_t>(ms) * cfg_.m_b + b] =
                cfg_.reflect_amplitude * lam[b];
    }
}

void SelectionEvaluator::propagate(int k, const cxd *r_vec)
{
    for (int i = 0; i < cfg_.m; ++i)
        z_[i] = phase_[i] * r_vec[i];
    auto &y = y_[k];
    for (int i = 0; i < cfg_.n_r; ++i) {
        cxd s{};
        const cxd *row = ch_.h_r.row(i);
        for (int j = 0; j < cfg_.m; ++j)
            s += row[j] * z_[j];
        y[i] = s;
    }
}

double SelectionEvaluator::rate_from_hbar()
{
    const int users = cfg_.k;
    for (int i = 0; i < users; ++i)
        for (int j = 0; j < users; ++j) {
            cxd s{};
            for (int n = 0; n < cfg_.n_s; ++n)
                s += std::conj(hbar_(n, i)) * hbar_(n, j);
            gram_(i, j) = s;
        }

    std::copy(gram_.data(), gram_.data() + gram_.size(), scratch_den_.begin());
    double log_den = logdet_inplace(scratch_den_.data(), users);
    if (log_den < kLogDetFloor)
        return -kInf;

    double rate = 0.0;
    const double log_snr = std::log(snr_scale_);
    for (int k = 0; k < users; ++k) {
        double log_num = 0.0;
        if (users > 1) {
            int m = users - 1;
            for (int i = 0, mi = 0; i < users; ++i) {
                if (i == k)
                    continue;
                for (int j = 0, mj = 0; j < users; ++j) {
                    if (j == k)
                        continue;
                    scratch_num_[static_cast<std::size_t>(mi) * m + mj] = gram_(i, j);
                    ++mj;
                }
                ++mi;
            }
            log_num = logdet_inplace(scratch_num_.data(), m);
            if (log_num == -kInf)
                return -kInf;
        }
        // log gamma_k = log snr - log [(G^-1)]_kk = log snr + log_den - log_num
        rate += log2_one_plus_exp_gamma(log_snr + log_den - log_num);
    }
    return rate;
}

double SelectionEvaluator::rate(const BeamSelection &sel)
{
    build_phase(sel.s_idx);
    for (int k = 0; k < cfg_.k; ++k) {
        propagate(k, r_kf_[static_cast<std::size_t>(k) * cb_.f.size() + sel.f_idx[k]].data());
        for (int n = 0; n < cfg_.n_s; ++n) {
            cxd s{};
            const auto &w = cb_.w[sel.w_idx[n]];
            for (int b = 0; b < cfg_.n_b; ++b)
                s += w[b] * y_[k][static_cast<std::size_t>(n) * cfg_.n_b + b];
            hbar_(n, k) = s;
        }
    }
    return rate_from_hbar();
}

void SelectionEvaluator::set_sw(std::span<const std::uint32_t> s_idx,
                                std::span<const std::uint32_t> w_idx)
{
    build_phase(s_idx);
    const std::size_t nf = cb_.f.size();
    colcache_.resize(static_cast<std::size_t>(cfg_.k) * nf * cfg_.n_s);
    for (int k = 0; k < cfg_.k; ++k)
        for (std::size_t f = 0; f < nf; ++f) {
            propagate(k, r_kf_[static_cast<std::size_t>(k) * nf + f].data());
            for (int n = 0; n < cfg_.n_s; ++n) {
                cxd s{};
                const auto &w = cb_.w[w_idx[n]];
                for (int b = 0; b < cfg_.n_b; ++b)
                    s += w[b] * y_[k][static_cast<std::size_t>(n) * cfg_.n_b + b];
                colcache_[(static_cast<std::size_t>(k) * nf + f) * cfg_.n_s + n] = s;
            }
        }
}

double SelectionEvaluator::rate_f(std::span<const std::uint32_t> f_idx)
{
    const std::size_t nf = cb_.f.size();
    for (int k = 0; k < cfg_.k; ++k) {
        const cxd *col = &colcache_[(static_cast<std::size_t>(k) * nf + f_idx[k]) * cfg_.n_s];
        for (int n = 0; n < cfg_.n_s; ++n)
            hbar_(n, k) = col[n];
    }
    return rate_from_hbar();
}

void SelectionEvaluator::set_fw(std::span<const std::uint32_t> f_idx,
                                std::span<const std::uint32_t> w_idx)
{
    cur_f_.assign(f_idx.begin(), f_idx.end());
    cur_w_.assign(w_idx.begin(), w_idx.end());
}

double SelectionEvaluator::rate_s(std::span<const std::uint32_t> s_idx)
{
    build_phase(s_idx);
    for (int k = 0; k < cfg_.k; ++k) {
        propagate(k, r_kf_[static_cast<std::size_t>(k) * cb_.f.size() + cur_f_[k]].data());
        for (int n = 0; n < cfg_.n_s; ++n) {
            cxd s{};
            const auto &w = cb_.w[cur_w_[n]];
            for (int b = 0; b < cfg_.n_b; ++b)
                s += w[b] * y_[k][static_cast<std::size_t>(n) * cfg_.n_b + b];
            hbar_(n, k) = s;
        }
    }
    return rate_from_hbar();
}

void SelectionEvaluator::set_fs(std::span<const std::uint32_t> f_idx,
                                std::span<const std::uint32_t> s_idx)
{
    build_phase(s_idx);
    for (int k = 0; k < cfg_.k; ++k)
        propagate(k, r_kf_[static_cast<std::size_t>(k) * cb_.f.size() + f_idx[k]].data());

    const std::size_t nw = cb_.w.size();
    wdots_.resize(nw * cfg_.n_s * cfg_.k);
    for (std::size_t w = 0; w < nw; ++w)
        for (int n = 0; n < cfg_.n_s; ++n)
            for (int k = 0; k < cfg_.k; ++k) {
                cxd s{};
                for (int b = 0; b < cfg_.n_b; ++b)
                    s += cb_.w[w][b] * y_[k][static_cast<std::size_t>(n) * cfg_.n_b + b];
                wdots_[(w * cfg_.n_s + n) * cfg_.k + k] = s;
            }
}

double SelectionEvaluator::rate_w(std::span<const std::uint32_t> w_idx)
{
    for (int n = 0; n < cfg_.n_s; ++n) {
        const cxd *row = &wdots_[(static_cast<std::size_t>(w_idx[n]) * cfg_.n_s + n) * cfg_.k];
        for (int k = 0; k < cfg_.k; ++k)
            hbar_(n, k) = row[k];
    }
    return rate_from_hbar();
}

} // namespace risbeam
