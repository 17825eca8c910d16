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

#include "risbeam/search.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace risbeam {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// saturating u64 power
std::uint64_t ipow_sat(std::uint64_t base, int exp)
{
    unsigned __int128 r = 1;
    for (int i = 0; i < exp; ++i) {
        r *= base;
        if (r > UINT64_MAX)
            return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(r);
}

std::uint64_t mul_sat(std::uint64_t a, std::uint64_t b)
{
    unsigned __int128 r = static_cast<unsigned __int128>(a) * b;
    return r > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(r);
}

std::uint64_t add_sat(std::uint64_t a, std::uint64_t b)
{
    std::uint64_t r = a + b;
    return r < a ? UINT64_MAX : r;
}

// first index most significant, so ascending flat order is ascending
// lexicographic tuple order
void decode_tuple(std::uint64_t flat, std::uint32_t radix, std::uint32_t *out, int len)
{
    for (int i = len - 1; i >= 0; --i) {
        out[i] = static_cast<std::uint32_t>(flat % radix);
        flat /= radix;
    }
}

std::uint64_t encode_tuple(const std::uint32_t *idx, int len, std::uint32_t radix)
{
    std::uint64_t flat = 0;
    for (int i = 0; i < len; ++i)
        flat = flat * radix + idx[i];
    return flat;
}

struct Best {
    double rate = -kInf;
    std::uint64_t flat = UINT64_MAX;

    void consider(double r, std::uint64_t c)
    {
        if (r > rate || (r == rate && c < flat)) {
            rate = r;
            flat = c;
        }
    }
    void merge(const Best &o) { consider(o.rate, o.flat); }
};

} // namespace

std::uint64_t es_candidate_count(const SystemConfig &cfg, const CodebookTriple &cb)
{
    std::uint64_t t = ipow_sat(cb.f.size(), cfg.k);
    t = mul_sat(t, ipow_sat(cb.s.size(), cfg.m_s));
    return mul_sat(t, ipow_sat(cb.w.size(), cfg.n_s));
}

std::uint64_t ias_candidates_per_iteration(const SystemConfig &cfg, const CodebookTriple &cb)
{
    return add_sat(ipow_sat(cb.f.size(), cfg.k),
                   add_sat(ipow_sat(cb.s.size(), cfg.m_s), ipow_sat(cb.w.size(), cfg.n_s)));
}

SearchReport exhaustive_search(const ChannelSet &ch, const CodebookTriple &cb,
                               const SystemConfig &cfg, const SearchBudget &budget)
{
    cfg.validate();
    const std::uint64_t total = es_candidate_count(cfg, cb);
    if (total > budget.max_candidates)
        throw budget_error("exhaustive search would visit " + std::to_string(total) +
                               " candidates, budget is " + std::to_string(budget.max_candidates),
                           total, budget.max_candidates);

    const std::uint32_t nf = static_cast<std::uint32_t>(cb.f.size());
    const std::uint32_t ns = static_cast<std::uint32_t>(cb.s.size());
    const std::uint32_t nw = static_cast<std::uint32_t>(cb.w.size());
    const std::uint64_t total_f = ipow_sat(nf, cfg.k);
    const std::uint64_t total_s = ipow_sat(ns, cfg.m_s);
    const std::uint64_t total_w = ipow_sat(nw, cfg.n_s);
    const std::uint64_t total_fs = total_f * total_s;

    Best best;
#pragma omp parallel num_threads(max_threads())
    {
        SelectionEvaluator ev(ch, cb, cfg);
        std::vector<std::uint32_t> f_idx(cfg.k), s_idx(cfg.m_s), w_idx(cfg.n_s);
        Best local;
#pragma omp for schedule(static)
        for (std::int64_t fs = 0; fs < static_cast<std::int64_t>(total_fs); ++fs) {
            decode_tuple(static_cast<std::uint64_t>(fs) / total_s, nf, f_idx.data(), cfg.k);
            decode_tuple(static_cast<std::uint64_t>(fs) % total_s, ns, s_idx.data(), cfg.m_s);
            ev.set_fs(f_idx, s_idx);
            for (std::uint64_t wf = 0; wf < total_w; ++wf) {
                decode_tuple(wf, nw, w_idx.data(), cfg.n_s);
                local.consider(ev.rate_w(w_idx), static_cast<std::uint64_t>(fs) * total_w + wf);
            }
        }
#pragma omp critical
        best.merge(local);
    }

    SearchReport rep;
    rep.candidates_evaluated = total;
    rep.multiply_count = mul_sat(total, multiply_cost_o3(cfg));
    rep.iterations = 0;
    rep.converged = true;

    BeamSelection sel;
    sel.f_idx.resize(cfg.k);
    sel.s_idx.resize(cfg.m_s);
    sel.w_idx.resize(cfg.n_s);
    std::uint64_t c = best.flat;
    decode_tuple(c % total_w, nw, sel.w_idx.data(), cfg.n_s);
    c /= total_w;
    decode_tuple(c % total_s, ns, sel.s_idx.data(), cfg.m_s);
    decode_tuple(c / total_s, nf, sel.f_idx.data(), cfg.k);
    rep.best_selection = sel;
    rep.best_rate = best.rate == -kInf ? -kInf : sum_rate(ch, sel, cb, cfg, RateMode::det_ratio);
    return rep;
}

BeamSelection random_selection(const CodebookTriple &cb, const SystemConfig &cfg, Rng &rng)
{
    BeamSelection sel;
    sel.f_idx.resize(cfg.k);
    sel.s_idx.resize(cfg.m_s);
    sel.w_idx.resize(cfg.n_s);
    for (auto &i : sel.f_idx)
        i = static_cast<std::uint32_t>(rng.uniform_index(cb.f.size()));
    for (auto &i : sel.s_idx)
        i = static_cast<std::uint32_t>(rng.uniform_index(cb.s.size()));
    for (auto &i : sel.w_idx)
        i = static_cast<std::uint32_t>(rng.uniform_index(cb.w.size()));
    return sel;
}

SearchReport ias_search(const ChannelSet &ch, const CodebookTriple &cb, const SystemConfig &cfg,
                        int t_max, std::optional<BeamSelection> init, std::uint64_t seed,
                        const SearchBudget &budget)
{
    cfg.validate();
    if (t_max < 1)
        throw std::invalid_argument("ias_search: t_max must be >= 1");

    const std::uint32_t nf = static_cast<std::uint32_t>(cb.f.size());
    const std::uint32_t ns = static_cast<std::uint32_t>(cb.s.size());
    const std::uint32_t nw = static_cast<std::uint32_t>(cb.w.size());
    const std::uint64_t total_f = ipow_sat(nf, cfg.k);
    const std::uint64_t total_s = ipow_sat(ns, cfg.m_s);
    const std::uint64_t total_w = ipow_sat(nw, cfg.n_s);
    for (std::uint64_t block : {total_f, total_s, total_w})
        if (block > budget.max_candidates)
            throw budget_error("alternating-search block would visit " + std::to_string(block) +
                                   " candidates, budget is " +
                                   std::to_string(budget.max_candidates),
                               block, budget.max_candidates);

    BeamSelection sel;
    if (init) {
        validate_selection(*init, cb, cfg);
        sel = *init;
    } else {
        Rng rng(seed);
        sel = random_selection(cb, cfg, rng);
    }

    SearchReport rep;
    double cur_rate;
    {
        SelectionEvaluator ev(ch, cb, cfg);
        cur_rate = ev.rate(sel);
    }

    // One block sweep: enumerate `total` joint assignments of the chosen
    // block with the other two blocks frozen, keep the lexicographically
    // smallest maximizer. The current assignment is among the candidates,
    // so the rate never decreases.
    auto sweep = [&](int block_len, std::uint32_t radix, std::uint64_t total,
                     std::vector<std::uint32_t> &block_idx, int which) -> bool {
        Best best;
#pragma omp parallel num_threads(max_threads())
        {
            SelectionEvaluator ev(ch, cb, cfg);
            if (which == 0)
                ev.set_sw(sel.s_idx, sel.w_idx);
            else if (which == 1)
                ev.set_fw(sel.f_idx, sel.w_idx);
            else
                ev.set_fs(sel.f_idx, sel.s_idx);
            std::vector<std::uint32_t> idx(block_len);
            Best local;
#pragma omp for schedule(static)
            for (std::int64_t c = 0; c < static_cast<std::int64_t>(total); ++c) {
                decode_tuple(static_cast<std::uint64_t>(c), radix, idx.data(), block_len);
                double r = which == 0 ? ev.rate_f(idx) : which == 1 ? ev.rate_s(idx) : ev.rate_w(idx);
                local.consider(r, static_cast<std::uint64_t>(c));
            }
#pragma omp critical
            best.merge(local);
        }
        std::uint64_t cur_flat = encode_tuple(block_idx.data(), block_len, radix);
        bool move = best.rate > cur_rate || (best.rate == cur_rate && best.flat < cur_flat);
        if (move) {
            decode_tuple(best.flat, radix, block_idx.data(), block_len);
            cur_rate = best.rate;
        }
        rep.sweep_rates.push_back(cur_rate);
        return move && best.flat != cur_flat;
    };

    const std::uint64_t per_iter = ias_candidates_per_iteration(cfg, cb);
    rep.converged = false;
    for (int t = 0; t < t_max; ++t) {
        bool changed = false;
        changed |= sweep(cfg.k, nf, total_f, sel.f_idx, 0);
        changed |= sweep(cfg.m_s, ns, total_s, sel.s_idx, 1);
        changed |= sweep(cfg.n_s, nw, total_w, sel.w_idx, 2);
        rep.candidates_evaluated = add_sat(rep.candidates_evaluated, per_iter);
        rep.iterations = t + 1;
        if (!changed) {
            rep.converged = true;
            break;
        }
    }

    rep.best_selection = sel;
    rep.best_rate = cur_rate == -kInf ? -kInf : sum_rate(ch, sel, cb, cfg, RateMode::det_ratio);
    rep.multiply_count =
        mul_sat(mul_sat(rep.iterations, per_iter), multiply_cost_o3(cfg));
    return rep;
}

SearchReport random_baseline(const ChannelSet &ch, const CodebookTriple &cb,
                             const SystemConfig &cfg, std::uint64_t seed)
{
    cfg.validate();
    Rng rng(seed);
    SearchReport rep;
    rep.best_selection = random_selection(cb, cfg, rng);
    SelectionEvaluator ev(ch, cb, cfg);
    double r = ev.rate(rep.best_selection);
    rep.best_rate =
        r == -kInf ? -kInf : sum_rate(ch, rep.best_selection, cb, cfg, RateMode::det_ratio);
    rep.candidates_evaluated = 1;
    rep.multiply_count = multiply_cost_o3(cfg);
    rep.iterations = 0;
    rep.converged = true;
    return rep;
}

std::uint64_t multiply_cost_o1(const SystemConfig &cfg)
{
    const std::uint64_t k = cfg.k, n_s = cfg.n_s, n_r = cfg.n_r, m = cfg.m, n_t = cfg.n_t;
    return k * n_s * (n_r * m + m * m + m * n_t + n_t);
}

std::uint64_t multiply_cost_o2(const SystemConfig &cfg)
{
    const std::uint64_t k = cfg.k, n_s = cfg.n_s;
    return k * k * n_s + (k - 1) * (k - 1) * n_s + k * k * k + (k - 1) * (k - 1) * (k - 1) + 1;
}

std::uint64_t multiply_cost_o3(const SystemConfig &cfg)
{
    const std::uint64_t k = cfg.k, n_s = cfg.n_s, n_r = cfg.n_r, m = cfg.m, n_t = cfg.n_t;
    return k * k * n_s * m * (n_r + m) + k * k * n_s * n_t * (m + 1) + 6 * k +
           k * k * k * (n_s + k) + k * (k - 1) * (k - 1) * (n_s + k + 1);
}

namespace {

std::uint64_t mtl_prediction_cost(const SystemConfig &cfg, const NetCostDims &net)
{
    const std::uint64_t k = cfg.k, n_r = cfg.n_r, m = cfg.m, n_t = cfg.n_t;
    const std::uint64_t ker = net.conv_kernel;
    const std::uint64_t d1_u = m - ker + 3, d2_u = n_t - ker + 3;   // user-link feature map
    const std::uint64_t d1_r = n_r - ker + 3, d2_r = m - ker + 3;   // BS-RIS feature map

    std::uint64_t conv_per_pixel = 0; // sum over conv layers of c_in * c_out * ker^2
    for (int b = 0; b < net.n_blocks; ++b) {
        conv_per_pixel += static_cast<std::uint64_t>(net.conv_planes_in) *
                          net.conv_planes_hidden * ker * ker;
        conv_per_pixel += static_cast<std::uint64_t>(net.conv_planes_hidden) *
                          net.conv_planes_in * ker * ker;
    }
    std::uint64_t resnet = k * conv_per_pixel * d1_u * d2_u + conv_per_pixel * d1_r * d2_r;

    const std::uint64_t e = net.head_width;
    std::uint64_t fc = 2 * k * m * n_t * e + 2 * m * n_r * e;
    for (int l = 2; l <= net.n_fc; ++l)
        fc += e * e;
    fc += k * static_cast<std::uint64_t>(cfg.m_s) * cfg.n_s * e;

    return resnet + fc;
}

} // namespace

std::uint64_t multiply_cost(const SystemConfig &cfg, Algorithm alg, const CodebookSizes &sizes,
                            int t_max, const NetCostDims &net)
{
    const std::uint64_t o3 = multiply_cost_o3(cfg);
    switch (alg) {
    case Algorithm::es: {
        std::uint64_t cand = ipow_sat(sizes.f, cfg.k);
        cand = mul_sat(cand, ipow_sat(sizes.s, cfg.m_s));
        cand = mul_sat(cand, ipow_sat(sizes.w, cfg.n_s));
        return mul_sat(cand, o3);
    }
    case Algorithm::ias: {
        std::uint64_t per_iter = add_sat(
            ipow_sat(sizes.f, cfg.k),
            add_sat(ipow_sat(sizes.s, cfg.m_s), ipow_sat(sizes.w, cfg.n_s)));
        return mul_sat(mul_sat(static_cast<std::uint64_t>(t_max), per_iter), o3);
    }
    case Algorithm::mtl:
        return add_sat(o3, mtl_prediction_cost(cfg, net));
    }
    throw std::invalid_argument("multiply_cost: unknown algorithm");
}

} // namespace risbeam
