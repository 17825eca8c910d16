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

#include "doctest.h"
#include "risbeam/metric.hpp"
#include "risbeam/reference.hpp"

using namespace risbeam;

namespace {

CMat random_hbar(int n_s, int k, Rng &rng)
{
    CMat h(n_s, k);
    for (std::size_t i = 0; i < h.size(); ++i)
        h.data()[i] = cxd(rng.normal(), rng.normal());
    return h;
}

struct Instance {
    SystemConfig cfg;
    GainModel gm;
    CodebookTriple cb;
    ChannelSet ch;
};

Instance make_instance(std::uint64_t seed, int size_f = 4, int size_s = 4, int size_w = 4)
{
    Instance in;
    in.cb = build_codebooks(in.cfg, size_f, size_s, size_w);
    in.ch = sample_channel_set(in.cfg, in.gm, 3, 3, seed);
    return in;
}

} // namespace

TEST_CASE("phase matrix concatenates the selected vectors at the reflect amplitude")
{
    SystemConfig cfg;
    cfg.reflect_amplitude = 0.8;
    auto cb = build_codebooks(cfg, 4, 4, 4);
    BeamSelection sel{{0, 1}, {2, 3}, {0, 1}};
    auto diag = assemble_phase_matrix(sel, cb, cfg);
    REQUIRE(static_cast<int>(diag.size()) == cfg.m);
    for (int ms = 0; ms < cfg.m_s; ++ms)
        for (int b = 0; b < cfg.m_b; ++b) {
            cxd want = 0.8 * cb.s[sel.s_idx[ms]][b];
            CHECK(std::abs(diag[ms * cfg.m_b + b] - want) < 1e-15);
            CHECK(std::abs(std::abs(diag[ms * cfg.m_b + b]) - 0.8) < 1e-13);
        }
}

TEST_CASE("phase matrix rejects out-of-bounds indices")
{
    SystemConfig cfg;
    auto cb = build_codebooks(cfg, 4, 4, 4);
    BeamSelection sel{{0, 0}, {9, 0}, {0, 0}};
    CHECK_THROWS_AS(assemble_phase_matrix(sel, cb, cfg), std::invalid_argument);
}

TEST_CASE("block combiner places each beam in its own column block")
{
    SystemConfig cfg;
    cfg.n_b = 2;
    cfg.n_s = 2;
    cfg.n_r = 4;
    auto cb = build_codebooks(cfg, 4, 4, 2);
    BeamSelection sel{{0, 0}, {0, 0}, {0, 1}};
    auto wr = assemble_block_combiner(sel, cb, cfg);
    CMat dense = ref::dense_block_combiner(sel, cb, cfg);
    for (int n = 0; n < cfg.n_s; ++n)
        for (int c = 0; c < cfg.n_r; ++c) {
            cxd want = (c >= n * cfg.n_b && c < (n + 1) * cfg.n_b)
                           ? wr.rows[n][c - n * cfg.n_b]
                           : cxd{};
            CHECK(std::abs(dense(n, c) - want) < 1e-15);
        }
    // off-block entries exactly zero in the dense expansion
    CHECK(dense(0, 2) == cxd{});
    CHECK(dense(1, 0) == cxd{});
}

TEST_CASE("equivalent channel matches the dense-chain oracle")
{
    for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
        Instance in = make_instance(seed);
        Rng rng(seed * 17 + 1);
        BeamSelection sel{{static_cast<std::uint32_t>(rng.uniform_index(4)),
                           static_cast<std::uint32_t>(rng.uniform_index(4))},
                          {static_cast<std::uint32_t>(rng.uniform_index(4)),
                           static_cast<std::uint32_t>(rng.uniform_index(4))},
                          {static_cast<std::uint32_t>(rng.uniform_index(4)),
                           static_cast<std::uint32_t>(rng.uniform_index(4))}};
        CMat fast = equivalent_channel(in.ch, sel, in.cb, in.cfg);
        CMat dense = ref::equivalent_channel_dense(in.ch, sel, in.cb, in.cfg);
        double rel = frobenius_norm(sub(fast, dense)) / frobenius_norm(dense);
        CHECK(rel < 1e-12);
    }
}

TEST_CASE("scaling the phase diagonal scales the equivalent channel linearly")
{
    Instance in = make_instance(42);
    BeamSelection sel{{0, 1}, {2, 3}, {1, 0}};
    CMat h1 = equivalent_channel(in.ch, sel, in.cb, in.cfg);
    SystemConfig half = in.cfg;
    half.reflect_amplitude = in.cfg.reflect_amplitude / 2.0;
    CMat h2 = equivalent_channel(in.ch, sel, in.cb, half);
    for (std::size_t i = 0; i < h1.size(); ++i)
        CHECK(std::abs(h1.data()[i] - 2.0 * h2.data()[i]) < 1e-13 * std::abs(h1.data()[i]) + 1e-18);
}

TEST_CASE("zf combiner inverts the equivalent channel")
{
    CMat id = CMat::identity(3);
    CMat wb = zf_combiner(id);
    CHECK(frobenius_norm(sub(wb, id)) < 1e-13);

    CMat two = scale(CMat::identity(3), cxd(2.0, 0.0));
    CMat wb2 = zf_combiner(two);
    CHECK(frobenius_norm(sub(wb2, scale(CMat::identity(3), cxd(0.5, 0.0)))) < 1e-13);

    Rng rng(9);
    CMat h = random_hbar(4, 3, rng);
    CMat wb3 = zf_combiner(h);
    CMat should_be_i = mul(wb3, h);
    CHECK(frobenius_norm(sub(should_be_i, CMat::identity(3))) < 1e-10);
}

TEST_CASE("zf combiner reports rank deficiency with a condition estimate")
{
    CMat h(3, 2);
    h(0, 0) = 1;
    h(1, 0) = 1;
    h(0, 1) = 1;
    h(1, 1) = 1; // parallel columns
    try {
        zf_combiner(h);
        FAIL("expected rank_deficiency_error");
    } catch (const rank_deficiency_error &e) {
        CHECK(e.cond >= 1e12);
    }
}

TEST_CASE("diag_inverse_entry on identity and diagonal Grams")
{
    CMat id = CMat::identity(2);
    CHECK(diag_inverse_entry(id, 0) == doctest::Approx(1.0).epsilon(1e-14));

    CMat d(2, 2);
    d(0, 0) = 2.0; // columns scale Gram to diag(4, 9)
    d(1, 1) = 3.0;
    CHECK(diag_inverse_entry(d, 1) == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("determinant ratio equals explicit Gram inversion on random instances")
{
    Rng rng(123);
    for (int t = 0; t < 200; ++t) {
        int k = 2 + static_cast<int>(rng.uniform_index(5));
        int n_s = k + static_cast<int>(rng.uniform_index(3));
        CMat h = random_hbar(n_s, k, rng);
        CMat inv = ref::gram_inverse_gauss_jordan(h);
        for (int i = 0; i < k; ++i) {
            double want = inv(i, i).real();
            double got = diag_inverse_entry(h, i);
            CHECK(std::abs(got - want) <= 1e-9 * std::abs(want));
        }
    }
}

TEST_CASE("sum rate on hand-checked scalar cases")
{
    SystemConfig cfg;
    cfg.k = 1;
    cfg.n_s = 1;
    cfg.n_b = 1;
    cfg.n_r = 1;
    cfg.n_t = 1;
    cfg.m_s = 1;
    cfg.m_b = 1;
    cfg.m = 1;
    // choose P and N0 so P / (N_t N_B N0) = 1
    cfg.p_dbm = 30.0; // 1 W
    cfg.n0 = 1.0;
    CMat h(1, 1);
    h(0, 0) = 1.0;
    CHECK(sum_rate_hbar(h, cfg, RateMode::direct) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(sum_rate_hbar(h, cfg, RateMode::det_ratio) == doctest::Approx(1.0).epsilon(1e-14));

    // two orthogonal users at snr 3 -> R = 2 log2(4) = 4
    cfg.k = 2;
    cfg.n_s = 2;
    cfg.n_r = 2;
    cfg.p_dbm = 30.0 + 10.0 * std::log10(3.0);
    CMat h2 = CMat::identity(2);
    CHECK(sum_rate_hbar(h2, cfg, RateMode::direct) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("direct and det-ratio modes agree on random instances")
{
    Rng rng(77);
    SystemConfig cfg;
    for (int t = 0; t < 100; ++t) {
        CMat h = random_hbar(cfg.n_s, cfg.k, rng);
        double a = sum_rate_hbar(h, cfg, RateMode::direct);
        double b = sum_rate_hbar(h, cfg, RateMode::det_ratio);
        CHECK(std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("sum rate is monotone in transmit power")
{
    Rng rng(31);
    SystemConfig lo, hi;
    lo.p_dbm = 0.0;
    hi.p_dbm = 10.0;
    for (int t = 0; t < 25; ++t) {
        CMat h = random_hbar(2, 2, rng);
        CHECK(sum_rate_hbar(h, lo) <= sum_rate_hbar(h, hi));
    }
}

TEST_CASE("user permutation leaves the sum rate unchanged")
{
    Rng rng(32);
    SystemConfig cfg;
    CMat h = random_hbar(cfg.n_s, cfg.k, rng);
    CMat p(cfg.n_s, cfg.k);
    for (int n = 0; n < cfg.n_s; ++n) {
        p(n, 0) = h(n, 1);
        p(n, 1) = h(n, 0);
    }
    CHECK(std::abs(sum_rate_hbar(h, cfg) - sum_rate_hbar(p, cfg)) < 1e-12);
}

TEST_CASE("sum rate is invariant to a unit-modulus scalar on the channel")
{
    Rng rng(33);
    SystemConfig cfg;
    CMat h = random_hbar(cfg.n_s, cfg.k, rng);
    CMat r = scale(h, std::exp(cxd(0.0, 1.234)));
    CHECK(std::abs(sum_rate_hbar(h, cfg) - sum_rate_hbar(r, cfg)) <
          1e-11 * std::abs(sum_rate_hbar(h, cfg)));
}

TEST_CASE("rank-deficient equivalent channel raises, evaluator returns -inf")
{
    SystemConfig cfg;
    CMat h(2, 2);
    h(0, 0) = 1;
    h(0, 1) = 1;
    h(1, 0) = 1;
    h(1, 1) = 1;
    CHECK_THROWS_AS(sum_rate_hbar(h, cfg), rank_deficiency_error);
}

TEST_CASE("the evaluator fast paths agree with the one-shot rate")
{
    Instance in = make_instance(5);
    SelectionEvaluator ev(in.ch, in.cb, in.cfg);
    Rng rng(55);
    for (int t = 0; t < 40; ++t) {
        BeamSelection sel{{static_cast<std::uint32_t>(rng.uniform_index(4)),
                           static_cast<std::uint32_t>(rng.uniform_index(4))},
                          {static_cast<std::uint32_t>(rng.uniform_index(4)),
                           static_cast<std::uint32_t>(rng.uniform_index(4))},
                          {static_cast<std::uint32_t>(rng.uniform_index(4)),
                           static_cast<std::uint32_t>(rng.uniform_index(4))}};
        double base = ev.rate(sel);
        double want = sum_rate(in.ch, sel, in.cb, in.cfg);
        CHECK(base == doctest::Approx(want).epsilon(1e-12));

        ev.set_sw(sel.s_idx, sel.w_idx);
        CHECK(ev.rate_f(sel.f_idx) == base);
        ev.set_fw(sel.f_idx, sel.w_idx);
        CHECK(ev.rate_s(sel.s_idx) == base);
        ev.set_fs(sel.f_idx, sel.s_idx);
        CHECK(ev.rate_w(sel.w_idx) == base);
    }
}
