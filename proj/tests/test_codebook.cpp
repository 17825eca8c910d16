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
#include "risbeam/codebook.hpp"

using namespace risbeam;

namespace {

SystemConfig config_with(int n_t, int m_b, int n_b)
{
    SystemConfig cfg;
    cfg.n_t = n_t;
    cfg.m_b = m_b;
    cfg.m = m_b * cfg.m_s;
    cfg.n_b = n_b;
    cfg.n_r = n_b * cfg.n_s;
    return cfg;
}

double norm2(const std::vector<cxd> &v)
{
    double s = 0;
    for (auto x : v)
        s += std::norm(x);
    return std::sqrt(s);
}

} // namespace

TEST_CASE("two-point user codebook matches the DFT-style grid")
{
    auto cb = build_codebooks(config_with(2, 8, 8), 2, 8, 8);
    REQUIRE(cb.f.size() == 2);
    // grid order: sin = -1 first (phase -pi on element 1), then sin = 0
    const double r = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(cb.f[0][0] - cxd(r, 0)) < 1e-14);
    CHECK(std::abs(cb.f[0][1] - r * std::exp(cxd(0, -pi))) < 1e-12);
    CHECK(std::abs(cb.f[1][0] - cxd(r, 0)) < 1e-14);
    CHECK(std::abs(cb.f[1][1] - cxd(r, 0)) < 1e-14);
}

TEST_CASE("scalar RIS codebook keeps distinct grid phases at unit modulus")
{
    auto cb = build_codebooks(config_with(4, 1, 8), 8, 4, 8);
    REQUIRE(cb.s.size() == 4);
    // sin grid {-1, -1/2, 0, 1/2} -> phases pi*sin with 1-based element index
    const double want[4] = {-pi, -pi / 2.0, 0.0, pi / 2.0};
    for (int i = 0; i < 4; ++i) {
        REQUIRE(cb.s[i].size() == 1);
        CHECK(std::abs(std::abs(cb.s[i][0]) - 1.0) < 1e-14);
        CHECK(std::abs(cb.s[i][0] - std::exp(cxd(0, want[i]))) < 1e-12);
    }
}

TEST_CASE("beam codeword norms and phase-codeword moduli")
{
    auto cb = build_codebooks(SystemConfig{}, 8, 8, 8);
    for (const auto &f : cb.f)
        CHECK(std::abs(norm2(f) - 1.0) < 1e-12);
    for (const auto &w : cb.w)
        CHECK(std::abs(norm2(w) - 1.0) < 1e-12);
    for (const auto &s : cb.s)
        for (auto v : s)
            CHECK(std::abs(std::abs(v) - 1.0) < 1e-13);
}

TEST_CASE("gram matrix of the BS codebook matches a direct-evaluation oracle")
{
    SystemConfig cfg = config_with(4, 8, 8);
    auto cb = build_codebooks(cfg, 8, 8, 8);
    REQUIRE(cb.w.size() == 8);
    // independent double-loop inner products
    for (std::size_t i = 0; i < cb.w.size(); ++i)
        for (std::size_t j = 0; j < cb.w.size(); ++j) {
            cxd dot{};
            for (int b = 0; b < cfg.n_b; ++b)
                dot += std::conj(cb.w[i][b]) * cb.w[j][b];
            // |W| = N_B with half-wavelength spacing: orthonormal set
            cxd want = i == j ? cxd(1, 0) : cxd(0, 0);
            CHECK(std::abs(dot - want) < 1e-9);
        }
}

TEST_CASE("codebooks are deterministic and hash-stable")
{
    auto a = build_codebooks(SystemConfig{}, 8, 8, 8);
    auto b = build_codebooks(SystemConfig{}, 8, 8, 8);
    CHECK(codebook_hash(a) == codebook_hash(b));
    for (std::size_t i = 0; i < a.f.size(); ++i)
        CHECK(a.f[i] == b.f[i]);
    auto c = build_codebooks(SystemConfig{}, 8, 8, 4);
    CHECK(codebook_hash(a) != codebook_hash(c));
}

TEST_CASE("oversized codebooks are refused")
{
    CHECK_THROWS_AS(build_codebooks(SystemConfig{}, 1 << 17, 8, 8), config_error);
}

TEST_CASE("2-D subarray codebooks grid azimuth and elevation jointly")
{
    SystemConfig cfg = config_with(16, 8, 8); // N_t = 16 -> 4x4 UPA
    auto cb = build_codebooks(cfg, 9, 8, 8);  // 9 -> 3x3 grid
    REQUIRE(cb.f.size() == 9);
    for (const auto &f : cb.f) {
        REQUIRE(f.size() == 16);
        CHECK(std::abs(norm2(f) - 1.0) < 1e-12);
    }
    // all codewords distinct
    for (std::size_t i = 0; i < cb.f.size(); ++i)
        for (std::size_t j = i + 1; j < cb.f.size(); ++j) {
            double diff = 0;
            for (std::size_t e = 0; e < 16; ++e)
                diff += std::abs(cb.f[i][e] - cb.f[j][e]);
            CHECK(diff > 1e-9);
        }
}
