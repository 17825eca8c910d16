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

#include <cstring>

#include "doctest.h"
#include "risbeam/channel.hpp"
#include "risbeam/reference.hpp"

using namespace risbeam;

namespace {

// independent scalar-loop evaluation of the two 1-D responses and their
// Kronecker product
std::vector<cxd> upa_oracle(double az, double el, int nx, int ny, double sp)
{
    std::vector<cxd> ax(nx), ay(ny);
    for (int i = 0; i < nx; ++i) {
        double ph = 2.0 * pi * sp * i * std::sin(az);
        ax[i] = cxd(std::cos(ph), std::sin(ph)) / std::sqrt(static_cast<double>(nx));
    }
    for (int i = 0; i < ny; ++i) {
        double ph = 2.0 * pi * sp * i * std::sin(el);
        ay[i] = cxd(std::cos(ph), std::sin(ph)) / std::sqrt(static_cast<double>(ny));
    }
    std::vector<cxd> out;
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            out.push_back(ax[i] * ay[j]);
    return out;
}

double norm2(const std::vector<cxd> &v)
{
    double s = 0;
    for (auto x : v)
        s += std::norm(x);
    return std::sqrt(s);
}

} // namespace

TEST_CASE("upa_response zero angles give the constant vector")
{
    auto a = upa_response(0.0, 0.0, 2, 2, 0.5);
    REQUIRE(a.size() == 4);
    for (auto v : a)
        CHECK(std::abs(v - cxd(0.5, 0.0)) < 1e-15);
}

TEST_CASE("upa_response broadside azimuth pi/2 flips the second element")
{
    auto a = upa_response(pi / 2.0, 0.0, 2, 1, 0.5);
    REQUIRE(a.size() == 2);
    CHECK(std::abs(a[0] - cxd(1.0 / std::sqrt(2.0), 0.0)) < 1e-15);
    // phase pi: e^{j pi} = -1
    CHECK(std::abs(a[1] - cxd(-1.0 / std::sqrt(2.0), 0.0)) < 1e-12);
}

TEST_CASE("upa_response matches the scalar-loop Kronecker oracle")
{
    auto got = upa_response(0.3, -0.7, 4, 2, 0.5);
    auto want = upa_oracle(0.3, -0.7, 4, 2, 0.5);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i)
        CHECK(std::abs(got[i] - want[i]) < 1e-14);
}

TEST_CASE("upa_response has unit norm for arbitrary inputs")
{
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
        int nx = 1 + static_cast<int>(rng.uniform_index(6));
        int ny = 1 + static_cast<int>(rng.uniform_index(6));
        auto a = upa_response(rng.uniform(-pi, pi), rng.uniform(-pi, pi), nx, ny, 0.5);
        CHECK(std::abs(norm2(a) - 1.0) < 1e-12);
    }
}

TEST_CASE("upa_response rejects bad input")
{
    CHECK_THROWS_AS(upa_response(std::nan(""), 0.0, 2, 2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(upa_response(0.0, 0.0, 0, 2, 0.5), std::invalid_argument);
}

TEST_CASE("single zero-angle path gives the all-ones outer product")
{
    // alpha_0 = 1, all angles 0, 1x2 arrays on both sides:
    // scale sqrt(2*2/1) = 2, responses (1/sqrt2)[1,1] -> all entries 1
    PathSpec p;
    p.gain = cxd(1.0, 0.0);
    CMat h = channel_from_paths(std::vector<PathSpec>{p}, 2, 2, 0.5);
    for (std::size_t i = 0; i < h.size(); ++i)
        CHECK(std::abs(h.data()[i] - cxd(1.0, 0.0)) < 1e-14);
}

TEST_CASE("sample_channel_set is deterministic in the seed")
{
    SystemConfig cfg;
    GainModel gm;
    ChannelSet a = sample_channel_set(cfg, gm, 3, 3, 1234);
    ChannelSet b = sample_channel_set(cfg, gm, 3, 3, 1234);
    REQUIRE(a.h_r.size() == b.h_r.size());
    CHECK(std::memcmp(a.h_r.data(), b.h_r.data(), a.h_r.size() * sizeof(cxd)) == 0);
    for (int k = 0; k < cfg.k; ++k)
        CHECK(std::memcmp(a.h_users[k].data(), b.h_users[k].data(),
                          a.h_users[k].size() * sizeof(cxd)) == 0);
    ChannelSet c = sample_channel_set(cfg, gm, 3, 3, 1235);
    CHECK(std::memcmp(a.h_r.data(), c.h_r.data(), a.h_r.size() * sizeof(cxd)) != 0);
}

TEST_CASE("channel reconstructs from its path list via an independent loop")
{
    SystemConfig cfg;
    GainModel gm;
    ChannelSet ch = sample_channel_set(cfg, gm, 3, 3, 7);

    // per-path accumulation with separately computed responses
    auto [rx_x, rx_y] = upa_factor(cfg.n_r);
    auto [tx_x, tx_y] = upa_factor(cfg.m);
    CMat acc(cfg.n_r, cfg.m);
    double scale = std::sqrt(static_cast<double>(cfg.n_r) * cfg.m /
                             static_cast<double>(ch.paths_r.size()));
    for (const PathSpec &p : ch.paths_r) {
        auto ar = upa_oracle(p.azimuth_arr, p.elevation_arr, rx_x, rx_y, 0.5);
        auto at = upa_oracle(p.azimuth_dep, p.elevation_dep, tx_x, tx_y, 0.5);
        for (int i = 0; i < cfg.n_r; ++i)
            for (int j = 0; j < cfg.m; ++j)
                acc(i, j) += scale * p.gain * ar[i] * std::conj(at[j]);
    }
    double rel = frobenius_norm(sub(acc, ch.h_r)) / frobenius_norm(ch.h_r);
    CHECK(rel < 1e-12);

    double fro = frobenius_norm(ch.h_r);
    CHECK(fro == doctest::Approx(frobenius_norm(acc)).epsilon(1e-12));
}

TEST_CASE("channel rank is bounded by the path count")
{
    SystemConfig cfg;
    GainModel gm;
    for (std::uint64_t seed : {11u, 22u, 33u}) {
        ChannelSet ch = sample_channel_set(cfg, gm, 2, 1, seed);
        CHECK(ref::numerical_rank(ch.h_r, 1e-9) <= 3);
        for (const CMat &h : ch.h_users)
            CHECK(ref::numerical_rank(h, 1e-9) <= 2);
    }
}

TEST_CASE("gain normalization fixes the per-link gain power")
{
    SystemConfig cfg;
    GainModel gm;
    gm.normalize = true;
    ChannelSet ch = sample_channel_set(cfg, gm, 3, 3, 9);
    double s = 0.0;
    for (const PathSpec &p : ch.paths_r)
        s += std::norm(p.gain);
    CHECK(s == doctest::Approx(static_cast<double>(ch.paths_r.size())).epsilon(1e-12));
}

TEST_CASE("upa_factor prefers square aspect")
{
    CHECK(upa_factor(16) == std::pair<int, int>{4, 4});
    CHECK(upa_factor(128) == std::pair<int, int>{128, 1});
    CHECK(upa_factor(1) == std::pair<int, int>{1, 1});
}

TEST_CASE("config invariants are enforced")
{
    SystemConfig cfg;
    cfg.n_r = 15; // violates N_r = N_B * N_s
    CHECK_THROWS_AS(cfg.validate(), config_error);
    cfg = SystemConfig{};
    cfg.k = 3; // K <= N_s
    CHECK_THROWS_AS(cfg.validate(), config_error);
    GainModel gm;
    gm.reflection = 0.0;
    CHECK_THROWS_AS(gm.validate(), config_error);
}
