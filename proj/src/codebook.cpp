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

#include "risbeam/codebook.hpp"

#include <cmath>

#include "risbeam/channel.hpp"

namespace risbeam {

namespace {

constexpr int kMaxCodebookSize = 1 << 16;

// Uniform grid over sin(angle) in [-1, 1); a single-point grid degenerates
// to broadside (sin = 0).
std::vector<double> sin_grid(int n)
{
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = 0.0;
        return g;
    }
    for (int i = 0; i < n; ++i)
        g[i] = -1.0 + 2.0 * i / n;
    return g;
}

// Beam codebook for an n_elem array: normalized UPA responses on the grid.
// A 1-D array grids azimuth only; a 2-D array grids azimuth and elevation
// jointly, factoring the codebook size the same way as the array itself.
std::vector<std::vector<cxd>> beam_codebook(int n_elem, int size, double spacing)
{
    auto [n_x, n_y] = upa_factor(n_elem);
    int g_x = size, g_y = 1;
    if (n_y > 1) {
        auto [a, b] = upa_factor(size);
        g_x = a;
        g_y = b;
    }
    auto sx = sin_grid(g_x);
    auto sy = sin_grid(g_y);

    std::vector<std::vector<cxd>> cb;
    cb.reserve(size);
    for (int ix = 0; ix < g_x; ++ix)
        for (int iy = 0; iy < g_y; ++iy)
            cb.push_back(upa_response(std::asin(sx[ix]), std::asin(sy[iy]), n_x, n_y, spacing));
    return cb;
}

// Phase-shift codebook for a RIS subarray: unit-modulus entries
// e^{j 2 pi (d/lambda) (n_x sin az + n_y sin el)} with n_x, n_y counted
// from one, so a one-element subarray still carries its grid phase.
std::vector<std::vector<cxd>> phase_codebook(int n_elem, int size, double spacing)
{
    auto [n_x, n_y] = upa_factor(n_elem);
    int g_x = size, g_y = 1;
    if (n_y > 1) {
        auto [a, b] = upa_factor(size);
        g_x = a;
        g_y = b;
    }
    auto sx = sin_grid(g_x);
    auto sy = sin_grid(g_y);

    std::vector<std::vector<cxd>> cb;
    cb.reserve(size);
    for (int ix = 0; ix < g_x; ++ix)
        for (int iy = 0; iy < g_y; ++iy) {
            double cx = 2.0 * pi * spacing * sx[ix];
            double cy = 2.0 * pi * spacing * sy[iy];
            std::vector<cxd> lam(static_cast<std::size_t>(n_elem));
            for (int ex = 0; ex < n_x; ++ex)
                for (int ey = 0; ey < n_y; ++ey) {
                    double phase = cx * (ex + 1) + cy * (ey + 1);
                    lam[static_cast<std::size_t>(ex) * n_y + ey] =
                        cxd(std::cos(phase), std::sin(phase));
                }
            cb.push_back(std::move(lam));
        }
    return cb;
}

} // namespace

CodebookTriple build_codebooks(const SystemConfig &cfg, int size_f, int size_s, int size_w)
{
    cfg.validate();
    if (size_f < 1 || size_s < 1 || size_w < 1)
        throw config_error("codebook sizes must be >= 1");
    if (size_f > kMaxCodebookSize || size_s > kMaxCodebookSize || size_w > kMaxCodebookSize)
        throw config_error("codebook size exceeds 2^16");

    CodebookTriple cb;
    cb.f = beam_codebook(cfg.n_t, size_f, cfg.spacing_over_lambda);
    cb.s = phase_codebook(cfg.m_b, size_s, cfg.spacing_over_lambda);
    cb.w = beam_codebook(cfg.n_b, size_w, cfg.spacing_over_lambda);
    return cb;
}

std::uint64_t codebook_hash(const CodebookTriple &cb)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto fold = [&h](const std::vector<std::vector<cxd>> &book) {
        for (const auto &cw : book)
            h = fnv1a(cw.data(), cw.size() * sizeof(cxd), h);
    };
    fold(cb.f);
    fold(cb.s);
    fold(cb.w);
    return h;
}

} // namespace risbeam
