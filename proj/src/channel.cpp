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

#include "risbeam/channel.hpp"

#include <cmath>

namespace risbeam {

std::pair<int, int> upa_factor(int n)
{
    if (n < 1)
        throw config_error("array element count must be >= 1");
    int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    if (r * r == n)
        return {r, r};
    return {n, 1};
}

std::vector<cxd> upa_response(double azimuth, double elevation, int n_x, int n_y,
                              double spacing_over_lambda)
{
    if (n_x < 1 || n_y < 1)
        throw std::invalid_argument("upa_response: N_x and N_y must be >= 1");
    if (!std::isfinite(azimuth) || !std::isfinite(elevation))
        throw std::invalid_argument("upa_response: angles must be finite");

    const double cx = 2.0 * pi * spacing_over_lambda * std::sin(azimuth);
    const double cy = 2.0 * pi * spacing_over_lambda * std::sin(elevation);
    const double nrm = 1.0 / std::sqrt(static_cast<double>(n_x) * n_y);

    std::vector<cxd> a(static_cast<std::size_t>(n_x) * n_y);
    for (int ix = 0; ix < n_x; ++ix)
        for (int iy = 0; iy < n_y; ++iy) {
            double phase = cx * ix + cy * iy;
            a[static_cast<std::size_t>(ix) * n_y + iy] =
                nrm * cxd(std::cos(phase), std::sin(phase));
        }
    return a;
}

CMat channel_from_paths(std::span<const PathSpec> paths, int rx_elems, int tx_elems,
                        double spacing_over_lambda)
{
    if (paths.empty())
        throw std::invalid_argument("channel_from_paths: need at least one path");
    auto [rx_x, rx_y] = upa_factor(rx_elems);
    auto [tx_x, tx_y] = upa_factor(tx_elems);

    const double scale =
        std::sqrt(static_cast<double>(rx_elems) * tx_elems / static_cast<double>(paths.size()));

    CMat h(rx_elems, tx_elems);
    for (const PathSpec &p : paths) {
        auto a_rx = upa_response(p.azimuth_arr, p.elevation_arr, rx_x, rx_y, spacing_over_lambda);
        auto a_tx = upa_response(p.azimuth_dep, p.elevation_dep, tx_x, tx_y, spacing_over_lambda);
        cxd g = scale * p.gain;
        for (int i = 0; i < rx_elems; ++i) {
            cxd gi = g * a_rx[i];
            for (int j = 0; j < tx_elems; ++j)
                h(i, j) += gi * std::conj(a_tx[j]);
        }
    }
    return h;
}

namespace {

// Draw order is part of the file-format contract: per path, gain phase first,
// then departure azimuth/elevation, then arrival azimuth/elevation.
std::vector<PathSpec> draw_paths(Rng &rng, int n_paths, double los_mag, double nlos_mag,
                                 bool los_present, bool normalize)
{
    std::vector<PathSpec> paths(n_paths);
    for (int l = 0; l < n_paths; ++l) {
        double mag = (l == 0 && los_present) ? los_mag : nlos_mag;
        double phase = rng.uniform(-pi, pi);
        PathSpec &p = paths[l];
        p.gain = mag * cxd(std::cos(phase), std::sin(phase));
        p.azimuth_dep = rng.uniform(-pi, pi);
        p.elevation_dep = rng.uniform(-pi, pi);
        p.azimuth_arr = rng.uniform(-pi, pi);
        p.elevation_arr = rng.uniform(-pi, pi);
    }
    if (normalize) {
        double s = 0.0;
        for (const PathSpec &p : paths)
            s += std::norm(p.gain);
        double target = static_cast<double>(n_paths);
        if (s > 0.0) {
            double c = std::sqrt(target / s);
            for (PathSpec &p : paths)
                p.gain *= c;
        }
    }
    return paths;
}

} // namespace

ChannelSet sample_channel_set(const SystemConfig &cfg, const GainModel &gm, int l_b, int l_u,
                              std::uint64_t seed)
{
    cfg.validate();
    gm.validate();
    if (l_b < 0 || l_u < 0)
        throw std::invalid_argument("sample_channel_set: path counts must be >= 0");

    Rng rng(seed);
    ChannelSet ch;

    const double f = cfg.carrier_freq_hz;
    {
        double los = gm.los_magnitude(f, gm.d0);
        ch.paths_r = draw_paths(rng, l_b + 1, los, los * gm.reflection, gm.los_present, gm.normalize);
        ch.h_r = channel_from_paths(ch.paths_r, cfg.n_r, cfg.m, cfg.spacing_over_lambda);
    }

    ch.h_users.reserve(cfg.k);
    ch.paths_users.reserve(cfg.k);
    for (int k = 0; k < cfg.k; ++k) {
        double d_user = rng.uniform(gm.user_region_diameter / 4.0, gm.user_region_diameter);
        double los = gm.los_magnitude(f, d_user);
        auto paths =
            draw_paths(rng, l_u + 1, los, los * gm.reflection, gm.los_present, gm.normalize);
        ch.h_users.push_back(channel_from_paths(paths, cfg.m, cfg.n_t, cfg.spacing_over_lambda));
        ch.paths_users.push_back(std::move(paths));
    }
    return ch;
}

} // namespace risbeam
