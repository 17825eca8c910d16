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
// Geometric sparse channels for the BS-RIS and RIS-user links. Every link is
// a sum of a few plane-wave paths, each an outer product of uniform planar
// array responses at the receive and transmit side.

#ifndef RISBEAM_CHANNEL_HPP
#define RISBEAM_CHANNEL_HPP

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "risbeam/config.hpp"
#include "risbeam/linalg.hpp"

namespace risbeam {

// One propagation path: complex gain plus departure/arrival angle pairs
// (azimuth, elevation), all in (-pi, pi).
struct PathSpec {
    cxd gain;
    double azimuth_dep = 0.0;
    double elevation_dep = 0.0;
    double azimuth_arr = 0.0;
    double elevation_arr = 0.0;
};

// One channel realization: the BS-RIS link and all K RIS-user links,
// together with the path lists they were built from. Immutable after
// creation; reconstructible from the paths to machine precision.
struct ChannelSet {
    CMat h_r;                                    // N_r x M
    std::vector<CMat> h_users;                   // K matrices, M x N_t
    std::vector<PathSpec> paths_r;               // L_B + 1 entries
    std::vector<std::vector<PathSpec>> paths_users; // K x (L_U + 1)
};

// Splits an element count into the (N_x, N_y) UPA aspect: square when the
// count is a perfect square, otherwise a 1-D array.
std::pair<int, int> upa_factor(int n);

// Normalized UPA response a_x(azimuth) kron a_y(elevation); unit 2-norm.
// Element (n_x, n_y) sits at flat index n_x * N_y + n_y and carries phase
// 2 pi (d / lambda) (n_x sin(azimuth) + n_y sin(elevation)), n_x and n_y
// counted from zero.
std::vector<cxd> upa_response(double azimuth, double elevation, int n_x, int n_y,
                              double spacing_over_lambda);

// Sum-of-paths link matrix, rows = receive array, cols = transmit array.
// Applies the sqrt(rows * cols / n_paths) scale; arrival angles steer the
// receive response, departure angles the transmit response.
CMat channel_from_paths(std::span<const PathSpec> paths, int rx_elems, int tx_elems,
                        double spacing_over_lambda);

// Draws one ChannelSet: l_b + 1 paths on the BS-RIS link and l_u + 1 paths
// per user, with i.i.d. uniform angles and gains from the GainModel. Equal
// (cfg, gm, l_b, l_u, seed) gives a bit-identical result.
ChannelSet sample_channel_set(const SystemConfig &cfg, const GainModel &gm, int l_b, int l_u,
                              std::uint64_t seed);

} // namespace risbeam

#endif
