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

#ifndef RISBEAM_CONFIG_HPP
#define RISBEAM_CONFIG_HPP

#include <cmath>

#include "risbeam/common.hpp"

namespace risbeam {

// Dimensions and radio parameters of the uplink system. The BS drives n_s
// RF chains with n_b antennas each (n_r = n_b * n_s); the RIS is split into
// m_s subarrays of m_b elements (m = m_b * m_s); each of the k users has a
// single RF chain on n_t antennas.
struct SystemConfig {
    int n_r = 16;  // BS antennas
    int n_s = 2;   // BS RF chains / subarrays
    int n_b = 8;   // antennas per BS subarray
    int m = 16;    // RIS elements
    int m_s = 2;   // RIS subarrays
    int m_b = 8;   // elements per RIS subarray
    int n_t = 4;   // antennas per user
    int k = 2;     // users

    double p_dbm = 10.0;             // per-user transmit power
    double n0 = 1e-5;                // noise power, linear
    double carrier_freq_hz = 1.6e12; // 1.6 THz default
    double spacing_over_lambda = 0.5;
    double reflect_amplitude = 0.8;

    double power_watts() const { return std::pow(10.0, (p_dbm - 30.0) / 10.0); }

    void validate() const
    {
        if (n_r < 1 || n_s < 1 || n_b < 1 || m < 1 || m_s < 1 || m_b < 1 || n_t < 1 || k < 1)
            throw config_error("all array/user counts must be >= 1");
        if (n_r != n_b * n_s)
            throw config_error("N_r = N_B * N_s violated");
        if (m != m_b * m_s)
            throw config_error("M = M_B * M_s violated");
        if (k > n_s)
            throw config_error("K <= N_s violated");
        if (!(n0 > 0.0))
            throw config_error("noise power N0 must be positive");
        if (!(carrier_freq_hz > 0.0))
            throw config_error("carrier frequency must be positive");
        if (!(spacing_over_lambda > 0.0))
            throw config_error("element spacing must be positive");
        if (!(reflect_amplitude > 0.0 && reflect_amplitude <= 1.0))
            throw config_error("reflect amplitude must be in (0, 1]");
    }
};

// Parameterized THz path-gain model: free-space spreading with molecular
// absorption, an extra reflection factor on non-LoS paths, and uniform
// phases. LoS gain magnitude is c/(4 pi f d) * exp(-absorption * d / 2);
// NLoS paths are additionally scaled by the reflection coefficient.
//
// The default reflection keeps the path powers comparable. Pushing it down
// to obstacle-grade values (1e-6) makes every link numerically rank-1, and
// a rank-1 BS-RIS cascade cannot carry K >= 2 zero-forced streams.
struct GainModel {
    double absorption = 0.2;   // kappa(f), 1/m
    double reflection = 0.5;   // xi(f), applied to NLoS paths
    double d0 = 20.0;          // BS-RIS distance, m
    double user_region_diameter = 24.0; // users drawn inside this circle, m
    bool los_present = true;   // path 0 uses the LoS gain when set
    bool normalize = true;     // rescale gains per link so sum |g|^2 = L + 1

    void validate() const
    {
        if (absorption < 0.0)
            throw config_error("absorption coefficient must be >= 0");
        if (!(reflection > 0.0 && reflection <= 1.0))
            throw config_error("reflection coefficient must be in (0, 1]");
        if (!(d0 > 0.0) || !(user_region_diameter > 0.0))
            throw config_error("distances must be positive");
    }

    double los_magnitude(double freq_hz, double dist_m) const
    {
        constexpr double c0 = 299792458.0;
        return c0 / (4.0 * pi * freq_hz * dist_m) * std::exp(-absorption * dist_m / 2.0);
    }
};

} // namespace risbeam

#endif
