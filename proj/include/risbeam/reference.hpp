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
// Serial, structure-free reference implementations. These stay deliberately
// naive - dense matrices, flat loops, no caching - so the optimized kernels
// in metric/search can be checked against an independent computation. Tests
// and the benchmark target link them; the production library does not call
// into this file.

#ifndef RISBEAM_REFERENCE_HPP
#define RISBEAM_REFERENCE_HPP

#include "risbeam/search.hpp"

namespace risbeam::ref {

// Dense M x M phase matrix and dense N_s x N_r combiner.
CMat dense_phase_matrix(const BeamSelection &sel, const CodebookTriple &cb,
                        const SystemConfig &cfg);
CMat dense_block_combiner(const BeamSelection &sel, const CodebookTriple &cb,
                          const SystemConfig &cfg);

// Equivalent channel by the full dense product W_R H_r Phi H_k f_k, using
// local triple loops rather than the linalg helpers.
CMat equivalent_channel_dense(const ChannelSet &ch, const BeamSelection &sel,
                              const CodebookTriple &cb, const SystemConfig &cfg);

// Gram inverse by Gauss-Jordan elimination, independent of the LU path.
CMat gram_inverse_gauss_jordan(const CMat &hbar);

// Sum rate through the dense chain and the Gauss-Jordan inverse.
double sum_rate_dense(const ChannelSet &ch, const BeamSelection &sel, const CodebookTriple &cb,
                      const SystemConfig &cfg);

// Exhaustive search as six nested index loops (requires K = M_s = N_s = 2),
// evaluating every candidate through the dense chain. First-found maximum
// wins, which is exactly the lexicographic tie-break.
SearchReport exhaustive_search_sixloop(const ChannelSet &ch, const CodebookTriple &cb,
                                       const SystemConfig &cfg);

// Complex-multiplication counter for the instrumented evaluation below.
struct MultCounter {
    std::uint64_t chain = 0;    // equivalent-channel assembly stages
    std::uint64_t combine = 0;  // analog-combiner dots
};

// Evaluates the equivalent channel per (user, BS subarray) pair with a dense
// diagonal product, tallying one count per executed complex multiplication
// in the assembly stages. `chain` lands exactly on the closed-form
// K * N_s * (N_r M + M^2 + M N_t + N_t) figure.
CMat equivalent_channel_instrumented(const ChannelSet &ch, const BeamSelection &sel,
                                     const CodebookTriple &cb, const SystemConfig &cfg,
                                     MultCounter &counter);

// Numerical rank via full-pivot elimination at a relative threshold.
int numerical_rank(CMat a, double rel_tol);

// Naive serial 2-D convolution (stride 1, zero padding), float or double.
// x: [batch, c_in, h, w], k: [c_out, c_in, kh, kw], bias: [c_out].
template <typename T>
std::vector<T> conv2d_naive(const std::vector<T> &x, int batch, int c_in, int h, int w,
                            const std::vector<T> &k, int c_out, int kh, int kw,
                            const std::vector<T> &bias);

} // namespace risbeam::ref

#endif
