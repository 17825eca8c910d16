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
// Combinatorial codeword selection: exhaustive search over the full
// Cartesian product, the iterative alternating search that enumerates one
// codeword block at a time, and a uniform random baseline. Candidate sweeps
// run data-parallel over immutable inputs; the reduction picks the
// lexicographically smallest argmax so results do not depend on the worker
// count.

#ifndef RISBEAM_SEARCH_HPP
#define RISBEAM_SEARCH_HPP

#include <optional>

#include "risbeam/metric.hpp"

namespace risbeam {

struct SearchReport {
    BeamSelection best_selection;
    double best_rate = 0.0;
    std::uint64_t candidates_evaluated = 0;
    std::uint64_t multiply_count = 0; // closed-form accounting, see multiply_cost
    int iterations = 0;               // alternating search only
    bool converged = true;
    std::vector<double> sweep_rates;  // best rate after each block sweep (IAS)
};

struct SearchBudget {
    std::uint64_t max_candidates = 10'000'000;
};

// Number of candidates each algorithm visits.
std::uint64_t es_candidate_count(const SystemConfig &cfg, const CodebookTriple &cb);
std::uint64_t ias_candidates_per_iteration(const SystemConfig &cfg, const CodebookTriple &cb);

// Global maximizer of the sum-rate over all |F|^K * |S|^{M_s} * |W|^{N_s}
// combinations; ties break toward the lexicographically smallest
// (f..., s..., w...) tuple. Refuses with budget_error when the product
// exceeds the budget.
SearchReport exhaustive_search(const ChannelSet &ch, const CodebookTriple &cb,
                               const SystemConfig &cfg, const SearchBudget &budget = {});

// Alternating block search: per iteration, jointly re-optimize all user
// beams, then all RIS subarray vectors, then all BS beams, each by full
// enumeration of that block. Stops after t_max iterations or as soon as an
// entire iteration changes nothing. Starts from `init` when given,
// otherwise from a random valid selection drawn from `seed`.
SearchReport ias_search(const ChannelSet &ch, const CodebookTriple &cb, const SystemConfig &cfg,
                        int t_max = 10, std::optional<BeamSelection> init = std::nullopt,
                        std::uint64_t seed = 0, const SearchBudget &budget = {});

// Uniformly random valid selection and its rate.
SearchReport random_baseline(const ChannelSet &ch, const CodebookTriple &cb,
                             const SystemConfig &cfg, std::uint64_t seed);

BeamSelection random_selection(const CodebookTriple &cb, const SystemConfig &cfg, Rng &rng);

enum class Algorithm { es, ias, mtl };

// Network dimensions entering the prediction-complexity accounting.
struct NetCostDims {
    int conv_kernel = 3;
    int conv_planes_in = 2;
    int conv_planes_hidden = 8;
    int n_blocks = 2;  // residual blocks, two conv layers each
    int head_width = 256;
    int n_fc = 2;
};

struct CodebookSizes {
    std::uint64_t f = 1, s = 1, w = 1;
};

// Closed-form complex-multiplication counts.
//   o1: assembling the equivalent channel for one candidate
//   o2: the determinant-ratio metric given the equivalent channel
//   o3: the full sum-rate metric for one candidate
std::uint64_t multiply_cost_o1(const SystemConfig &cfg);
std::uint64_t multiply_cost_o2(const SystemConfig &cfg);
std::uint64_t multiply_cost_o3(const SystemConfig &cfg);

// Total multiplication count for a full run of the given algorithm; the
// MTL figure counts one online prediction (conv stacks, FC stacks and one
// candidate evaluation).
std::uint64_t multiply_cost(const SystemConfig &cfg, Algorithm alg, const CodebookSizes &sizes,
                            int t_max = 10, const NetCostDims &net = {});

} // namespace risbeam

#endif
