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
// Equivalent-channel assembly and the zero-forcing sum-rate metric. The
// per-user SINR needs the diagonal of the inverse Gram matrix; it is
// available two ways, as the plain inverse ("direct") and as a ratio of
// determinants ("det_ratio", the low-complexity form). Both must agree;
// the direct form doubles as a built-in oracle for the ratio form.

#ifndef RISBEAM_METRIC_HPP
#define RISBEAM_METRIC_HPP

#include <span>
#include <vector>

#include "risbeam/channel.hpp"
#include "risbeam/codebook.hpp"

namespace risbeam {

// Indices of the selected codewords: one user beam per user, one phase
// vector per RIS subarray, one combiner beam per BS subarray.
struct BeamSelection {
    std::vector<std::uint32_t> f_idx; // K entries into cb.f
    std::vector<std::uint32_t> s_idx; // M_s entries into cb.s
    std::vector<std::uint32_t> w_idx; // N_s entries into cb.w

    bool operator==(const BeamSelection &) const = default;
};

void validate_selection(const BeamSelection &sel, const CodebookTriple &cb,
                        const SystemConfig &cfg);

// Diagonal of the RIS phase matrix: the M_s selected phase vectors
// concatenated and scaled by the reflect amplitude, so every entry has
// modulus cfg.reflect_amplitude.
std::vector<cxd> assemble_phase_matrix(const BeamSelection &sel, const CodebookTriple &cb,
                                       const SystemConfig &cfg);

// Block-diagonal analog combiner, stored as its N_s nonzero rows. Row n
// occupies columns [n * N_B, (n + 1) * N_B) of the dense N_s x N_r matrix.
struct BlockCombiner {
    std::vector<std::vector<cxd>> rows; // N_s rows of length N_B
    int n_b = 0;
};

BlockCombiner assemble_block_combiner(const BeamSelection &sel, const CodebookTriple &cb,
                                      const SystemConfig &cfg);

// Equivalent channel Hbar (N_s x K): column k chains analog combiner,
// BS-RIS channel, phase matrix, user channel and user beam. Exploits the
// diagonal and block-diagonal structure instead of dense products.
CMat equivalent_channel(const ChannelSet &ch, const BeamSelection &sel, const CodebookTriple &cb,
                        const SystemConfig &cfg);

// Zero-forcing digital combiner (Gram inverse times Hbar^H). Throws
// rank_deficiency_error carrying the 1-norm condition estimate when the
// Gram matrix is singular or its condition exceeds 1e12.
CMat zf_combiner(const CMat &hbar);

// [(Hbar^H Hbar)^{-1}]_{k,k} computed as det(Gram minor) / det(Gram), with
// determinants in log-magnitude + phase form. k is zero-based.
double diag_inverse_entry(const CMat &hbar, int k);

enum class RateMode { direct, det_ratio };

// Sum over users of log2(1 + SINR_k) with
// SINR_k = P / (N_t * N_B * N0 * [(Hbar^H Hbar)^{-1}]_{k,k}).
// Throws rank_deficiency_error when the Gram matrix is singular; sweeps
// catch that and score the selection as -inf.
double sum_rate_hbar(const CMat &hbar, const SystemConfig &cfg,
                     RateMode mode = RateMode::det_ratio);

double sum_rate(const ChannelSet &ch, const BeamSelection &sel, const CodebookTriple &cb,
                const SystemConfig &cfg, RateMode mode = RateMode::det_ratio);

// Workspace-backed evaluator for codeword sweeps against one fixed channel
// realization. Not thread-safe; give each worker its own instance. Partial
// caches make the per-candidate cost of a block sweep small:
//   set_sw + rate_f: user-beam sweep with RIS/BS beams fixed,
//   set_fw + rate_s: RIS sweep with user/BS beams fixed,
//   set_fs + rate_w: BS sweep with user/RIS beams fixed.
// All rate() variants return -inf for rank-deficient selections.
class SelectionEvaluator {
  public:
    SelectionEvaluator(const ChannelSet &ch, const CodebookTriple &cb, const SystemConfig &cfg);

    double rate(const BeamSelection &sel);

    void set_sw(std::span<const std::uint32_t> s_idx, std::span<const std::uint32_t> w_idx);
    double rate_f(std::span<const std::uint32_t> f_idx);

    void set_fw(std::span<const std::uint32_t> f_idx, std::span<const std::uint32_t> w_idx);
    double rate_s(std::span<const std::uint32_t> s_idx);

    void set_fs(std::span<const std::uint32_t> f_idx, std::span<const std::uint32_t> s_idx);
    double rate_w(std::span<const std::uint32_t> w_idx);

  private:
    void build_phase(std::span<const std::uint32_t> s_idx);
    void propagate(int k, const cxd *r_vec); // y_[k] = H_r * (Phi .* r_vec)
    double rate_from_hbar();

    const ChannelSet &ch_;
    const CodebookTriple &cb_;
    const SystemConfig &cfg_;
    double snr_scale_; // P / (N_t * N_B * N0)

    std::vector<std::vector<cxd>> r_kf_; // [k * |F| + f] -> H_k f, length M
    std::vector<cxd> phase_;             // current diag(Phi), length M
    std::vector<std::vector<cxd>> y_;    // per user, H_r Phi H_k f_k, length N_r
    std::vector<cxd> z_;                 // scratch, length M
    std::vector<std::uint32_t> cur_f_, cur_w_;
    std::vector<cxd> wdots_;   // [w][n][k] combiner dot table for rate_w
    std::vector<cxd> colcache_; // [k][f][n] column cache for rate_f
    CMat hbar_;
    CMat gram_;
    std::vector<cxd> scratch_den_, scratch_num_; // LU workspaces, K*K each
};

} // namespace risbeam

#endif
