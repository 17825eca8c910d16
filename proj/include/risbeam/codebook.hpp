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

#ifndef RISBEAM_CODEBOOK_HPP
#define RISBEAM_CODEBOOK_HPP

#include <cstdint>
#include <vector>

#include "risbeam/config.hpp"

namespace risbeam {

// The three predefined analog beam codebooks, sampled on uniform sin-domain
// grids (DFT-like beams):
//   f - user beams, length N_t, unit Euclidean norm;
//   s - RIS subarray phase-shift vectors, length M_B, unit-modulus entries
//       (the reflect amplitude is applied later, when the phase matrix is
//       assembled);
//   w - BS subarray beams, length N_B, unit Euclidean norm.
// Codeword order is grid order and never changes for fixed inputs.
struct CodebookTriple {
    std::vector<std::vector<cxd>> f;
    std::vector<std::vector<cxd>> s;
    std::vector<std::vector<cxd>> w;
};

CodebookTriple build_codebooks(const SystemConfig &cfg, int size_f, int size_s, int size_w);

// FNV-1a over the raw double bits of every codeword, in codebook order.
std::uint64_t codebook_hash(const CodebookTriple &cb);

} // namespace risbeam

#endif
