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
// Supervised beam-selection dataset: channel realizations as real/imaginary
// float planes, labeled with the search algorithm's argmax index tuples.
//
// File format "RBL1", little-endian:
//   magic (4 bytes) | u64 header length | canonical header text
//   3 codebooks, each: u32 count, u32 dim, count*dim complex<f64>
//   u32 n_samples
//   per sample: u64 sample seed | channel planes f32 | labels u32
//   u32 n_train, train indices u32 | u32 n_val, val indices u32
// The header text is sorted key=value lines, so write -> read -> write is
// byte-identical. Channel planes are stored at 32 bits; labels always come
// from the full-precision search on the regenerated 64-bit channels.

#ifndef RISBEAM_DATASET_HPP
#define RISBEAM_DATASET_HPP

#include <string>

#include "risbeam/search.hpp"

namespace risbeam {

enum class Labeler { ias, es };

struct DatasetHeader {
    SystemConfig cfg;
    GainModel gm;
    int l_b = 3, l_u = 3;          // path counts per link
    int size_f = 8, size_s = 8, size_w = 8;
    std::uint64_t seed = 0;
    std::uint32_t n_samples = 0;
    Labeler labeler = Labeler::ias;
    int ias_t_max = 10;
    std::uint64_t codebook_hash = 0;

    // floats per sample: 2*N_r*M for the BS-RIS link plus K * 2*M*N_t
    std::size_t floats_per_sample() const;
    std::size_t labels_per_sample() const; // K + M_s + N_s
};

struct Sample {
    std::uint64_t sample_seed = 0;
    std::vector<float> planes;          // H_r planes first, then each user
    std::vector<std::uint32_t> labels;  // f labels, s labels, w labels
};

struct BeamDataset {
    DatasetHeader header;
    CodebookTriple codebooks;
    std::vector<Sample> samples;
    std::vector<std::uint32_t> train_idx;
    std::vector<std::uint32_t> val_idx;
};

// Complex matrix -> two stacked real planes (Re then Im), row-major; and back.
void append_planes(const CMat &m, std::vector<float> &out);
CMat planes_to_cmat(const float *planes, int rows, int cols);

// Flattens a ChannelSet into the sample plane layout.
std::vector<float> channel_to_planes(const ChannelSet &ch);

// Regenerates the full-precision ChannelSet of a sample from its stored seed.
ChannelSet sample_channel(const DatasetHeader &h, std::uint64_t sample_seed);

BeamSelection labels_to_selection(const DatasetHeader &h, const std::vector<std::uint32_t> &labels);

// Generates n_samples labeled samples. Sample t draws its channel and the
// labeler's start point from derive_seed(seed, t), so generation is
// reproducible and order-independent under parallelism. The split is left
// empty; apply split_dataset afterwards.
BeamDataset generate_dataset(const SystemConfig &cfg, const GainModel &gm,
                             const CodebookTriple &cb, int l_b, int l_u, std::uint32_t n_samples,
                             std::uint64_t seed, Labeler labeler, int ias_t_max = 10,
                             const SearchBudget &budget = {});

// Deterministic shuffled train/validation split covering every sample.
void split_dataset(BeamDataset &ds, double train_fraction, std::uint64_t seed);

struct Batch {
    std::vector<std::uint32_t> sample_ids;
    // planes of every sample in the batch, concatenated in sample order
    std::vector<float> planes;
    std::vector<std::uint32_t> labels;
    int batch_size = 0;
};

// Slices one epoch of batches out of a split (train_idx or val_idx),
// optionally shuffled; the final short batch is included.
std::vector<Batch> iterate_batches(const BeamDataset &ds,
                                   const std::vector<std::uint32_t> &split, int batch_size,
                                   std::optional<std::uint64_t> shuffle_seed);

void save_dataset(const BeamDataset &ds, const std::string &path);
BeamDataset load_dataset(const std::string &path);

// Human-readable sidecar next to the binary file ("<path>.meta.json").
void write_dataset_meta(const BeamDataset &ds, const std::string &dataset_path);

} // namespace risbeam

#endif
