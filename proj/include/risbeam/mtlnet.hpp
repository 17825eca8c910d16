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
// The multi-task beam classifier. Shared trunk: two residual conv blocks
// applied to every link's real/imaginary planes, then a per-link linear
// projection to a common embedding width (the channel matrices have
// different shapes per link, so the sums below need a shared width).
// Task heads: per-user beam logits from the summed (r + user) embeddings,
// RIS logits from the concatenation of all link embeddings, and BS logits
// from the user rows of a self-attention pass added to the task-1 stack.
// Trained with Adam plus a step-decay learning rate on the mean of the
// three cross-entropy losses (natural log).

#ifndef RISBEAM_MTLNET_HPP
#define RISBEAM_MTLNET_HPP

#include <cmath>
#include <fstream>

#include "risbeam/dataset.hpp"
#include "risbeam/tensor.hpp"

namespace risbeam::nn {

struct MtlArch {
    int conv_kernel = 3;
    int conv_hidden = 8;  // Conv1 expands 2 -> hidden, Conv2 restores
    int embed_dim = 128;  // common per-link embedding width
    int head_width = 256; // two FC layers per head
    int attn_dim = 64;    // d_K (paper example uses 1024; desk scale is smaller)
    bool per_link_blocks = false; // residual blocks shared across links by default
};

struct TrainConfig {
    double lr = 1e-3;
    double beta1 = 0.8;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    int batch_size = 16;
    int epochs = 10;
    double lr_decay = 0.1; // multiplier mu
    int lr_step = 5;       // epochs between decays, N_stp
    double dropout = 0.3;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (!(lr > 0.0))
            throw config_error("learning rate must be positive");
        if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
            throw config_error("adam betas must be in [0, 1)");
        if (dropout < 0.0 || dropout >= 1.0)
            throw config_error("dropout rate must be in [0, 1)");
        if (batch_size < 1 || epochs < 1 || lr_step < 1)
            throw config_error("batch size, epochs and lr step must be >= 1");
    }

    double lr_at_epoch(int epoch) const { return lr * std::pow(lr_decay, epoch / lr_step); }
};

template <typename T>
struct MtlModel {
    MtlArch arch;
    SystemConfig cfg;
    int size_f = 0, size_s = 0, size_w = 0;
    std::uint64_t init_seed = 0;

    struct ConvBlock {
        TensorPtr<T> k1, b1, k2, b2;
    };
    std::vector<ConvBlock> blocks;      // 2, or (K+1)*2 when per_link_blocks
    std::vector<TensorPtr<T>> proj_w;   // K+1 projections, users first, r last
    std::vector<TensorPtr<T>> proj_b;
    TensorPtr<T> attn_wq, attn_bq, attn_wk, attn_bk, attn_wv, attn_bv, attn_wo, attn_bo;
    TensorPtr<T> h1_w1, h1_b1, h1_w2, h1_b2;
    TensorPtr<T> h2_w1, h2_b1, h2_w2, h2_b2;
    TensorPtr<T> h3_w1, h3_b1, h3_w2, h3_b2;

    // every parameter tensor, in the fixed declaration order used by the
    // checkpoint format
    std::vector<TensorPtr<T>> parameters() const
    {
        std::vector<TensorPtr<T>> p;
        for (const auto &b : blocks) {
            p.push_back(b.k1);
            p.push_back(b.b1);
            p.push_back(b.k2);
            p.push_back(b.b2);
        }
        for (std::size_t i = 0; i < proj_w.size(); ++i) {
            p.push_back(proj_w[i]);
            p.push_back(proj_b[i]);
        }
        for (const auto &t : {attn_wq, attn_bq, attn_wk, attn_bk, attn_wv, attn_bv, attn_wo,
                              attn_bo, h1_w1, h1_b1, h1_w2, h1_b2, h2_w1, h2_b1, h2_w2, h2_b2,
                              h3_w1, h3_b1, h3_w2, h3_b2})
            p.push_back(t);
        return p;
    }

    int links() const { return cfg.k + 1; }
};

namespace detail {

template <typename T>
TensorPtr<T> init_tensor(std::vector<std::size_t> shape, std::size_t fan_in, Rng &rng)
{
    auto t = make_tensor<T>(std::move(shape));
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (auto &v : t->v)
        v = static_cast<T>(rng.uniform(-bound, bound));
    return t;
}

} // namespace detail

template <typename T>
MtlModel<T> make_model(const SystemConfig &cfg, const MtlArch &arch, int size_f, int size_s,
                       int size_w, std::uint64_t seed)
{
    cfg.validate();
    if (size_f < 1 || size_s < 1 || size_w < 1)
        throw config_error("codebook sizes must be >= 1");

    MtlModel<T> m;
    m.arch = arch;
    m.cfg = cfg;
    m.size_f = size_f;
    m.size_s = size_s;
    m.size_w = size_w;
    m.init_seed = seed;

    Rng rng(seed);
    const std::size_t ker = static_cast<std::size_t>(arch.conv_kernel);
    const std::size_t hid = static_cast<std::size_t>(arch.conv_hidden);
    const int n_block_sets = arch.per_link_blocks ? m.links() : 1;
    for (int s = 0; s < n_block_sets; ++s)
        for (int b = 0; b < 2; ++b) {
            typename MtlModel<T>::ConvBlock blk;
            blk.k1 = detail::init_tensor<T>({hid, 2, ker, ker}, 2 * ker * ker, rng);
            blk.b1 = detail::init_tensor<T>({hid}, 2 * ker * ker, rng);
            blk.k2 = detail::init_tensor<T>({2, hid, ker, ker}, hid * ker * ker, rng);
            blk.b2 = detail::init_tensor<T>({2}, hid * ker * ker, rng);
            m.blocks.push_back(blk);
        }

    const std::size_t d = static_cast<std::size_t>(arch.embed_dim);
    const std::size_t in_user = 2u * cfg.m * cfg.n_t;
    const std::size_t in_r = 2u * cfg.n_r * cfg.m;
    for (int i = 0; i < m.links(); ++i) {
        std::size_t fan = i < cfg.k ? in_user : in_r;
        m.proj_w.push_back(detail::init_tensor<T>({fan, d}, fan, rng));
        m.proj_b.push_back(detail::init_tensor<T>({d}, fan, rng));
    }

    const std::size_t da = static_cast<std::size_t>(arch.attn_dim);
    m.attn_wq = detail::init_tensor<T>({d, da}, d, rng);
    m.attn_bq = detail::init_tensor<T>({da}, d, rng);
    m.attn_wk = detail::init_tensor<T>({d, da}, d, rng);
    m.attn_bk = detail::init_tensor<T>({da}, d, rng);
    m.attn_wv = detail::init_tensor<T>({d, d}, d, rng);
    m.attn_bv = detail::init_tensor<T>({d}, d, rng);
    m.attn_wo = detail::init_tensor<T>({d, d}, d, rng);
    m.attn_bo = detail::init_tensor<T>({d}, d, rng);

    const std::size_t hw = static_cast<std::size_t>(arch.head_width);
    m.h1_w1 = detail::init_tensor<T>({d, hw}, d, rng);
    m.h1_b1 = detail::init_tensor<T>({hw}, d, rng);
    m.h1_w2 = detail::init_tensor<T>({hw, static_cast<std::size_t>(size_f)}, hw, rng);
    m.h1_b2 = detail::init_tensor<T>({static_cast<std::size_t>(size_f)}, hw, rng);

    const std::size_t in2 = static_cast<std::size_t>(m.links()) * d;
    m.h2_w1 = detail::init_tensor<T>({in2, hw}, in2, rng);
    m.h2_b1 = detail::init_tensor<T>({hw}, in2, rng);
    m.h2_w2 = detail::init_tensor<T>({hw, static_cast<std::size_t>(cfg.m_s) * size_s}, hw, rng);
    m.h2_b2 = detail::init_tensor<T>({static_cast<std::size_t>(cfg.m_s) * size_s}, hw, rng);

    const std::size_t in3 = static_cast<std::size_t>(cfg.k) * d;
    m.h3_w1 = detail::init_tensor<T>({in3, hw}, in3, rng);
    m.h3_b1 = detail::init_tensor<T>({hw}, in3, rng);
    m.h3_w2 = detail::init_tensor<T>({hw, static_cast<std::size_t>(cfg.n_s) * size_w}, hw, rng);
    m.h3_b2 = detail::init_tensor<T>({static_cast<std::size_t>(cfg.n_s) * size_w}, hw, rng);
    return m;
}

struct ForwardCtx {
    bool training = false;
    double dropout_rate = 0.0;
    std::uint64_t dropout_seed = 0;
    int dropout_calls = 0;
};

template <typename T>
struct TaskLogits {
    TensorPtr<T> task1; // [B*K, |F|]
    TensorPtr<T> task2; // [B*M_s, |S|]
    TensorPtr<T> task3; // [B*N_s, |W|]
};

// Batch planes (sample-major floats) -> per-link input tensors. Users come
// back at indices 0..K-1 and the BS-RIS link last, matching the link order
// of the embeddings.
template <typename T>
std::vector<TensorPtr<T>> batch_inputs(const MtlModel<T> &model, const Batch &batch)
{
    const SystemConfig &cfg = model.cfg;
    const std::size_t bsz = static_cast<std::size_t>(batch.batch_size);
    const std::size_t r_plane = 2u * cfg.n_r * cfg.m;
    const std::size_t u_plane = 2u * cfg.m * cfg.n_t;
    const std::size_t per_sample = r_plane + cfg.k * u_plane;
    if (batch.planes.size() != bsz * per_sample)
        throw std::invalid_argument("batch plane size does not match the model configuration");

    std::vector<TensorPtr<T>> inputs;
    for (int k = 0; k < cfg.k; ++k) {
        auto t = make_tensor<T>({bsz, 2, static_cast<std::size_t>(cfg.m),
                                 static_cast<std::size_t>(cfg.n_t)});
        for (std::size_t b = 0; b < bsz; ++b) {
            const float *src = batch.planes.data() + b * per_sample + r_plane + k * u_plane;
            T *dst = t->v.data() + b * u_plane;
            for (std::size_t i = 0; i < u_plane; ++i)
                dst[i] = static_cast<T>(src[i]);
        }
        inputs.push_back(t);
    }
    auto r = make_tensor<T>({bsz, 2, static_cast<std::size_t>(cfg.n_r),
                             static_cast<std::size_t>(cfg.m)});
    for (std::size_t b = 0; b < bsz; ++b) {
        const float *src = batch.planes.data() + b * per_sample;
        T *dst = r->v.data() + b * r_plane;
        for (std::size_t i = 0; i < r_plane; ++i)
            dst[i] = static_cast<T>(src[i]);
    }
    inputs.push_back(r);
    return inputs;
}

// One residual block: x + Conv2(relu(Conv1(x))). Zero conv weights make
// this the identity map.
template <typename T>
TensorPtr<T> residual_block(Tape<T> &tape, const typename MtlModel<T>::ConvBlock &blk,
                            const TensorPtr<T> &x)
{
    return residual_add(tape, conv2d(tape, relu(tape, conv2d(tape, x, blk.k1, blk.b1)), blk.k2, blk.b2), x);
}

// Shared trunk for one link: two residual blocks.
template <typename T>
TensorPtr<T> shared_forward_link(Tape<T> &tape, const MtlModel<T> &model, int link,
                                 const TensorPtr<T> &x)
{
    const int base = model.arch.per_link_blocks ? link * 2 : 0;
    TensorPtr<T> t = residual_block<T>(tape, model.blocks[base], x);
    return residual_block<T>(tape, model.blocks[base + 1], t);
}

// Trunk features for all links (users first, r last), before projection.
template <typename T>
std::vector<TensorPtr<T>> shared_forward(Tape<T> &tape, const MtlModel<T> &model,
                                         const std::vector<TensorPtr<T>> &inputs)
{
    if (static_cast<int>(inputs.size()) != model.links())
        throw std::invalid_argument("shared_forward: expected one input per link");
    std::vector<TensorPtr<T>> feats;
    for (int i = 0; i < model.links(); ++i)
        feats.push_back(shared_forward_link(tape, model, i, inputs[i]));
    return feats;
}

// Per-link embeddings: flatten trunk output and project to embed_dim.
template <typename T>
std::vector<TensorPtr<T>> link_embeddings(Tape<T> &tape, const MtlModel<T> &model,
                                          const std::vector<TensorPtr<T>> &feats)
{
    std::vector<TensorPtr<T>> emb;
    for (std::size_t i = 0; i < feats.size(); ++i) {
        const std::size_t bsz = feats[i]->shape[0];
        const std::size_t flat = feats[i]->numel() / bsz;
        auto x = reshape(tape, feats[i], {bsz, flat});
        emb.push_back(linear(tape, x, model.proj_w[i], model.proj_b[i]));
    }
    return emb;
}

template <typename T>
TensorPtr<T> head(Tape<T> &tape, const TensorPtr<T> &x, const TensorPtr<T> &w1,
                  const TensorPtr<T> &b1, const TensorPtr<T> &w2, const TensorPtr<T> &b2,
                  ForwardCtx &ctx)
{
    auto z = relu(tape, linear(tape, x, w1, b1));
    z = dropout(tape, z, ctx.training ? ctx.dropout_rate : 0.0, ctx.training,
                derive_seed(ctx.dropout_seed, static_cast<std::uint64_t>(ctx.dropout_calls++)));
    return linear(tape, z, w2, b2);
}

// Scaled dot-product self-attention over the link axis; rows of the
// attention matrix sum to one.
template <typename T>
TensorPtr<T> self_attention(Tape<T> &tape, const MtlModel<T> &model, const TensorPtr<T> &stacked)
{
    auto zq = linear(tape, stacked, model.attn_wq, model.attn_bq);
    auto zk = linear(tape, stacked, model.attn_wk, model.attn_bk);
    auto zv = linear(tape, stacked, model.attn_wv, model.attn_bv);
    auto scores = scale(tape, matmul(tape, zq, zk, true),
                        static_cast<T>(1.0 / std::sqrt(static_cast<double>(model.arch.attn_dim))));
    auto attn = softmax_rows(tape, scores);
    auto mixed = matmul(tape, attn, zv);
    return relu(tape, linear(tape, mixed, model.attn_wo, model.attn_bo));
}

template <typename T>
TaskLogits<T> forward(Tape<T> &tape, const MtlModel<T> &model, const Batch &batch,
                      ForwardCtx &ctx)
{
    const SystemConfig &cfg = model.cfg;
    const std::size_t bsz = static_cast<std::size_t>(batch.batch_size);
    const std::size_t d = static_cast<std::size_t>(model.arch.embed_dim);

    auto inputs = batch_inputs(model, batch);
    auto feats = shared_forward(tape, model, inputs);
    auto emb = link_embeddings(tape, model, feats);
    const TensorPtr<T> &emb_r = emb.back();

    // task 1: per user, r-embedding + user-embedding, shared two-layer head
    std::vector<TensorPtr<T>> sums;
    for (int k = 0; k < cfg.k; ++k)
        sums.push_back(add(tape, emb_r, emb[k]));
    auto hf_stack = stack_rows(tape, sums);                       // [B, K, d]
    auto h1_in = reshape(tape, hf_stack, {bsz * cfg.k, d});       // row-wise head
    TaskLogits<T> out;
    out.task1 = head(tape, h1_in, model.h1_w1, model.h1_b1, model.h1_w2, model.h1_b2, ctx);

    // task 2: all link embeddings concatenated, r first
    std::vector<TensorPtr<T>> cat{emb_r};
    for (int k = 0; k < cfg.k; ++k)
        cat.push_back(emb[k]);
    auto h2_in = concat_cols(tape, cat);
    auto logits2 = head(tape, h2_in, model.h2_w1, model.h2_b1, model.h2_w2, model.h2_b2, ctx);
    out.task2 = reshape(tape, logits2,
                        {bsz * cfg.m_s, static_cast<std::size_t>(model.size_s)});

    // task 3: user rows of the attention output plus the task-1 stack
    std::vector<TensorPtr<T>> all_links(emb.begin(), emb.end() - 1);
    all_links.push_back(emb_r);
    auto stacked = stack_rows(tape, all_links);                   // [B, K+1, d]
    auto hw_full = self_attention(tape, model, stacked);
    auto hw_users = slice_axis1(tape, hw_full, 0, cfg.k);         // [B, K, d]
    auto h3_in = reshape(tape, add(tape, hw_users, hf_stack), {bsz, cfg.k * d});
    auto logits3 = head(tape, h3_in, model.h3_w1, model.h3_b1, model.h3_w2, model.h3_b2, ctx);
    out.task3 = reshape(tape, logits3,
                        {bsz * cfg.n_s, static_cast<std::size_t>(model.size_w)});

    out.task1 = reshape(tape, out.task1,
                        {bsz * cfg.k, static_cast<std::size_t>(model.size_f)});
    return out;
}

// Per-task label columns of a batch, flattened to match the logit rows.
struct BatchLabels {
    std::vector<std::uint32_t> task1, task2, task3;
};

inline BatchLabels split_labels(const SystemConfig &cfg, const Batch &batch)
{
    BatchLabels out;
    const std::size_t lps = static_cast<std::size_t>(cfg.k) + cfg.m_s + cfg.n_s;
    for (int b = 0; b < batch.batch_size; ++b) {
        const std::uint32_t *row = batch.labels.data() + static_cast<std::size_t>(b) * lps;
        for (int k = 0; k < cfg.k; ++k)
            out.task1.push_back(row[k]);
        for (int m = 0; m < cfg.m_s; ++m)
            out.task2.push_back(row[cfg.k + m]);
        for (int n = 0; n < cfg.n_s; ++n)
            out.task3.push_back(row[cfg.k + cfg.m_s + n]);
    }
    return out;
}

template <typename T>
struct LossBreakdown {
    TensorPtr<T> total;
    double task1 = 0.0, task2 = 0.0, task3 = 0.0;
    double value() const { return static_cast<double>(total->v[0]); }
};

// L = (L1 + L2 + L3) / 3, each task the mean group cross-entropy.
template <typename T>
LossBreakdown<T> total_loss(Tape<T> &tape, const MtlModel<T> &model, const Batch &batch,
                            ForwardCtx &ctx)
{
    auto logits = forward(tape, model, batch, ctx);
    auto labels = split_labels(model.cfg, batch);
    auto l1 = cross_entropy(tape, logits.task1, labels.task1);
    auto l2 = cross_entropy(tape, logits.task2, labels.task2);
    auto l3 = cross_entropy(tape, logits.task3, labels.task3);
    LossBreakdown<T> out;
    out.task1 = static_cast<double>(l1->v[0]);
    out.task2 = static_cast<double>(l2->v[0]);
    out.task3 = static_cast<double>(l3->v[0]);
    out.total = scale(tape, add(tape, add(tape, l1, l2), l3), T(1.0 / 3.0));
    return out;
}

template <typename T>
class Adam {
  public:
    Adam(std::vector<TensorPtr<T>> params, double beta1, double beta2, double eps)
        : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps)
    {
        for (const auto &p : params_) {
            m_.emplace_back(p->numel(), T{});
            v_.emplace_back(p->numel(), T{});
        }
    }

    // one update from the accumulated grads; zeroes them afterwards
    void step(double lr)
    {
        ++t_;
        const double bc1 = 1.0 - std::pow(beta1_, t_);
        const double bc2 = 1.0 - std::pow(beta2_, t_);
        for (std::size_t i = 0; i < params_.size(); ++i) {
            auto &p = *params_[i];
            p.ensure_grad();
            for (std::size_t j = 0; j < p.numel(); ++j) {
                const double g = static_cast<double>(p.g[j]);
                double m = beta1_ * static_cast<double>(m_[i][j]) + (1.0 - beta1_) * g;
                double v = beta2_ * static_cast<double>(v_[i][j]) + (1.0 - beta2_) * g * g;
                m_[i][j] = static_cast<T>(m);
                v_[i][j] = static_cast<T>(v);
                p.v[j] -= static_cast<T>(lr * (m / bc1) / (std::sqrt(v / bc2) + eps_));
            }
            p.zero_grad();
        }
    }

    int steps() const { return t_; }

  private:
    std::vector<TensorPtr<T>> params_;
    std::vector<std::vector<T>> m_, v_;
    double beta1_, beta2_, eps_;
    int t_ = 0;
};

struct Accuracy {
    double task1 = 0.0, task2 = 0.0, task3 = 0.0;
    double overall() const { return (task1 + task2 + task3) / 3.0; }
};

struct TrainReport {
    struct BatchRow {
        int epoch;
        int batch;
        double lr;
        double loss1, loss2, loss3, total;
        double running_avg; // cumulative mean of the instant loss
    };
    struct EpochRow {
        int epoch;
        double lr;
        double mean_loss;
        Accuracy acc;
    };
    std::vector<BatchRow> batch_rows;
    std::vector<EpochRow> epoch_rows;
    std::vector<double> lr_trace; // one entry per epoch
};

template <typename T>
BeamSelection predict_logits_argmax(const MtlModel<T> &model, const TaskLogits<T> &logits,
                                    int sample /* within batch */)
{
    auto argmax_group = [](const TensorPtr<T> &t, std::size_t row) {
        const std::size_t cols = t->shape.back();
        const T *p = t->v.data() + row * cols;
        std::size_t best = 0;
        for (std::size_t c = 1; c < cols; ++c)
            if (p[c] > p[best])
                best = c;
        return static_cast<std::uint32_t>(best);
    };
    const SystemConfig &cfg = model.cfg;
    BeamSelection sel;
    for (int k = 0; k < cfg.k; ++k)
        sel.f_idx.push_back(argmax_group(logits.task1, static_cast<std::size_t>(sample) * cfg.k + k));
    for (int m = 0; m < cfg.m_s; ++m)
        sel.s_idx.push_back(argmax_group(logits.task2, static_cast<std::size_t>(sample) * cfg.m_s + m));
    for (int n = 0; n < cfg.n_s; ++n)
        sel.w_idx.push_back(argmax_group(logits.task3, static_cast<std::size_t>(sample) * cfg.n_s + n));
    return sel;
}

// Beam prediction for one channel realization (evaluation mode).
template <typename T>
BeamSelection predict_selection(const MtlModel<T> &model, const ChannelSet &ch)
{
    Batch b;
    b.batch_size = 1;
    b.planes = channel_to_planes(ch);
    b.labels.assign(static_cast<std::size_t>(model.cfg.k) + model.cfg.m_s + model.cfg.n_s, 0);
    Tape<T> tape;
    ForwardCtx ctx; // eval mode
    auto logits = forward(tape, model, b, ctx);
    return predict_logits_argmax(model, logits, 0);
}

// Eq.-style validation: batch size 1, dropout off, accuracy averaged over
// samples and outputs per task.
template <typename T>
Accuracy validate(const MtlModel<T> &model, const BeamDataset &ds,
                  const std::vector<std::uint32_t> &split)
{
    const SystemConfig &cfg = model.cfg;
    std::size_t hit1 = 0, hit2 = 0, hit3 = 0;
    auto batches = iterate_batches(ds, split, 1, std::nullopt);
    for (const Batch &b : batches) {
        Tape<T> tape;
        ForwardCtx ctx;
        auto logits = forward(tape, model, b, ctx);
        BeamSelection sel = predict_logits_argmax(model, logits, 0);
        auto labels = split_labels(cfg, b);
        for (int k = 0; k < cfg.k; ++k)
            hit1 += sel.f_idx[k] == labels.task1[k];
        for (int m = 0; m < cfg.m_s; ++m)
            hit2 += sel.s_idx[m] == labels.task2[m];
        for (int n = 0; n < cfg.n_s; ++n)
            hit3 += sel.w_idx[n] == labels.task3[n];
    }
    const double n = static_cast<double>(batches.size());
    Accuracy acc;
    if (!batches.empty()) {
        acc.task1 = static_cast<double>(hit1) / (n * cfg.k);
        acc.task2 = static_cast<double>(hit2) / (n * cfg.m_s);
        acc.task3 = static_cast<double>(hit3) / (n * cfg.n_s);
    }
    return acc;
}

// Full training loop: per-epoch shuffling, Adam with step-decay learning
// rate, per-batch loss rows and per-epoch validation accuracy. Aborts on a
// non-finite loss.
template <typename T>
TrainReport train(MtlModel<T> &model, const BeamDataset &ds, const TrainConfig &tc)
{
    tc.validate();
    if (ds.train_idx.empty())
        throw std::invalid_argument("train: dataset has no training split");

    TrainReport report;
    Adam<T> opt(model.parameters(), tc.beta1, tc.beta2, tc.adam_eps);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    std::uint64_t step = 0;

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        const double lr = tc.lr_at_epoch(epoch);
        report.lr_trace.push_back(lr);
        auto batches = iterate_batches(ds, ds.train_idx, tc.batch_size,
                                       derive_seed(tc.seed, 0x10000u + epoch));
        double epoch_sum = 0.0;
        int batch_no = 0;
        for (const Batch &b : batches) {
            Tape<T> tape;
            ForwardCtx ctx;
            ctx.training = true;
            ctx.dropout_rate = tc.dropout;
            ctx.dropout_seed = derive_seed(tc.seed, 0x20000u + step);
            auto loss = total_loss(tape, model, b, ctx);
            const double lv = loss.value();
            if (!std::isfinite(lv))
                throw std::runtime_error("training diverged: non-finite loss at epoch " +
                                         std::to_string(epoch) + " batch " +
                                         std::to_string(batch_no));
            tape.backward(loss.total);
            opt.step(lr);

            loss_sum += lv;
            ++loss_count;
            epoch_sum += lv;
            report.batch_rows.push_back({epoch, batch_no, lr, loss.task1, loss.task2,
                                         loss.task3, lv, loss_sum / loss_count});
            ++batch_no;
            ++step;
        }

        TrainReport::EpochRow row;
        row.epoch = epoch;
        row.lr = lr;
        row.mean_loss = batch_no ? epoch_sum / batch_no : 0.0;
        if (!ds.val_idx.empty())
            row.acc = validate(model, ds, ds.val_idx);
        report.epoch_rows.push_back(row);
    }
    return report;
}

// ------------------------------------------------------------ checkpoints
// "RBLM" file: magic, u64 header length, sorted key=value text, then every
// parameter tensor as raw 32-bit floats in declaration order.

template <typename T>
void save_checkpoint(const MtlModel<T> &model, const std::string &path, int epoch = 0);

template <typename T>
MtlModel<T> load_checkpoint(const std::string &path, int *epoch_out = nullptr);

} // namespace risbeam::nn

#endif
