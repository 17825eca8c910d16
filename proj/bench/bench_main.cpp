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
// Times the OpenMP kernels against their serial reference implementations.
// The reference paths are the same code the tests use as oracles, so this
// doubles as a sanity check that both agree on the sampled instances.

#include <chrono>
#include <cstdio>

#include "risbeam/mtlnet.hpp"
#include "risbeam/reference.hpp"

using namespace risbeam;

namespace {

double seconds(std::function<void()> fn, int reps)
{
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i)
        fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char *name, double ref_s, double opt_s)
{
    std::printf("%-34s %12.6f s %12.6f s %8.2fx\n", name, ref_s, opt_s,
                ref_s / (opt_s > 0 ? opt_s : 1e-12));
}

} // namespace

int main()
{
    SystemConfig cfg; // desk-scale defaults: N_r=16, M=16, K=2
    GainModel gm;
    auto cb = build_codebooks(cfg, 8, 8, 8);
    ChannelSet ch = sample_channel_set(cfg, gm, 3, 3, 42);

    std::printf("%-34s %14s %14s %9s\n", "kernel", "serial ref", "parallel", "speedup");

    // exhaustive sweep: six-loop dense oracle vs cached parallel sweep
    {
        double ref_s = seconds([&]() { ref::exhaustive_search_sixloop(ch, cb, cfg); }, 3);
        double opt_s = seconds([&]() { exhaustive_search(ch, cb, cfg); }, 3);
        auto a = ref::exhaustive_search_sixloop(ch, cb, cfg);
        auto b = exhaustive_search(ch, cb, cfg);
        if (!(a.best_selection == b.best_selection))
            std::printf("!! exhaustive argmax disagrees with the reference\n");
        report("exhaustive_search (8^6 cands)", ref_s, opt_s);
    }

    // equivalent channel: dense chain vs structured assembly
    {
        BeamSelection sel{{1, 2}, {3, 4}, {5, 6}};
        double ref_s = seconds([&]() { ref::equivalent_channel_dense(ch, sel, cb, cfg); }, 2000);
        double opt_s = seconds([&]() { equivalent_channel(ch, sel, cb, cfg); }, 2000);
        report("equivalent_channel", ref_s, opt_s);
    }

    // conv2d forward: naive serial loops vs the gather-parallel kernel
    {
        const int b = 16, ci = 2, h = 16, w = 16, co = 8, ks = 3;
        std::vector<float> x(b * ci * h * w), kern(co * ci * ks * ks), bias(co);
        Rng rng(7);
        for (auto &v : x)
            v = static_cast<float>(rng.normal());
        for (auto &v : kern)
            v = static_cast<float>(rng.normal());
        double ref_s = seconds(
            [&]() { ref::conv2d_naive<float>(x, b, ci, h, w, kern, co, ks, ks, bias); }, 50);
        double opt_s = seconds(
            [&]() {
                nn::Tape<float> tape;
                auto xt = nn::make_tensor<float>({b, ci, h, w});
                xt->v = x;
                auto kt = nn::make_tensor<float>({co, ci, ks, ks});
                kt->v = kern;
                auto bt = nn::make_tensor<float>({co});
                bt->v = bias;
                nn::conv2d(tape, xt, kt, bt);
            },
            50);
        report("conv2d fwd 16x2x16x16 -> 8", ref_s, opt_s);
    }

    // dataset labeling throughput, 1 thread vs all
    {
        auto run = [&](int threads) {
            set_max_threads(threads);
            generate_dataset(cfg, gm, cb, 3, 3, 64, 99, Labeler::ias, 10);
        };
        double one = seconds([&]() { run(1); }, 1);
        int hw = 0;
        {
            set_max_threads(16);
            hw = max_threads();
        }
        double many = seconds([&]() { run(hw); }, 1);
        report("generate_dataset (64 samples)", one, many);
    }

    return 0;
}
