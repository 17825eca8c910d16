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
// Subcommand implementations, shared by the CLI binary and the acceptance
// suite. All of them throw on invalid input; the CLI front end turns that
// into a nonzero exit status.

#ifndef RISBEAM_COMMANDS_HPP
#define RISBEAM_COMMANDS_HPP

#include "risbeam/runconfig.hpp"

namespace risbeam::cmd {

// Generates, labels, splits and writes a dataset (plus .meta.json sidecar).
void gen_dataset(const RunConfig &cfg, const std::string &out_path);

// Runs one search algorithm ("es", "ias" or "random") over channel
// realizations and writes one CSV row per instance. Channels come from the
// dataset's stored per-sample seeds when a dataset is given, otherwise from
// `instances` fresh seeds derived from the run seed.
void search(const RunConfig &cfg, const std::string &algorithm, const std::string &dataset_path,
            int instances, const std::string &out_csv);

// Trains the classifier on a dataset; writes checkpoint and report CSV.
void train(const RunConfig &cfg, const std::string &dataset_path,
           const std::string &checkpoint_out, const std::string &report_csv);

struct EvalSummary {
    double acc_task1 = 0.0, acc_task2 = 0.0, acc_task3 = 0.0, acc_overall = 0.0;
    double mean_mtl = 0.0, mean_ias = 0.0, mean_es = 0.0, mean_random = 0.0;
    int n_samples = 0;
};

// Per-sample sum rates of the trained model against the search baselines on
// the validation split, plus prediction accuracy. `with_es` controls the
// (expensive) exhaustive column.
EvalSummary eval(const RunConfig &cfg, const std::string &dataset_path,
                 const std::string &checkpoint_path, const std::string &out_csv,
                 bool with_es = true);

// Multiplication counts of every scheme swept over RIS element counts.
void complexity(const RunConfig &cfg, const std::vector<int> &m_list, const std::string &out_csv);

struct BlockwiseOptions {
    int v = 20, r = 6, n = 5, q = 4, d = 3, p = 2, tasks = 3;
    double rho1 = 0.1, rho2 = 0.1;
    int max_iter = 200;
    double tol = 1e-12;
    std::uint64_t seed = 1;
};

// Alternating-optimization trace on a random blockwise problem.
void blockwise_demo(const BlockwiseOptions &opt, const std::string &out_csv);

} // namespace risbeam::cmd

#endif
