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

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

using namespace risbeam;

namespace {

// shared flags: --config, --seed, --threads, --budget, --set section.key=value
struct Common {
    std::string config_path;
    std::vector<std::string> overrides;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<std::uint64_t> budget;

    void attach(CLI::App *app)
    {
        app->add_option("--config", config_path, "run configuration file");
        app->add_option("--set", overrides, "override a config key, section.key=value")
            ->take_all();
        app->add_option("--seed", seed, "run seed");
        app->add_option("--threads", threads, "worker cap (0 = library default)");
        app->add_option("--budget", budget, "search candidate budget");
    }

    RunConfig resolve() const
    {
        RunConfig cfg;
        if (!config_path.empty())
            cfg = RunConfig::from_file(config_path);
        for (const std::string &ov : overrides) {
            std::size_t eq = ov.find('=');
            if (eq == std::string::npos)
                throw config_error("--set expects section.key=value, got '" + ov + "'");
            cfg.set(ov.substr(0, eq), ov.substr(eq + 1));
        }
        if (seed) {
            cfg.seed = *seed;
            cfg.train.seed = *seed;
        }
        if (threads)
            cfg.threads = *threads;
        if (budget)
            cfg.budget = *budget;
        cfg.validate();
        return cfg;
    }
};

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"risbeam: RIS-assisted THz MU-MIMO beam-training workbench"};
    app.require_subcommand(1);

    Common c_gen, c_search, c_train, c_eval, c_cplx;

    auto *gen = app.add_subcommand("gen-dataset", "generate a labeled beam-selection dataset");
    std::string gen_out = "dataset.rbl";
    c_gen.attach(gen);
    gen->add_option("--out", gen_out, "output dataset path")->required();

    auto *search = app.add_subcommand("search", "run a beam search over channel realizations");
    std::string search_alg = "ias", search_dataset, search_out = "search.csv";
    int search_instances = 10;
    c_search.attach(search);
    search->add_option("--algorithm", search_alg, "es | ias | random");
    search->add_option("--dataset", search_dataset, "reuse channels of this dataset");
    search->add_option("--instances", search_instances, "fresh instances when no dataset given");
    search->add_option("--out", search_out, "output CSV")->required();

    auto *train = app.add_subcommand("train", "train the multi-task beam classifier");
    std::string train_dataset, train_ckpt = "model.rblm", train_report = "train.csv";
    c_train.attach(train);
    train->add_option("--dataset", train_dataset, "input dataset")->required();
    train->add_option("--checkpoint-out", train_ckpt, "output checkpoint path");
    train->add_option("--report", train_report, "training report CSV");

    auto *eval = app.add_subcommand("eval", "evaluate a checkpoint against the search baselines");
    std::string eval_dataset, eval_ckpt, eval_out = "eval.csv";
    bool eval_no_es = false;
    c_eval.attach(eval);
    eval->add_option("--dataset", eval_dataset, "input dataset")->required();
    eval->add_option("--checkpoint", eval_ckpt, "trained model checkpoint")->required();
    eval->add_option("--out", eval_out, "output CSV");
    eval->add_flag("--no-es", eval_no_es, "skip the exhaustive-search column");

    auto *cplx = app.add_subcommand("complexity", "multiplication counts per scheme vs M");
    std::vector<int> cplx_m{16, 32, 64, 128};
    std::string cplx_out = "complexity.csv";
    c_cplx.attach(cplx);
    cplx->add_option("--m-list", cplx_m, "RIS element counts to sweep");
    cplx->add_option("--out", cplx_out, "output CSV");

    auto *bwise = app.add_subcommand("blockwise-demo", "alternating-optimization trace");
    cmd::BlockwiseOptions bopt;
    std::string bwise_out = "blockwise.csv";
    bwise->add_option("--v", bopt.v, "sample count");
    bwise->add_option("--r", bopt.r, "input width");
    bwise->add_option("--n", bopt.n, "shared weight columns");
    bwise->add_option("--q", bopt.q, "task weight rows");
    bwise->add_option("--d", bopt.d, "task weight columns");
    bwise->add_option("--p", bopt.p, "target width");
    bwise->add_option("--tasks", bopt.tasks, "task count");
    bwise->add_option("--rho1", bopt.rho1, "shared penalty");
    bwise->add_option("--rho2", bopt.rho2, "task penalty");
    bwise->add_option("--max-iter", bopt.max_iter, "iteration cap");
    bwise->add_option("--tol", bopt.tol, "objective-decrease stop");
    bwise->add_option("--seed", bopt.seed, "problem seed");
    bwise->add_option("--out", bwise_out, "output CSV");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            cmd::gen_dataset(c_gen.resolve(), gen_out);
        else if (search->parsed())
            cmd::search(c_search.resolve(), search_alg, search_dataset, search_instances,
                        search_out);
        else if (train->parsed())
            cmd::train(c_train.resolve(), train_dataset, train_ckpt, train_report);
        else if (eval->parsed()) {
            auto sum = cmd::eval(c_eval.resolve(), eval_dataset, eval_ckpt, eval_out, !eval_no_es);
            std::cout << "accuracy overall " << sum.acc_overall << "; mean rates mtl "
                      << sum.mean_mtl << " ias " << sum.mean_ias << " random " << sum.mean_random
                      << "\n";
        } else if (cplx->parsed())
            cmd::complexity(c_cplx.resolve(), cplx_m, cplx_out);
        else if (bwise->parsed())
            cmd::blockwise_demo(bopt, bwise_out);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
