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

#include "commands.hpp"

#include <iostream>

#include "risbeam/blockwise.hpp"
#include "risbeam/reference.hpp"

namespace risbeam::cmd {

namespace {

std::string join_idx(const std::vector<std::uint32_t> &v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i)
        s += (i ? "|" : "") + std::to_string(v[i]);
    return s;
}

void apply_threads(const RunConfig &cfg)
{
    if (cfg.threads > 0)
        set_max_threads(cfg.threads);
}

} // namespace

void gen_dataset(const RunConfig &cfg, const std::string &out_path)
{
    cfg.validate();
    apply_threads(cfg);
    auto cb = build_codebooks(cfg.system, cfg.size_f, cfg.size_s, cfg.size_w);
    BeamDataset ds = generate_dataset(cfg.system, cfg.gain, cb, cfg.l_b, cfg.l_u, cfg.n_samples,
                                      cfg.seed, cfg.labeler_enum(), cfg.ias_t_max,
                                      cfg.search_budget());
    split_dataset(ds, cfg.train_fraction, derive_seed(cfg.seed, 0x5017));
    save_dataset(ds, out_path);
    write_dataset_meta(ds, out_path);
    std::cout << "wrote " << ds.samples.size() << " samples (" << ds.train_idx.size()
              << " train / " << ds.val_idx.size() << " val) to " << out_path << "\n";
}

void search(const RunConfig &cfg, const std::string &algorithm, const std::string &dataset_path,
            int instances, const std::string &out_csv)
{
    cfg.validate();
    apply_threads(cfg);
    if (algorithm != "es" && algorithm != "ias" && algorithm != "random")
        throw config_error("algorithm must be one of es, ias, random");

    SystemConfig sys = cfg.system;
    GainModel gm = cfg.gain;
    int l_b = cfg.l_b, l_u = cfg.l_u;
    CodebookTriple cb;
    std::vector<std::uint64_t> seeds;
    std::optional<BeamDataset> ds;
    if (!dataset_path.empty()) {
        ds = load_dataset(dataset_path);
        sys = ds->header.cfg;
        gm = ds->header.gm;
        l_b = ds->header.l_b;
        l_u = ds->header.l_u;
        cb = ds->codebooks;
        for (const Sample &s : ds->samples)
            seeds.push_back(s.sample_seed);
    } else {
        if (instances < 1)
            throw config_error("instance count must be >= 1");
        cb = build_codebooks(sys, cfg.size_f, cfg.size_s, cfg.size_w);
        for (int i = 0; i < instances; ++i)
            seeds.push_back(derive_seed(cfg.seed, static_cast<std::uint64_t>(i)));
    }

    CsvWriter csv(out_csv);
    csv.config_comments(cfg);
    csv.row({"instance", "algorithm", "rate", "candidates", "iterations", "converged",
             "multiply_count", "f_idx", "s_idx", "w_idx"});
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        ChannelSet ch = sample_channel_set(sys, gm, l_b, l_u, seeds[i]);
        SearchReport rep;
        if (algorithm == "es")
            rep = exhaustive_search(ch, cb, sys, cfg.search_budget());
        else if (algorithm == "ias")
            rep = ias_search(ch, cb, sys, cfg.ias_t_max, std::nullopt, seeds[i],
                             cfg.search_budget());
        else
            rep = random_baseline(ch, cb, sys, seeds[i]);
        csv.row({std::to_string(i), algorithm, CsvWriter::num(rep.best_rate),
                 std::to_string(rep.candidates_evaluated), std::to_string(rep.iterations),
                 rep.converged ? "1" : "0", std::to_string(rep.multiply_count),
                 join_idx(rep.best_selection.f_idx), join_idx(rep.best_selection.s_idx),
                 join_idx(rep.best_selection.w_idx)});
    }
}

void train(const RunConfig &cfg, const std::string &dataset_path,
           const std::string &checkpoint_out, const std::string &report_csv)
{
    cfg.validate();
    apply_threads(cfg);
    BeamDataset ds = load_dataset(dataset_path);

    auto model = nn::make_model<float>(ds.header.cfg, cfg.model, ds.header.size_f,
                                       ds.header.size_s, ds.header.size_w,
                                       derive_seed(cfg.train.seed, 0x11u));
    nn::TrainReport report = nn::train(model, ds, cfg.train);
    nn::save_checkpoint(model, checkpoint_out, cfg.train.epochs);

    CsvWriter csv(report_csv);
    csv.config_comments(cfg);
    csv.row({"kind", "epoch", "batch", "lr", "loss_task1", "loss_task2", "loss_task3",
             "loss_total", "running_avg", "acc_task1", "acc_task2", "acc_task3", "acc_overall"});
    std::size_t next_epoch_row = 0;
    for (std::size_t i = 0; i < report.batch_rows.size(); ++i) {
        const auto &r = report.batch_rows[i];
        csv.row({"batch", std::to_string(r.epoch), std::to_string(r.batch), CsvWriter::num(r.lr),
                 CsvWriter::num(r.loss1), CsvWriter::num(r.loss2), CsvWriter::num(r.loss3),
                 CsvWriter::num(r.total), CsvWriter::num(r.running_avg), "", "", "", ""});
        bool epoch_done = i + 1 == report.batch_rows.size() ||
                          report.batch_rows[i + 1].epoch != r.epoch;
        if (epoch_done && next_epoch_row < report.epoch_rows.size()) {
            const auto &e = report.epoch_rows[next_epoch_row++];
            csv.row({"epoch", std::to_string(e.epoch), "-1", CsvWriter::num(e.lr), "", "", "",
                     CsvWriter::num(e.mean_loss), "", CsvWriter::num(e.acc.task1),
                     CsvWriter::num(e.acc.task2), CsvWriter::num(e.acc.task3),
                     CsvWriter::num(e.acc.overall())});
        }
    }
    std::cout << "trained " << cfg.train.epochs << " epochs; checkpoint " << checkpoint_out
              << "\n";
}

EvalSummary eval(const RunConfig &cfg, const std::string &dataset_path,
                 const std::string &checkpoint_path, const std::string &out_csv, bool with_es)
{
    cfg.validate();
    apply_threads(cfg);
    BeamDataset ds = load_dataset(dataset_path);
    auto model = nn::load_checkpoint<float>(checkpoint_path);
    if (model.cfg.n_r != ds.header.cfg.n_r || model.cfg.m != ds.header.cfg.m ||
        model.cfg.n_t != ds.header.cfg.n_t || model.cfg.k != ds.header.cfg.k ||
        model.size_f != ds.header.size_f || model.size_s != ds.header.size_s ||
        model.size_w != ds.header.size_w)
        throw config_error("checkpoint dimensions do not match the dataset");
    if (ds.val_idx.empty())
        throw config_error("dataset has no validation split");

    const SystemConfig &sys = ds.header.cfg;
    const int n = static_cast<int>(ds.val_idx.size());
    struct Row {
        double mtl, ias, es, random;
        int hit1, hit2, hit3;
    };
    std::vector<Row> rows(n);

#pragma omp parallel for schedule(dynamic, 4) num_threads(max_threads())
    for (int i = 0; i < n; ++i) {
        const Sample &s = ds.samples[ds.val_idx[i]];
        ChannelSet ch = sample_channel(ds.header, s.sample_seed);

        // prediction sees the stored 32-bit planes, rates use the exact channel
        Batch b;
        b.batch_size = 1;
        b.planes = s.planes;
        b.labels = s.labels;
        nn::Tape<float> tape;
        nn::ForwardCtx ctx;
        auto logits = nn::forward(tape, model, b, ctx);
        BeamSelection mtl_sel = nn::predict_logits_argmax(model, logits, 0);

        SelectionEvaluator ev(ch, ds.codebooks, sys);
        Row &r = rows[i];
        r.mtl = ev.rate(mtl_sel);
        BeamSelection ias_sel = labels_to_selection(ds.header, s.labels);
        r.ias = ev.rate(ias_sel);
        r.es = 0.0;
        if (with_es)
            r.es = exhaustive_search(ch, ds.codebooks, sys, cfg.search_budget()).best_rate;
        Rng rng(derive_seed(s.sample_seed, 0xBA5Eu));
        r.random = ev.rate(random_selection(ds.codebooks, sys, rng));

        r.hit1 = r.hit2 = r.hit3 = 0;
        for (int k = 0; k < sys.k; ++k)
            r.hit1 += mtl_sel.f_idx[k] == ias_sel.f_idx[k];
        for (int m = 0; m < sys.m_s; ++m)
            r.hit2 += mtl_sel.s_idx[m] == ias_sel.s_idx[m];
        for (int w = 0; w < sys.n_s; ++w)
            r.hit3 += mtl_sel.w_idx[w] == ias_sel.w_idx[w];
    }

    EvalSummary sum;
    sum.n_samples = n;
    long hit1 = 0, hit2 = 0, hit3 = 0;
    for (const Row &r : rows) {
        sum.mean_mtl += r.mtl;
        sum.mean_ias += r.ias;
        sum.mean_es += r.es;
        sum.mean_random += r.random;
        hit1 += r.hit1;
        hit2 += r.hit2;
        hit3 += r.hit3;
    }
    sum.mean_mtl /= n;
    sum.mean_ias /= n;
    sum.mean_es /= n;
    sum.mean_random /= n;
    sum.acc_task1 = static_cast<double>(hit1) / (static_cast<double>(n) * sys.k);
    sum.acc_task2 = static_cast<double>(hit2) / (static_cast<double>(n) * sys.m_s);
    sum.acc_task3 = static_cast<double>(hit3) / (static_cast<double>(n) * sys.n_s);
    sum.acc_overall = (sum.acc_task1 + sum.acc_task2 + sum.acc_task3) / 3.0;

    CsvWriter csv(out_csv);
    csv.config_comments(cfg);
    csv.comment("acc_task1=" + CsvWriter::num(sum.acc_task1));
    csv.comment("acc_task2=" + CsvWriter::num(sum.acc_task2));
    csv.comment("acc_task3=" + CsvWriter::num(sum.acc_task3));
    csv.comment("acc_overall=" + CsvWriter::num(sum.acc_overall));
    csv.comment("mean_rate_mtl=" + CsvWriter::num(sum.mean_mtl));
    csv.comment("mean_rate_ias=" + CsvWriter::num(sum.mean_ias));
    if (with_es)
        csv.comment("mean_rate_es=" + CsvWriter::num(sum.mean_es));
    csv.comment("mean_rate_random=" + CsvWriter::num(sum.mean_random));
    if (with_es)
        csv.row({"sample", "rate_mtl", "rate_ias", "rate_es", "rate_random"});
    else
        csv.row({"sample", "rate_mtl", "rate_ias", "rate_random"});
    for (int i = 0; i < n; ++i) {
        const Row &r = rows[i];
        std::vector<std::string> cells{std::to_string(ds.val_idx[i]), CsvWriter::num(r.mtl),
                                       CsvWriter::num(r.ias)};
        if (with_es)
            cells.push_back(CsvWriter::num(r.es));
        cells.push_back(CsvWriter::num(r.random));
        csv.row(cells);
    }
    return sum;
}

void complexity(const RunConfig &cfg, const std::vector<int> &m_list, const std::string &out_csv)
{
    cfg.validate();
    if (m_list.empty())
        throw config_error("complexity sweep needs at least one M value");

    CodebookSizes sizes{static_cast<std::uint64_t>(cfg.size_f),
                        static_cast<std::uint64_t>(cfg.size_s),
                        static_cast<std::uint64_t>(cfg.size_w)};
    NetCostDims net;
    net.conv_kernel = cfg.model.conv_kernel;
    net.conv_planes_hidden = cfg.model.conv_hidden;
    net.head_width = cfg.model.head_width;

    CsvWriter csv(out_csv);
    csv.config_comments(cfg);
    csv.row({"m", "count_es", "count_ias", "count_mtl"});
    for (int m : m_list) {
        SystemConfig sys = cfg.system;
        if (m % sys.m_s != 0)
            throw config_error("swept M must be divisible by M_s");
        sys.m = m;
        sys.m_b = m / sys.m_s;
        sys.validate();
        csv.row({std::to_string(m),
                 std::to_string(multiply_cost(sys, Algorithm::es, sizes, cfg.ias_t_max, net)),
                 std::to_string(multiply_cost(sys, Algorithm::ias, sizes, cfg.ias_t_max, net)),
                 std::to_string(multiply_cost(sys, Algorithm::mtl, sizes, cfg.ias_t_max, net))});
    }
}

void blockwise_demo(const BlockwiseOptions &opt, const std::string &out_csv)
{
    bw::ProblemDims dims;
    dims.v = opt.v;
    dims.r = opt.r;
    dims.n = opt.n;
    dims.q = opt.q;
    dims.d.assign(opt.tasks, opt.d);
    dims.p.assign(opt.tasks, opt.p);
    auto prob = bw::make_random_problem<double>(dims, opt.rho1, opt.rho2, opt.seed);
    auto st = bw::alternate(prob, derive_seed(opt.seed, 0xA0u), opt.max_iter, opt.tol);

    CsvWriter csv(out_csv);
    csv.comment("blockwise AO trace; v=" + std::to_string(opt.v) + " r=" + std::to_string(opt.r) +
                " n=" + std::to_string(opt.n) + " q=" + std::to_string(opt.q) +
                " d=" + std::to_string(opt.d) + " p=" + std::to_string(opt.p) +
                " tasks=" + std::to_string(opt.tasks));
    csv.comment("rho1=" + CsvWriter::num(opt.rho1) + " rho2=" + CsvWriter::num(opt.rho2) +
                " seed=" + std::to_string(opt.seed));
    csv.comment("lipschitz_g=" + CsvWriter::num(st.lipschitz_g) +
                " lipschitz_q=" + CsvWriter::num(st.lipschitz_q) +
                " converged=" + std::string(st.converged ? "1" : "0"));
    csv.row({"iter", "objective", "grad_norm"});
    csv.row({"0", CsvWriter::num(st.objective_trace[0]), ""});
    for (int i = 1; i <= st.iterations; ++i)
        csv.row({std::to_string(i), CsvWriter::num(st.objective_trace[i]),
                 CsvWriter::num(st.grad_norm_trace[i - 1])});
}

} // namespace risbeam::cmd
