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

#include "risbeam/dataset.hpp"

#include <atomic>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little, "file format assumes little-endian");

namespace risbeam {

std::size_t DatasetHeader::floats_per_sample() const
{
    return 2u * cfg.n_r * cfg.m + static_cast<std::size_t>(cfg.k) * 2u * cfg.m * cfg.n_t;
}

std::size_t DatasetHeader::labels_per_sample() const
{
    return static_cast<std::size_t>(cfg.k) + cfg.m_s + cfg.n_s;
}

void append_planes(const CMat &m, std::vector<float> &out)
{
    for (std::size_t i = 0; i < m.size(); ++i)
        out.push_back(static_cast<float>(m.data()[i].real()));
    for (std::size_t i = 0; i < m.size(); ++i)
        out.push_back(static_cast<float>(m.data()[i].imag()));
}

CMat planes_to_cmat(const float *planes, int rows, int cols)
{
    CMat m(rows, cols);
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        m.data()[i] = cxd(planes[i], planes[n + i]);
    return m;
}

std::vector<float> channel_to_planes(const ChannelSet &ch)
{
    std::vector<float> planes;
    planes.reserve(2 * ch.h_r.size() + ch.h_users.size() * 2 * ch.h_users[0].size());
    append_planes(ch.h_r, planes);
    for (const CMat &h : ch.h_users)
        append_planes(h, planes);
    return planes;
}

ChannelSet sample_channel(const DatasetHeader &h, std::uint64_t sample_seed)
{
    return sample_channel_set(h.cfg, h.gm, h.l_b, h.l_u, sample_seed);
}

BeamSelection labels_to_selection(const DatasetHeader &h, const std::vector<std::uint32_t> &labels)
{
    if (labels.size() != h.labels_per_sample())
        throw std::invalid_argument("label vector length does not match the configuration");
    BeamSelection sel;
    sel.f_idx.assign(labels.begin(), labels.begin() + h.cfg.k);
    sel.s_idx.assign(labels.begin() + h.cfg.k, labels.begin() + h.cfg.k + h.cfg.m_s);
    sel.w_idx.assign(labels.begin() + h.cfg.k + h.cfg.m_s, labels.end());
    return sel;
}

BeamDataset generate_dataset(const SystemConfig &cfg, const GainModel &gm,
                             const CodebookTriple &cb, int l_b, int l_u, std::uint32_t n_samples,
                             std::uint64_t seed, Labeler labeler, int ias_t_max,
                             const SearchBudget &budget)
{
    cfg.validate();
    gm.validate();
    if (n_samples < 1)
        throw std::invalid_argument("generate_dataset: need at least one sample");

    BeamDataset ds;
    ds.header.cfg = cfg;
    ds.header.gm = gm;
    ds.header.l_b = l_b;
    ds.header.l_u = l_u;
    ds.header.size_f = static_cast<int>(cb.f.size());
    ds.header.size_s = static_cast<int>(cb.s.size());
    ds.header.size_w = static_cast<int>(cb.w.size());
    ds.header.seed = seed;
    ds.header.n_samples = n_samples;
    ds.header.labeler = labeler;
    ds.header.ias_t_max = ias_t_max;
    ds.header.codebook_hash = codebook_hash(cb);
    ds.codebooks = cb;
    ds.samples.resize(n_samples);

    // Per-sample seeds make each iteration self-contained, so the schedule
    // cannot change the result. Budget refusals abort with the offending
    // sample index.
    std::atomic<std::int64_t> bad_sample{-1};
    std::string bad_message;
#pragma omp parallel for schedule(dynamic, 8) num_threads(max_threads())
    for (std::int64_t t = 0; t < static_cast<std::int64_t>(n_samples); ++t) {
        if (bad_sample.load(std::memory_order_relaxed) >= 0)
            continue;
        try {
            std::uint64_t ss = derive_seed(seed, static_cast<std::uint64_t>(t));
            ChannelSet ch = sample_channel_set(cfg, gm, l_b, l_u, ss);
            BeamSelection sel;
            if (labeler == Labeler::ias)
                sel = ias_search(ch, cb, cfg, ias_t_max, std::nullopt, ss, budget).best_selection;
            else
                sel = exhaustive_search(ch, cb, cfg, budget).best_selection;
            Sample &s = ds.samples[t];
            s.sample_seed = ss;
            s.planes = channel_to_planes(ch);
            s.labels.clear();
            s.labels.insert(s.labels.end(), sel.f_idx.begin(), sel.f_idx.end());
            s.labels.insert(s.labels.end(), sel.s_idx.begin(), sel.s_idx.end());
            s.labels.insert(s.labels.end(), sel.w_idx.begin(), sel.w_idx.end());
        } catch (const std::exception &e) {
#pragma omp critical
            {
                std::int64_t prev = bad_sample.load(std::memory_order_relaxed);
                if (prev < 0 || t < prev) {
                    bad_sample.store(t, std::memory_order_relaxed);
                    bad_message = e.what();
                }
            }
        }
    }
    if (bad_sample.load() >= 0)
        throw budget_error("labeling sample " + std::to_string(bad_sample.load()) +
                               " failed: " + bad_message,
                           0, budget.max_candidates);
    return ds;
}

void split_dataset(BeamDataset &ds, double train_fraction, std::uint64_t seed)
{
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw std::invalid_argument("train fraction must be in (0, 1)");
    const std::uint32_t n = static_cast<std::uint32_t>(ds.samples.size());
    const std::uint32_t n_train = static_cast<std::uint32_t>(std::llround(train_fraction * n));
    if (n_train < 1 || n_train >= n)
        throw std::invalid_argument("train fraction yields an empty split side");

    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i)
        idx[i] = i;
    Rng rng(seed);
    for (std::uint32_t i = n; i > 1; --i)
        std::swap(idx[i - 1], idx[rng.uniform_index(i)]);

    ds.train_idx.assign(idx.begin(), idx.begin() + n_train);
    ds.val_idx.assign(idx.begin() + n_train, idx.end());
    std::sort(ds.train_idx.begin(), ds.train_idx.end());
    std::sort(ds.val_idx.begin(), ds.val_idx.end());
}

std::vector<Batch> iterate_batches(const BeamDataset &ds,
                                   const std::vector<std::uint32_t> &split, int batch_size,
                                   std::optional<std::uint64_t> shuffle_seed)
{
    if (batch_size < 1)
        throw std::invalid_argument("batch size must be >= 1");
    std::vector<std::uint32_t> order = split;
    if (shuffle_seed) {
        Rng rng(*shuffle_seed);
        for (std::size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.uniform_index(i)]);
    }

    std::vector<Batch> batches;
    const std::size_t fps = ds.header.floats_per_sample();
    const std::size_t lps = ds.header.labels_per_sample();
    for (std::size_t at = 0; at < order.size(); at += batch_size) {
        std::size_t end = std::min(order.size(), at + batch_size);
        Batch b;
        b.batch_size = static_cast<int>(end - at);
        b.planes.reserve(b.batch_size * fps);
        b.labels.reserve(b.batch_size * lps);
        for (std::size_t i = at; i < end; ++i) {
            const Sample &s = ds.samples.at(order[i]);
            b.sample_ids.push_back(order[i]);
            b.planes.insert(b.planes.end(), s.planes.begin(), s.planes.end());
            b.labels.insert(b.labels.end(), s.labels.begin(), s.labels.end());
        }
        batches.push_back(std::move(b));
    }
    return batches;
}

namespace {

std::string labeler_name(Labeler l) { return l == Labeler::ias ? "ias" : "es"; }

std::string header_text(const DatasetHeader &h)
{
    std::map<std::string, std::string> kv;
    kv["format"] = "1";
    kv["cfg.n_r"] = std::to_string(h.cfg.n_r);
    kv["cfg.n_s"] = std::to_string(h.cfg.n_s);
    kv["cfg.n_b"] = std::to_string(h.cfg.n_b);
    kv["cfg.m"] = std::to_string(h.cfg.m);
    kv["cfg.m_s"] = std::to_string(h.cfg.m_s);
    kv["cfg.m_b"] = std::to_string(h.cfg.m_b);
    kv["cfg.n_t"] = std::to_string(h.cfg.n_t);
    kv["cfg.k"] = std::to_string(h.cfg.k);
    kv["cfg.p_dbm"] = format_double(h.cfg.p_dbm);
    kv["cfg.n0"] = format_double(h.cfg.n0);
    kv["cfg.carrier_freq_hz"] = format_double(h.cfg.carrier_freq_hz);
    kv["cfg.spacing_over_lambda"] = format_double(h.cfg.spacing_over_lambda);
    kv["cfg.reflect_amplitude"] = format_double(h.cfg.reflect_amplitude);
    kv["gm.absorption"] = format_double(h.gm.absorption);
    kv["gm.reflection"] = format_double(h.gm.reflection);
    kv["gm.d0"] = format_double(h.gm.d0);
    kv["gm.user_region_diameter"] = format_double(h.gm.user_region_diameter);
    kv["gm.los_present"] = h.gm.los_present ? "1" : "0";
    kv["gm.normalize"] = h.gm.normalize ? "1" : "0";
    kv["l_b"] = std::to_string(h.l_b);
    kv["l_u"] = std::to_string(h.l_u);
    kv["size_f"] = std::to_string(h.size_f);
    kv["size_s"] = std::to_string(h.size_s);
    kv["size_w"] = std::to_string(h.size_w);
    kv["seed"] = std::to_string(h.seed);
    kv["n_samples"] = std::to_string(h.n_samples);
    kv["labeler"] = labeler_name(h.labeler);
    kv["ias_t_max"] = std::to_string(h.ias_t_max);
    kv["codebook_hash"] = std::to_string(h.codebook_hash);

    std::string out;
    for (const auto &[k, v] : kv)
        out += k + "=" + v + "\n";
    return out;
}

DatasetHeader parse_header_text(const std::string &text)
{
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos)
            throw io_error("dataset header: missing newline");
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw io_error("dataset header: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }

    auto need = [&kv](const std::string &key) -> const std::string & {
        auto it = kv.find(key);
        if (it == kv.end())
            throw io_error("dataset header: missing key '" + key + "'");
        return it->second;
    };
    auto to_i = [](const std::string &s) { return std::stoi(s); };
    auto to_u64 = [](const std::string &s) { return std::stoull(s); };
    auto to_d = [](const std::string &s) { return std::strtod(s.c_str(), nullptr); };

    if (need("format") != "1")
        throw io_error("dataset header: unsupported format version");

    DatasetHeader h;
    h.cfg.n_r = to_i(need("cfg.n_r"));
    h.cfg.n_s = to_i(need("cfg.n_s"));
    h.cfg.n_b = to_i(need("cfg.n_b"));
    h.cfg.m = to_i(need("cfg.m"));
    h.cfg.m_s = to_i(need("cfg.m_s"));
    h.cfg.m_b = to_i(need("cfg.m_b"));
    h.cfg.n_t = to_i(need("cfg.n_t"));
    h.cfg.k = to_i(need("cfg.k"));
    h.cfg.p_dbm = to_d(need("cfg.p_dbm"));
    h.cfg.n0 = to_d(need("cfg.n0"));
    h.cfg.carrier_freq_hz = to_d(need("cfg.carrier_freq_hz"));
    h.cfg.spacing_over_lambda = to_d(need("cfg.spacing_over_lambda"));
    h.cfg.reflect_amplitude = to_d(need("cfg.reflect_amplitude"));
    h.gm.absorption = to_d(need("gm.absorption"));
    h.gm.reflection = to_d(need("gm.reflection"));
    h.gm.d0 = to_d(need("gm.d0"));
    h.gm.user_region_diameter = to_d(need("gm.user_region_diameter"));
    h.gm.los_present = need("gm.los_present") == "1";
    h.gm.normalize = need("gm.normalize") == "1";
    h.l_b = to_i(need("l_b"));
    h.l_u = to_i(need("l_u"));
    h.size_f = to_i(need("size_f"));
    h.size_s = to_i(need("size_s"));
    h.size_w = to_i(need("size_w"));
    h.seed = to_u64(need("seed"));
    h.n_samples = static_cast<std::uint32_t>(to_u64(need("n_samples")));
    const std::string &lab = need("labeler");
    if (lab == "ias")
        h.labeler = Labeler::ias;
    else if (lab == "es")
        h.labeler = Labeler::es;
    else
        throw io_error("dataset header: unknown labeler '" + lab + "'");
    h.ias_t_max = to_i(need("ias_t_max"));
    h.codebook_hash = to_u64(need("codebook_hash"));
    h.cfg.validate();
    h.gm.validate();
    return h;
}

template <typename T>
void write_raw(std::ofstream &os, const T *p, std::size_t n)
{
    os.write(reinterpret_cast<const char *>(p), static_cast<std::streamsize>(n * sizeof(T)));
}

template <typename T>
void read_raw(std::ifstream &is, T *p, std::size_t n)
{
    is.read(reinterpret_cast<char *>(p), static_cast<std::streamsize>(n * sizeof(T)));
    if (!is)
        throw io_error("dataset file truncated");
}

void write_codebook(std::ofstream &os, const std::vector<std::vector<cxd>> &book)
{
    std::uint32_t count = static_cast<std::uint32_t>(book.size());
    std::uint32_t dim = static_cast<std::uint32_t>(book.empty() ? 0 : book[0].size());
    write_raw(os, &count, 1);
    write_raw(os, &dim, 1);
    for (const auto &cw : book)
        write_raw(os, cw.data(), cw.size());
}

std::vector<std::vector<cxd>> read_codebook(std::ifstream &is)
{
    std::uint32_t count = 0, dim = 0;
    read_raw(is, &count, 1);
    read_raw(is, &dim, 1);
    std::vector<std::vector<cxd>> book(count, std::vector<cxd>(dim));
    for (auto &cw : book)
        read_raw(is, cw.data(), dim);
    return book;
}

} // namespace

void save_dataset(const BeamDataset &ds, const std::string &path)
{
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw io_error("cannot open '" + path + "' for writing");

    os.write("RBL1", 4);
    std::string head = header_text(ds.header);
    std::uint64_t len = head.size();
    write_raw(os, &len, 1);
    os.write(head.data(), static_cast<std::streamsize>(head.size()));

    write_codebook(os, ds.codebooks.f);
    write_codebook(os, ds.codebooks.s);
    write_codebook(os, ds.codebooks.w);

    std::uint32_t n = static_cast<std::uint32_t>(ds.samples.size());
    write_raw(os, &n, 1);
    for (const Sample &s : ds.samples) {
        write_raw(os, &s.sample_seed, 1);
        write_raw(os, s.planes.data(), s.planes.size());
        write_raw(os, s.labels.data(), s.labels.size());
    }

    std::uint32_t nt = static_cast<std::uint32_t>(ds.train_idx.size());
    write_raw(os, &nt, 1);
    write_raw(os, ds.train_idx.data(), ds.train_idx.size());
    std::uint32_t nv = static_cast<std::uint32_t>(ds.val_idx.size());
    write_raw(os, &nv, 1);
    write_raw(os, ds.val_idx.data(), ds.val_idx.size());
    if (!os)
        throw io_error("write to '" + path + "' failed");
}

BeamDataset load_dataset(const std::string &path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw io_error("cannot open '" + path + "'");

    char magic[4];
    read_raw(is, magic, 4);
    if (std::memcmp(magic, "RBL1", 4) != 0)
        throw io_error("'" + path + "' is not a beam dataset (bad magic)");

    std::uint64_t len = 0;
    read_raw(is, &len, 1);
    std::string head(len, '\0');
    read_raw(is, head.data(), len);

    BeamDataset ds;
    ds.header = parse_header_text(head);
    ds.codebooks.f = read_codebook(is);
    ds.codebooks.s = read_codebook(is);
    ds.codebooks.w = read_codebook(is);
    if (codebook_hash(ds.codebooks) != ds.header.codebook_hash)
        throw io_error("dataset codebook hash mismatch");
    if (static_cast<int>(ds.codebooks.f.size()) != ds.header.size_f ||
        static_cast<int>(ds.codebooks.s.size()) != ds.header.size_s ||
        static_cast<int>(ds.codebooks.w.size()) != ds.header.size_w)
        throw io_error("dataset codebook sizes disagree with header");

    std::uint32_t n = 0;
    read_raw(is, &n, 1);
    if (n != ds.header.n_samples)
        throw io_error("dataset sample count disagrees with header");
    const std::size_t fps = ds.header.floats_per_sample();
    const std::size_t lps = ds.header.labels_per_sample();
    ds.samples.resize(n);
    for (Sample &s : ds.samples) {
        read_raw(is, &s.sample_seed, 1);
        s.planes.resize(fps);
        read_raw(is, s.planes.data(), fps);
        s.labels.resize(lps);
        read_raw(is, s.labels.data(), lps);
        for (std::size_t j = 0; j < lps; ++j) {
            std::uint32_t bound = j < static_cast<std::size_t>(ds.header.cfg.k) ? ds.header.size_f
                                  : j < static_cast<std::size_t>(ds.header.cfg.k + ds.header.cfg.m_s)
                                      ? ds.header.size_s
                                      : ds.header.size_w;
            if (s.labels[j] >= bound)
                throw io_error("dataset label out of codebook bounds");
        }
    }

    std::uint32_t nt = 0;
    read_raw(is, &nt, 1);
    ds.train_idx.resize(nt);
    if (nt)
        read_raw(is, ds.train_idx.data(), nt);
    std::uint32_t nv = 0;
    read_raw(is, &nv, 1);
    ds.val_idx.resize(nv);
    if (nv)
        read_raw(is, ds.val_idx.data(), nv);
    return ds;
}

void write_dataset_meta(const BeamDataset &ds, const std::string &dataset_path)
{
    nlohmann::json j;
    const DatasetHeader &h = ds.header;
    j["system"] = {{"n_r", h.cfg.n_r}, {"n_s", h.cfg.n_s}, {"n_b", h.cfg.n_b},
                   {"m", h.cfg.m},     {"m_s", h.cfg.m_s}, {"m_b", h.cfg.m_b},
                   {"n_t", h.cfg.n_t}, {"k", h.cfg.k},     {"p_dbm", h.cfg.p_dbm},
                   {"n0", h.cfg.n0},   {"carrier_freq_hz", h.cfg.carrier_freq_hz},
                   {"reflect_amplitude", h.cfg.reflect_amplitude}};
    j["gain_model"] = {{"absorption", h.gm.absorption},
                       {"reflection", h.gm.reflection},
                       {"d0", h.gm.d0},
                       {"user_region_diameter", h.gm.user_region_diameter},
                       {"los_present", h.gm.los_present},
                       {"normalize", h.gm.normalize}};
    j["paths"] = {{"l_b", h.l_b}, {"l_u", h.l_u}};
    j["codebooks"] = {{"f", h.size_f}, {"s", h.size_s}, {"w", h.size_w}};
    j["labeler"] = labeler_name(h.labeler);
    j["ias_t_max"] = h.ias_t_max;
    j["seed"] = h.seed;
    j["n_samples"] = h.n_samples;
    j["n_train"] = ds.train_idx.size();
    j["n_val"] = ds.val_idx.size();
    char hash_hex[20];
    std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                  static_cast<unsigned long long>(h.codebook_hash));
    j["codebook_hash"] = hash_hex;

    std::ofstream os(dataset_path + ".meta.json", std::ios::trunc);
    if (!os)
        throw io_error("cannot write dataset meta file");
    os << j.dump(2) << "\n";
}

} // namespace risbeam
