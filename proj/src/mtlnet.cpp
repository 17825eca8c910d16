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

#include "risbeam/mtlnet.hpp"

#include <bit>
#include <cstring>
#include <map>

static_assert(std::endian::native == std::endian::little, "checkpoint format assumes little-endian");

namespace risbeam::nn {

namespace {

std::string checkpoint_header(const MtlModel<float> &m, int epoch)
{
    std::map<std::string, std::string> kv;
    kv["format"] = "1";
    kv["epoch"] = std::to_string(epoch);
    kv["init_seed"] = std::to_string(m.init_seed);
    kv["arch.conv_kernel"] = std::to_string(m.arch.conv_kernel);
    kv["arch.conv_hidden"] = std::to_string(m.arch.conv_hidden);
    kv["arch.embed_dim"] = std::to_string(m.arch.embed_dim);
    kv["arch.head_width"] = std::to_string(m.arch.head_width);
    kv["arch.attn_dim"] = std::to_string(m.arch.attn_dim);
    kv["arch.per_link_blocks"] = m.arch.per_link_blocks ? "1" : "0";
    kv["cfg.n_r"] = std::to_string(m.cfg.n_r);
    kv["cfg.n_s"] = std::to_string(m.cfg.n_s);
    kv["cfg.n_b"] = std::to_string(m.cfg.n_b);
    kv["cfg.m"] = std::to_string(m.cfg.m);
    kv["cfg.m_s"] = std::to_string(m.cfg.m_s);
    kv["cfg.m_b"] = std::to_string(m.cfg.m_b);
    kv["cfg.n_t"] = std::to_string(m.cfg.n_t);
    kv["cfg.k"] = std::to_string(m.cfg.k);
    kv["cfg.p_dbm"] = format_double(m.cfg.p_dbm);
    kv["cfg.n0"] = format_double(m.cfg.n0);
    kv["cfg.carrier_freq_hz"] = format_double(m.cfg.carrier_freq_hz);
    kv["cfg.spacing_over_lambda"] = format_double(m.cfg.spacing_over_lambda);
    kv["cfg.reflect_amplitude"] = format_double(m.cfg.reflect_amplitude);
    kv["size_f"] = std::to_string(m.size_f);
    kv["size_s"] = std::to_string(m.size_s);
    kv["size_w"] = std::to_string(m.size_w);

    std::string out;
    for (const auto &[k, v] : kv)
        out += k + "=" + v + "\n";
    return out;
}

struct ParsedHeader {
    MtlArch arch;
    SystemConfig cfg;
    int size_f, size_s, size_w;
    std::uint64_t init_seed;
    int epoch;
};

ParsedHeader parse_checkpoint_header(const std::string &text)
{
    std::map<std::string, std::string> kv;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos)
            throw io_error("checkpoint header: missing newline");
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw io_error("checkpoint header: malformed line");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto need = [&kv](const char *key) -> const std::string & {
        auto it = kv.find(key);
        if (it == kv.end())
            throw io_error(std::string("checkpoint header: missing key '") + key + "'");
        return it->second;
    };
    if (need("format") != "1")
        throw io_error("checkpoint header: unsupported format version");

    ParsedHeader h{};
    h.epoch = std::stoi(need("epoch"));
    h.init_seed = std::stoull(need("init_seed"));
    h.arch.conv_kernel = std::stoi(need("arch.conv_kernel"));
    h.arch.conv_hidden = std::stoi(need("arch.conv_hidden"));
    h.arch.embed_dim = std::stoi(need("arch.embed_dim"));
    h.arch.head_width = std::stoi(need("arch.head_width"));
    h.arch.attn_dim = std::stoi(need("arch.attn_dim"));
    h.arch.per_link_blocks = need("arch.per_link_blocks") == "1";
    h.cfg.n_r = std::stoi(need("cfg.n_r"));
    h.cfg.n_s = std::stoi(need("cfg.n_s"));
    h.cfg.n_b = std::stoi(need("cfg.n_b"));
    h.cfg.m = std::stoi(need("cfg.m"));
    h.cfg.m_s = std::stoi(need("cfg.m_s"));
    h.cfg.m_b = std::stoi(need("cfg.m_b"));
    h.cfg.n_t = std::stoi(need("cfg.n_t"));
    h.cfg.k = std::stoi(need("cfg.k"));
    h.cfg.p_dbm = std::strtod(need("cfg.p_dbm").c_str(), nullptr);
    h.cfg.n0 = std::strtod(need("cfg.n0").c_str(), nullptr);
    h.cfg.carrier_freq_hz = std::strtod(need("cfg.carrier_freq_hz").c_str(), nullptr);
    h.cfg.spacing_over_lambda = std::strtod(need("cfg.spacing_over_lambda").c_str(), nullptr);
    h.cfg.reflect_amplitude = std::strtod(need("cfg.reflect_amplitude").c_str(), nullptr);
    h.size_f = std::stoi(need("size_f"));
    h.size_s = std::stoi(need("size_s"));
    h.size_w = std::stoi(need("size_w"));
    return h;
}

template <typename T>
MtlModel<float> to_float_model(const MtlModel<T> &m)
{
    if constexpr (std::is_same_v<T, float>)
        return m;
    else {
        MtlModel<float> f = make_model<float>(m.cfg, m.arch, m.size_f, m.size_s, m.size_w,
                                              m.init_seed);
        auto src = m.parameters();
        auto dst = f.parameters();
        for (std::size_t i = 0; i < src.size(); ++i)
            for (std::size_t j = 0; j < src[i]->numel(); ++j)
                dst[i]->v[j] = static_cast<float>(src[i]->v[j]);
        return f;
    }
}

} // namespace

template <typename T>
void save_checkpoint(const MtlModel<T> &model, const std::string &path, int epoch)
{
    MtlModel<float> fm = to_float_model(model);
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os)
        throw io_error("cannot open '" + path + "' for writing");
    os.write("RBLM", 4);
    std::string head = checkpoint_header(fm, epoch);
    std::uint64_t len = head.size();
    os.write(reinterpret_cast<const char *>(&len), sizeof(len));
    os.write(head.data(), static_cast<std::streamsize>(head.size()));
    for (const auto &p : fm.parameters())
        os.write(reinterpret_cast<const char *>(p->v.data()),
                 static_cast<std::streamsize>(p->numel() * sizeof(float)));
    if (!os)
        throw io_error("write to '" + path + "' failed");
}

template <typename T>
MtlModel<T> load_checkpoint(const std::string &path, int *epoch_out)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw io_error("cannot open '" + path + "'");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RBLM", 4) != 0)
        throw io_error("'" + path + "' is not a model checkpoint (bad magic)");
    std::uint64_t len = 0;
    is.read(reinterpret_cast<char *>(&len), sizeof(len));
    std::string head(len, '\0');
    is.read(head.data(), static_cast<std::streamsize>(len));
    if (!is)
        throw io_error("checkpoint file truncated");

    ParsedHeader h = parse_checkpoint_header(head);
    MtlModel<T> m = make_model<T>(h.cfg, h.arch, h.size_f, h.size_s, h.size_w, h.init_seed);
    for (const auto &p : m.parameters()) {
        std::vector<float> buf(p->numel());
        is.read(reinterpret_cast<char *>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!is)
            throw io_error("checkpoint file truncated");
        for (std::size_t j = 0; j < buf.size(); ++j)
            p->v[j] = static_cast<T>(buf[j]);
    }
    if (epoch_out)
        *epoch_out = h.epoch;
    return m;
}

template void save_checkpoint<float>(const MtlModel<float> &, const std::string &, int);
template void save_checkpoint<double>(const MtlModel<double> &, const std::string &, int);
template MtlModel<float> load_checkpoint<float>(const std::string &, int *);
template MtlModel<double> load_checkpoint<double>(const std::string &, int *);

} // namespace risbeam::nn
