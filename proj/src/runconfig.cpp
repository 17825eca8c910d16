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

#include "risbeam/runconfig.hpp"

#include <functional>
#include <map>

namespace risbeam {

namespace {

std::string trim(const std::string &s)
{
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

int to_int(const std::string &key, const std::string &v)
{
    try {
        std::size_t used = 0;
        int r = std::stoi(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return r;
    } catch (const std::exception &) {
        throw config_error("config key '" + key + "': '" + v + "' is not an integer");
    }
}

std::uint64_t to_u64(const std::string &key, const std::string &v)
{
    try {
        std::size_t used = 0;
        std::uint64_t r = std::stoull(v, &used);
        if (used != v.size())
            throw std::invalid_argument(v);
        return r;
    } catch (const std::exception &) {
        throw config_error("config key '" + key + "': '" + v + "' is not an unsigned integer");
    }
}

double to_dbl(const std::string &key, const std::string &v)
{
    char *end = nullptr;
    double r = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size() || v.empty())
        throw config_error("config key '" + key + "': '" + v + "' is not a number");
    return r;
}

bool to_bool(const std::string &key, const std::string &v)
{
    if (v == "1" || v == "true")
        return true;
    if (v == "0" || v == "false")
        return false;
    throw config_error("config key '" + key + "': '" + v + "' is not a boolean");
}

} // namespace

void RunConfig::set(const std::string &key, const std::string &value)
{
    // clang-format off
    if (key == "system.n_r") system.n_r = to_int(key, value);
    else if (key == "system.n_s") system.n_s = to_int(key, value);
    else if (key == "system.n_b") system.n_b = to_int(key, value);
    else if (key == "system.m") system.m = to_int(key, value);
    else if (key == "system.m_s") system.m_s = to_int(key, value);
    else if (key == "system.m_b") system.m_b = to_int(key, value);
    else if (key == "system.n_t") system.n_t = to_int(key, value);
    else if (key == "system.k") system.k = to_int(key, value);
    else if (key == "system.p_dbm") system.p_dbm = to_dbl(key, value);
    else if (key == "system.n0") system.n0 = to_dbl(key, value);
    else if (key == "system.carrier_freq_hz") system.carrier_freq_hz = to_dbl(key, value);
    else if (key == "system.spacing_over_lambda") system.spacing_over_lambda = to_dbl(key, value);
    else if (key == "system.reflect_amplitude") system.reflect_amplitude = to_dbl(key, value);
    else if (key == "gain.absorption") gain.absorption = to_dbl(key, value);
    else if (key == "gain.reflection") gain.reflection = to_dbl(key, value);
    else if (key == "gain.d0") gain.d0 = to_dbl(key, value);
    else if (key == "gain.user_region_diameter") gain.user_region_diameter = to_dbl(key, value);
    else if (key == "gain.los_present") gain.los_present = to_bool(key, value);
    else if (key == "gain.normalize") gain.normalize = to_bool(key, value);
    else if (key == "codebook.f") size_f = to_int(key, value);
    else if (key == "codebook.s") size_s = to_int(key, value);
    else if (key == "codebook.w") size_w = to_int(key, value);
    else if (key == "channel.l_b") l_b = to_int(key, value);
    else if (key == "channel.l_u") l_u = to_int(key, value);
    else if (key == "search.t_max") ias_t_max = to_int(key, value);
    else if (key == "search.budget") budget = to_u64(key, value);
    else if (key == "train.lr") train.lr = to_dbl(key, value);
    else if (key == "train.beta1") train.beta1 = to_dbl(key, value);
    else if (key == "train.beta2") train.beta2 = to_dbl(key, value);
    else if (key == "train.adam_eps") train.adam_eps = to_dbl(key, value);
    else if (key == "train.batch") train.batch_size = to_int(key, value);
    else if (key == "train.epochs") train.epochs = to_int(key, value);
    else if (key == "train.mu") train.lr_decay = to_dbl(key, value);
    else if (key == "train.n_stp") train.lr_step = to_int(key, value);
    else if (key == "train.dropout") train.dropout = to_dbl(key, value);
    else if (key == "train.seed") train.seed = to_u64(key, value);
    else if (key == "model.conv_kernel") model.conv_kernel = to_int(key, value);
    else if (key == "model.conv_hidden") model.conv_hidden = to_int(key, value);
    else if (key == "model.embed_dim") model.embed_dim = to_int(key, value);
    else if (key == "model.head_width") model.head_width = to_int(key, value);
    else if (key == "model.attn_dim") model.attn_dim = to_int(key, value);
    else if (key == "model.per_link_blocks") model.per_link_blocks = to_bool(key, value);
    else if (key == "dataset.n_samples") n_samples = static_cast<std::uint32_t>(to_u64(key, value));
    else if (key == "dataset.train_fraction") train_fraction = to_dbl(key, value);
    else if (key == "dataset.labeler") labeler = value;
    else if (key == "run.seed") seed = to_u64(key, value);
    else if (key == "run.threads") threads = to_int(key, value);
    else throw config_error("unknown config key '" + key + "'");
    // clang-format on
}

RunConfig RunConfig::from_file(const std::string &path)
{
    std::ifstream is(path);
    if (!is)
        throw io_error("cannot open config file '" + path + "'");
    RunConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';')
            continue;
        if (t.front() == '[' && t.back() == ']') {
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("config line " + std::to_string(lineno) + ": expected key=value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        cfg.set(section.empty() ? key : section + "." + key, value);
    }
    return cfg;
}

std::vector<std::pair<std::string, std::string>> RunConfig::flat() const
{
    std::vector<std::pair<std::string, std::string>> kv;
    auto d = [](double v) { return format_double(v); };
    kv.emplace_back("system.n_r", std::to_string(system.n_r));
    kv.emplace_back("system.n_s", std::to_string(system.n_s));
    kv.emplace_back("system.n_b", std::to_string(system.n_b));
    kv.emplace_back("system.m", std::to_string(system.m));
    kv.emplace_back("system.m_s", std::to_string(system.m_s));
    kv.emplace_back("system.m_b", std::to_string(system.m_b));
    kv.emplace_back("system.n_t", std::to_string(system.n_t));
    kv.emplace_back("system.k", std::to_string(system.k));
    kv.emplace_back("system.p_dbm", d(system.p_dbm));
    kv.emplace_back("system.n0", d(system.n0));
    kv.emplace_back("system.carrier_freq_hz", d(system.carrier_freq_hz));
    kv.emplace_back("system.spacing_over_lambda", d(system.spacing_over_lambda));
    kv.emplace_back("system.reflect_amplitude", d(system.reflect_amplitude));
    kv.emplace_back("gain.absorption", d(gain.absorption));
    kv.emplace_back("gain.reflection", d(gain.reflection));
    kv.emplace_back("gain.d0", d(gain.d0));
    kv.emplace_back("gain.user_region_diameter", d(gain.user_region_diameter));
    kv.emplace_back("gain.los_present", gain.los_present ? "1" : "0");
    kv.emplace_back("gain.normalize", gain.normalize ? "1" : "0");
    kv.emplace_back("codebook.f", std::to_string(size_f));
    kv.emplace_back("codebook.s", std::to_string(size_s));
    kv.emplace_back("codebook.w", std::to_string(size_w));
    kv.emplace_back("channel.l_b", std::to_string(l_b));
    kv.emplace_back("channel.l_u", std::to_string(l_u));
    kv.emplace_back("search.t_max", std::to_string(ias_t_max));
    kv.emplace_back("search.budget", std::to_string(budget));
    kv.emplace_back("train.lr", d(train.lr));
    kv.emplace_back("train.beta1", d(train.beta1));
    kv.emplace_back("train.beta2", d(train.beta2));
    kv.emplace_back("train.adam_eps", d(train.adam_eps));
    kv.emplace_back("train.batch", std::to_string(train.batch_size));
    kv.emplace_back("train.epochs", std::to_string(train.epochs));
    kv.emplace_back("train.mu", d(train.lr_decay));
    kv.emplace_back("train.n_stp", std::to_string(train.lr_step));
    kv.emplace_back("train.dropout", d(train.dropout));
    kv.emplace_back("train.seed", std::to_string(train.seed));
    kv.emplace_back("model.conv_kernel", std::to_string(model.conv_kernel));
    kv.emplace_back("model.conv_hidden", std::to_string(model.conv_hidden));
    kv.emplace_back("model.embed_dim", std::to_string(model.embed_dim));
    kv.emplace_back("model.head_width", std::to_string(model.head_width));
    kv.emplace_back("model.attn_dim", std::to_string(model.attn_dim));
    kv.emplace_back("model.per_link_blocks", model.per_link_blocks ? "1" : "0");
    kv.emplace_back("dataset.n_samples", std::to_string(n_samples));
    kv.emplace_back("dataset.train_fraction", d(train_fraction));
    kv.emplace_back("dataset.labeler", labeler);
    kv.emplace_back("run.seed", std::to_string(seed));
    kv.emplace_back("run.threads", std::to_string(threads));
    return kv;
}

std::string RunConfig::to_text() const
{
    std::string out;
    std::string cur_section;
    for (const auto &[key, value] : flat()) {
        std::string section = key.substr(0, key.find('.'));
        if (section != cur_section) {
            out += "[" + section + "]\n";
            cur_section = section;
        }
        out += key.substr(key.find('.') + 1) + " = " + value + "\n";
    }
    return out;
}

void RunConfig::validate() const
{
    system.validate();
    gain.validate();
    train.validate();
    if (size_f < 1 || size_s < 1 || size_w < 1)
        throw config_error("codebook sizes must be >= 1");
    if (l_b < 0 || l_u < 0)
        throw config_error("path counts must be >= 0");
    if (ias_t_max < 1)
        throw config_error("search t_max must be >= 1");
    if (n_samples < 1)
        throw config_error("dataset.n_samples must be >= 1");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw config_error("train fraction must be in (0, 1)");
    labeler_enum();
    if (threads < 0)
        throw config_error("run.threads must be >= 0");
}

CsvWriter::CsvWriter(const std::string &path) : os_(path, std::ios::trunc)
{
    if (!os_)
        throw io_error("cannot open '" + path + "' for writing");
}

void CsvWriter::comment(const std::string &line) { os_ << "# " << line << "\n"; }

void CsvWriter::config_comments(const RunConfig &cfg)
{
    for (const auto &[k, v] : cfg.flat())
        os_ << "# " << k << "=" << v << "\n";
}

void CsvWriter::row(const std::vector<std::string> &cells)
{
    for (std::size_t i = 0; i < cells.size(); ++i)
        os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
}

} // namespace risbeam
