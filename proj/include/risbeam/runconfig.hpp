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
// Line-oriented run configuration: "[section]" brackets and key=value
// lines, '#' comments. Every key can also be set from the command line as
// --set section.key=value. The resolved configuration serializes
// canonically and is embedded as comment lines in every emitted CSV.

#ifndef RISBEAM_RUNCONFIG_HPP
#define RISBEAM_RUNCONFIG_HPP

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "risbeam/dataset.hpp"
#include "risbeam/mtlnet.hpp"

namespace risbeam {

struct RunConfig {
    SystemConfig system;
    GainModel gain;
    int size_f = 8, size_s = 8, size_w = 8;
    int l_b = 3, l_u = 3;
    int ias_t_max = 10;
    std::uint64_t budget = 10'000'000;
    nn::TrainConfig train;
    nn::MtlArch model;
    std::uint32_t n_samples = 6000;
    double train_fraction = 5.0 / 6.0;
    std::string labeler = "ias";
    std::uint64_t seed = 1;
    int threads = 0; // 0 = library default

    static RunConfig from_file(const std::string &path);

    // "section.key" assignment; throws config_error naming unknown keys.
    void set(const std::string &dotted_key, const std::string &value);

    // canonical text form (sections and keys in fixed order)
    std::string to_text() const;

    // flattened key=value pairs for CSV comment headers
    std::vector<std::pair<std::string, std::string>> flat() const;

    void validate() const;

    Labeler labeler_enum() const
    {
        if (labeler == "ias")
            return Labeler::ias;
        if (labeler == "es")
            return Labeler::es;
        throw config_error("labeler must be 'ias' or 'es'");
    }

    SearchBudget search_budget() const { return SearchBudget{budget}; }
};

// CSV with '#' metadata comments, comma separator, '.' decimals, and
// round-trip-exact doubles.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string &path);

    void comment(const std::string &line);
    void config_comments(const RunConfig &cfg);
    void row(const std::vector<std::string> &cells);

    static std::string num(double v) { return format_double(v); }

  private:
    std::ofstream os_;
};

} // namespace risbeam

#endif
