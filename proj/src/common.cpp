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

#include "risbeam/common.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace risbeam {

namespace {
std::atomic<int> g_max_threads{0}; // 0 = unresolved
}

int max_threads()
{
    int n = g_max_threads.load(std::memory_order_relaxed);
    if (n > 0)
        return n;
    if (const char *env = std::getenv("RISBEAM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) {
            g_max_threads.store(v, std::memory_order_relaxed);
            return v;
        }
    }
#ifdef _OPENMP
    n = omp_get_max_threads();
#else
    n = 1;
#endif
    g_max_threads.store(n, std::memory_order_relaxed);
    return n;
}

void set_max_threads(int n)
{
    if (n < 1)
        throw config_error("thread count must be >= 1");
    g_max_threads.store(n, std::memory_order_relaxed);
}

std::string format_double(double v)
{
    char buf[40];
    // shortest representation that parses back to the same double
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v)
            return buf;
    }
    return buf;
}

std::uint64_t fnv1a(const void *data, std::size_t len, std::uint64_t h)
{
    const auto *p = static_cast<const unsigned char *>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace risbeam
