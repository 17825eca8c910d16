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

#ifndef RISBEAM_COMMON_HPP
#define RISBEAM_COMMON_HPP

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace risbeam {

using cxd = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

// Raised when a configuration violates a structural invariant (counts,
// divisibility, ranges). Carries the name of the violated invariant.
class config_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Raised when a Gram matrix is singular or too ill-conditioned to invert.
class rank_deficiency_error : public std::runtime_error {
  public:
    rank_deficiency_error(const std::string &msg, double cond_estimate)
        : std::runtime_error(msg), cond(cond_estimate) {}
    double cond; // 1-norm condition estimate, +inf if exactly singular
};

// Raised when a search would visit more candidates than the configured budget.
class budget_error : public std::runtime_error {
  public:
    budget_error(const std::string &msg, std::uint64_t required_, std::uint64_t budget_)
        : std::runtime_error(msg), required(required_), budget(budget_) {}
    std::uint64_t required;
    std::uint64_t budget;
};

class io_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// splitmix64 step; used only to derive independent seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t &state)
{
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic per-stream seed derivation, e.g. one stream per data sample.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream)
{
    std::uint64_t s = base;
    std::uint64_t a = splitmix64(s);
    s = base ^ (stream + 0x9e3779b97f4a7c15ULL);
    std::uint64_t b = splitmix64(s);
    return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

// Seeded RNG with fully specified transforms. std::mt19937_64 has a
// standard-mandated sequence; the distribution transforms below are written
// out so streams are reproducible across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // standard normal via Box-Muller, one cached value
    double normal()
    {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0.0)
            u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * pi * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return r * std::cos(t);
    }

    // uniform integer in [0, n), unbiased via rejection
    std::uint64_t uniform_index(std::uint64_t n)
    {
        if (n == 0)
            throw std::invalid_argument("uniform_index: n must be positive");
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = gen_();
        while (x >= limit)
            x = gen_();
        return x % n;
    }

  private:
    std::mt19937_64 gen_;
    bool has_cached_ = false;
    double cached_ = 0.0;
};

// Worker cap shared by all parallel kernels. Resolves, in order: value set by
// set_max_threads (CLI --threads), RISBEAM_THREADS, OpenMP default.
int max_threads();
void set_max_threads(int n);

// Shortest decimal string that round-trips the double exactly.
std::string format_double(double v);

// FNV-1a over a raw byte range.
std::uint64_t fnv1a(const void *data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL);

} // namespace risbeam

#endif
