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

#include "doctest.h"
#include "risbeam/linalg.hpp"

using namespace risbeam;

namespace {

CMat random_cmat(std::size_t r, std::size_t c, Rng &rng)
{
    CMat m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i)
        m.data()[i] = cxd(rng.normal(), rng.normal());
    return m;
}

} // namespace

TEST_CASE("lu determinant matches cofactor expansion on 2x2 and 3x3")
{
    CMat a(2, 2);
    a(0, 0) = cxd(1, 1);
    a(0, 1) = cxd(2, 0);
    a(1, 0) = cxd(0, -1);
    a(1, 1) = cxd(3, 2);
    cxd det2 = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
    auto f = lu_factor(a);
    cxd det_lu = std::exp(f.log_abs_det) * f.det_phase;
    CHECK(std::abs(det_lu - det2) < 1e-12 * std::abs(det2));

    Rng rng(3);
    CMat b = random_cmat(3, 3, rng);
    cxd det3 = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1)) -
               b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0)) +
               b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
    auto fb = lu_factor(b);
    cxd det_lub = std::exp(fb.log_abs_det) * fb.det_phase;
    CHECK(std::abs(det_lub - det3) < 1e-12 * std::abs(det3));
}

TEST_CASE("lu solve and inverse reproduce the identity")
{
    Rng rng(7);
    for (int n : {1, 2, 4, 6}) {
        CMat a = random_cmat(n, n, rng);
        CMat inv = inverse(a);
        CMat should_be_i = mul(a, inv);
        CMat err = sub(should_be_i, CMat::identity(n));
        CHECK(frobenius_norm(err) < 1e-10);
    }
}

TEST_CASE("singular matrix is flagged")
{
    CMat a(2, 2);
    a(0, 0) = cxd(1, 0);
    a(0, 1) = cxd(2, 0);
    a(1, 0) = cxd(2, 0);
    a(1, 1) = cxd(4, 0); // rank 1
    auto f = lu_factor(a);
    CHECK(f.singular);
    CHECK(f.log_abs_det == -std::numeric_limits<double>::infinity());
    CHECK_THROWS_AS(lu_solve(f, CMat::identity(2)), rank_deficiency_error);
}

TEST_CASE("cond1 estimate scales like the diagonal ratio")
{
    CMat d(3, 3);
    d(0, 0) = 100.0;
    d(1, 1) = 1.0;
    d(2, 2) = 0.01;
    double c = cond1_estimate(d);
    CHECK(c == doctest::Approx(1e4).epsilon(1e-12));
}

TEST_CASE("real-valued Mat shares the same machinery")
{
    RMat a(2, 2);
    a(0, 0) = 4;
    a(0, 1) = 1;
    a(1, 0) = 1;
    a(1, 1) = 3;
    auto f = lu_factor(a);
    CHECK(std::exp(f.log_abs_det) * f.det_phase == doctest::Approx(11.0));
    RMat x = lu_solve(f, RMat::identity(2));
    RMat id = mul(a, x);
    CHECK(frobenius_norm(sub(id, RMat::identity(2))) < 1e-14);
}

TEST_CASE("gram is hermitian positive semidefinite")
{
    Rng rng(11);
    CMat a = random_cmat(5, 3, rng);
    CMat g = gram(a);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(g(i, i).imag() == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(g(i, i).real() >= 0.0);
        for (std::size_t j = 0; j < 3; ++j)
            CHECK(std::abs(g(i, j) - std::conj(g(j, i))) < 1e-13);
    }
}
