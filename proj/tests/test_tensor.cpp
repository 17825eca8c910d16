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

#include <functional>

#include "doctest.h"
#include "risbeam/reference.hpp"
#include "risbeam/tensor.hpp"

using namespace risbeam;
using nn::TensorPtr;

namespace {

TensorPtr<double> randn(std::vector<std::size_t> shape, Rng &rng, double sc = 1.0)
{
    auto t = nn::make_tensor<double>(std::move(shape));
    for (auto &v : t->v)
        v = sc * rng.normal();
    return t;
}

// flatten -> fixed random linear map -> scalar; makes any op output a loss
TensorPtr<double> reduce_scalar(nn::Tape<double> &tape, const TensorPtr<double> &y,
                                std::uint64_t seed)
{
    Rng rng(seed);
    auto flat = nn::reshape(tape, y, {1, y->numel()});
    auto w = randn({y->numel(), 1}, rng);
    auto b = nn::make_tensor<double>({1});
    return nn::reshape(tape, nn::linear(tape, flat, w, b), {1});
}

// central finite differences against backprop, relative error <= tol
void check_gradients(const std::function<TensorPtr<double>(nn::Tape<double> &)> &make,
                     const std::vector<TensorPtr<double>> &inputs, double tol = 1e-6)
{
    nn::Tape<double> tape;
    auto loss = make(tape);
    tape.backward(loss);
    std::vector<std::vector<double>> analytic;
    for (const auto &t : inputs) {
        t->ensure_grad();
        analytic.push_back(t->g);
    }
    const double h = 1e-6;
    for (std::size_t ti = 0; ti < inputs.size(); ++ti)
        for (std::size_t j = 0; j < inputs[ti]->numel(); ++j) {
            const double orig = inputs[ti]->v[j];
            inputs[ti]->v[j] = orig + h;
            nn::Tape<double> tp;
            double lp = make(tp)->v[0];
            inputs[ti]->v[j] = orig - h;
            nn::Tape<double> tm;
            double lm = make(tm)->v[0];
            inputs[ti]->v[j] = orig;
            const double numeric = (lp - lm) / (2.0 * h);
            const double ana = analytic[ti][j];
            const double denom = std::max({1e-3, std::abs(numeric), std::abs(ana)});
            CHECK(std::abs(numeric - ana) / denom <= tol);
        }
    for (const auto &t : inputs)
        t->zero_grad();
}

} // namespace

TEST_CASE("relu clamps negatives")
{
    nn::Tape<double> tape;
    auto x = nn::make_tensor<double>({3});
    x->v = {-1.0, 0.0, 2.0};
    auto y = nn::relu(tape, x);
    CHECK(y->v == std::vector<double>{0.0, 0.0, 2.0});
}

TEST_CASE("softmax of zeros is uniform and rows sum to one")
{
    nn::Tape<double> tape;
    auto x = nn::make_tensor<double>({1, 4});
    auto y = nn::softmax_rows(tape, x);
    for (double v : y->v)
        CHECK(v == doctest::Approx(0.25).epsilon(1e-12));

    Rng rng(4);
    auto r = randn({5, 7}, rng);
    auto sy = nn::softmax_rows(tape, r);
    for (int row = 0; row < 5; ++row) {
        double s = 0.0;
        for (int c = 0; c < 7; ++c)
            s += sy->v[row * 7 + c];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("conv2d with a 1x1 identity kernel passes input through")
{
    nn::Tape<double> tape;
    Rng rng(5);
    auto x = randn({2, 1, 3, 4}, rng);
    auto k = nn::make_tensor<double>({1, 1, 1, 1});
    k->v = {1.0};
    auto b = nn::make_tensor<double>({1});
    auto y = nn::conv2d(tape, x, k, b);
    CHECK(y->v == x->v);
}

TEST_CASE("conv2d forward matches the naive serial reference")
{
    Rng rng(6);
    auto x = randn({3, 2, 5, 6}, rng);
    auto k = randn({4, 2, 3, 3}, rng);
    auto b = randn({4}, rng);
    nn::Tape<double> tape;
    auto y = nn::conv2d(tape, x, k, b);
    auto want = ref::conv2d_naive<double>(x->v, 3, 2, 5, 6, k->v, 4, 3, 3, b->v);
    REQUIRE(y->v.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(y->v[i] == doctest::Approx(want[i]).epsilon(1e-12));
}

TEST_CASE("parallel kernels are bitwise identical across worker counts")
{
    Rng rng(7);
    // large enough to cross the parallel cutoff
    auto x = randn({8, 4, 24, 24}, rng);
    auto k = randn({8, 4, 3, 3}, rng);
    auto b = randn({8}, rng);

    set_max_threads(1);
    nn::Tape<double> t1;
    auto y1 = nn::conv2d(t1, x, k, b);
    set_max_threads(4);
    nn::Tape<double> t2;
    auto y2 = nn::conv2d(t2, x, k, b);
    CHECK(y1->v == y2->v);

    auto big = randn({64, 130}, rng);
    auto w = randn({130, 70}, rng);
    auto bias = randn({70}, rng);
    set_max_threads(1);
    nn::Tape<double> t3;
    auto l1 = nn::linear(t3, big, w, bias);
    set_max_threads(4);
    nn::Tape<double> t4;
    auto l2 = nn::linear(t4, big, w, bias);
    CHECK(l1->v == l2->v);
    set_max_threads(2);
}

TEST_CASE("cross entropy of uniform logits is ln of the class count")
{
    nn::Tape<double> tape;
    auto logits = nn::make_tensor<double>({2, 8});
    std::vector<std::uint32_t> labels{3, 5};
    auto loss = nn::cross_entropy(tape, logits, labels);
    CHECK(loss->v[0] == doctest::Approx(std::log(8.0)).epsilon(1e-12));
}

TEST_CASE("cross entropy of saturated one-hot logits vanishes")
{
    nn::Tape<double> tape;
    auto logits = nn::make_tensor<double>({1, 4});
    logits->v = {0.0, 20.0, 0.0, 0.0};
    std::vector<std::uint32_t> labels{1};
    auto loss = nn::cross_entropy(tape, logits, labels);
    CHECK(loss->v[0] <= 1e-3);
    CHECK(loss->v[0] >= 0.0);
}

TEST_CASE("dropout is identity in eval mode and unbiased in train mode")
{
    Rng rng(8);
    auto x = randn({100}, rng);
    nn::Tape<double> tape;
    auto eval_y = nn::dropout(tape, x, 0.3, false, 1);
    CHECK(eval_y->v == x->v);

    // mean over many train-mode masks approaches the eval output
    const int trials = 10000;
    std::vector<double> mean(x->numel(), 0.0);
    for (int t = 0; t < trials; ++t) {
        nn::Tape<double> tt;
        auto y = nn::dropout(tt, x, 0.3, true, 1000 + t);
        for (std::size_t i = 0; i < mean.size(); ++i)
            mean[i] += y->v[i];
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < mean.size(); ++i) {
        num += std::abs(mean[i] / trials - x->v[i]);
        den += std::abs(x->v[i]);
    }
    CHECK(num / den < 0.02);
}

TEST_CASE("gradients: every primitive against central differences")
{
    Rng rng(9);

    SUBCASE("conv2d")
    {
        auto x = randn({2, 2, 4, 3}, rng);
        auto k = randn({3, 2, 3, 3}, rng);
        auto b = randn({3}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) { return reduce_scalar(t, nn::conv2d(t, x, k, b), 1); },
            {x, k, b});
    }
    SUBCASE("linear")
    {
        auto x = randn({3, 5}, rng);
        auto w = randn({5, 4}, rng);
        auto b = randn({4}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) { return reduce_scalar(t, nn::linear(t, x, w, b), 2); },
            {x, w, b});
    }
    SUBCASE("relu")
    {
        auto x = randn({4, 4}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) { return reduce_scalar(t, nn::relu(t, x), 3); }, {x});
    }
    SUBCASE("softmax_rows")
    {
        auto x = randn({3, 5}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) { return reduce_scalar(t, nn::softmax_rows(t, x), 4); },
            {x});
    }
    SUBCASE("residual_add")
    {
        auto a = randn({2, 6}, rng);
        auto b = randn({2, 6}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) { return reduce_scalar(t, nn::residual_add(t, a, b), 5); },
            {a, b});
    }
    SUBCASE("matmul plain and transposed")
    {
        auto a = randn({2, 3, 4}, rng);
        auto b = randn({2, 4, 5}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) { return reduce_scalar(t, nn::matmul(t, a, b), 6); },
            {a, b});
        auto c = randn({2, 5, 4}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) { return reduce_scalar(t, nn::matmul(t, a, c, true), 7); },
            {a, c});
    }
    SUBCASE("dropout train mode with a fixed mask")
    {
        auto x = randn({3, 4}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) {
                return reduce_scalar(t, nn::dropout(t, x, 0.4, true, 77), 8);
            },
            {x});
    }
    SUBCASE("cross_entropy")
    {
        auto logits = randn({4, 5}, rng);
        std::vector<std::uint32_t> labels{0, 3, 2, 4};
        check_gradients(
            [&](nn::Tape<double> &t) { return nn::cross_entropy(t, logits, labels); }, {logits});
    }
    SUBCASE("stack, concat, slice, scale")
    {
        auto a = randn({2, 3}, rng);
        auto b = randn({2, 3}, rng);
        check_gradients(
            [&](nn::Tape<double> &t) {
                auto stacked = nn::stack_rows(t, {a, b});      // [2,2,3]
                auto sliced = nn::slice_axis1(t, stacked, 0, 2);
                auto flat = nn::reshape(t, sliced, {2, 6});
                auto cat = nn::concat_cols(t, {flat, a});
                return reduce_scalar(t, nn::scale(t, cat, 0.7), 9);
            },
            {a, b});
    }
}

TEST_CASE("shape mismatches raise invalid_argument naming both shapes")
{
    nn::Tape<double> tape;
    auto a = nn::make_tensor<double>({2, 3});
    auto b = nn::make_tensor<double>({3, 2});
    try {
        nn::residual_add(tape, a, b);
        FAIL("expected invalid_argument");
    } catch (const std::invalid_argument &e) {
        std::string msg = e.what();
        CHECK(msg.find("[2x3]") != std::string::npos);
        CHECK(msg.find("[3x2]") != std::string::npos);
    }
}
