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
#include "risbeam/blockwise.hpp"

using namespace risbeam;
using bw::BlockwiseProblem;

namespace {

// element-loop objective oracle, no matrix helpers
double objective_oracle(const BlockwiseProblem<double> &prob, const RMat &g,
                        const std::vector<RMat> &q)
{
    double f = 0.0;
    for (std::size_t u = 0; u < prob.tasks(); ++u) {
        const std::size_t v = prob.x.rows(), p = prob.y[u].cols();
        for (std::size_t s = 0; s < v; ++s)
            for (std::size_t c = 0; c < p; ++c) {
                double pred = 0.0;
                for (std::size_t a = 0; a < prob.x.cols(); ++a)
                    for (std::size_t b = 0; b < prob.f_s.rows(); ++b)
                        for (std::size_t e = 0; e < prob.f_s.cols(); ++e)
                            for (std::size_t d = 0; d < prob.f_u[u].rows(); ++d)
                                pred += prob.x(s, a) * g(a, b) * prob.f_s(b, e) * q[u](e, d) *
                                        prob.f_u[u](d, c);
                double r = pred - prob.y[u](s, c);
                f += 0.5 * r * r;
            }
    }
    for (std::size_t i = 0; i < g.size(); ++i)
        f += 0.5 * prob.rho1 * g.data()[i] * g.data()[i];
    for (const auto &qu : q)
        for (std::size_t i = 0; i < qu.size(); ++i)
            f += 0.5 * prob.rho2 * qu.data()[i] * qu.data()[i];
    return f;
}

// plain joint gradient descent with Armijo backtracking, run to convergence
double gd_oracle(const BlockwiseProblem<double> &prob, RMat g, std::vector<RMat> q,
                 int max_iter = 200000, double grad_tol = 1e-9)
{
    double f = bw::objective(prob, g, q);
    double step = 1.0;
    for (int it = 0; it < max_iter; ++it) {
        RMat gg = bw::grad_g(prob, g, q);
        auto gq = bw::grad_q(prob, g, q);
        double n2 = inner_real(gg, gg);
        for (const auto &x : gq)
            n2 += inner_real(x, x);
        if (std::sqrt(n2) <= grad_tol * (1.0 + std::abs(f)))
            break;
        step *= 2.0; // allow the step to grow back after cautious phases
        while (true) {
            RMat g_try = sub(g, scale(gg, step));
            std::vector<RMat> q_try = q;
            for (std::size_t u = 0; u < q.size(); ++u)
                q_try[u] = sub(q[u], scale(gq[u], step));
            double f_try = bw::objective(prob, g_try, q_try);
            if (f_try <= f - 1e-4 * step * n2) {
                g = std::move(g_try);
                q = std::move(q_try);
                f = f_try;
                break;
            }
            step *= 0.5;
            if (step < 1e-18)
                return f;
        }
    }
    return f;
}

// central finite differences of the objective, all entries
double fd_grad_norm(const BlockwiseProblem<double> &prob, RMat g, std::vector<RMat> q)
{
    const double h = 1e-6;
    double n2 = 0.0;
    auto fd = [&](double &slot) {
        double orig = slot;
        slot = orig + h;
        double fp = bw::objective(prob, g, q);
        slot = orig - h;
        double fm = bw::objective(prob, g, q);
        slot = orig;
        double d = (fp - fm) / (2.0 * h);
        n2 += d * d;
    };
    for (std::size_t i = 0; i < g.size(); ++i)
        fd(g.data()[i]);
    for (auto &qu : q)
        for (std::size_t i = 0; i < qu.size(); ++i)
            fd(qu.data()[i]);
    return std::sqrt(n2);
}

BlockwiseProblem<double> spec_problem(std::uint64_t seed)
{
    bw::ProblemDims dims; // V=20, r=6, n=5, q=4, d=3, p=2, U=3
    return bw::make_random_problem<double>(dims, 0.1, 0.1, seed);
}

} // namespace

TEST_CASE("objective at zero weights is half the squared target norm")
{
    auto prob = spec_problem(1);
    RMat g(prob.x.cols(), prob.f_s.rows());
    std::vector<RMat> q;
    for (std::size_t u = 0; u < prob.tasks(); ++u)
        q.emplace_back(prob.f_s.cols(), prob.f_u[u].rows());
    double want = 0.0;
    for (const auto &y : prob.y) {
        double n = frobenius_norm(y);
        want += 0.5 * n * n;
    }
    CHECK(bw::objective(prob, g, q) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("scalar problem reduces to the hand-derived closed forms")
{
    BlockwiseProblem<double> prob;
    prob.x = RMat(1, 1, 1.0);
    prob.f_s = RMat(1, 1, 1.0);
    prob.f_u = {RMat(1, 1, 1.0)};
    prob.y = {RMat(1, 1, 2.0)}; // y = 2
    prob.rho1 = 0.3;
    prob.rho2 = 0.2;

    double gval = 0.7, qval = 1.1;
    RMat g(1, 1, gval);
    std::vector<RMat> q{RMat(1, 1, qval)};
    double want = 0.5 * (gval * qval - 2.0) * (gval * qval - 2.0) +
                  0.5 * prob.rho1 * gval * gval + 0.5 * prob.rho2 * qval * qval;
    CHECK(bw::objective(prob, g, q) == doctest::Approx(want).epsilon(1e-14));

    // g* = q y / (q^2 + rho1)
    RMat gstar = bw::update_g(prob, q);
    CHECK(gstar(0, 0) == doctest::Approx(qval * 2.0 / (qval * qval + prob.rho1)).epsilon(1e-10));

    // scalar Lipschitz: L_G = q^2 * x^2
    auto [lg, lq] = bw::lipschitz_estimates(prob, g, q);
    CHECK(lg == doctest::Approx(qval * qval).epsilon(1e-12));
    CHECK(lq == doctest::Approx(gval * gval).epsilon(1e-12));
}

TEST_CASE("objective matches the element-loop oracle on random instances")
{
    for (std::uint64_t seed : {2u, 3u, 4u}) {
        auto prob = spec_problem(seed);
        auto [g, q] = bw::random_init(prob, seed * 11 + 1);
        double a = bw::objective(prob, g, q);
        double b = objective_oracle(prob, g, q);
        CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
    }
}

TEST_CASE("half-updates satisfy first-order optimality")
{
    auto prob = spec_problem(5);
    auto [g0, q0] = bw::random_init(prob, 55);

    // after updating G, the gradient with respect to G vanishes
    RMat g1 = bw::update_g(prob, q0);
    CHECK(frobenius_norm(bw::grad_g(prob, g1, q0)) <= 1e-6);

    // after updating Q, the gradient with respect to every Q_u vanishes
    auto q1 = bw::update_q(prob, g0);
    for (const auto &gq : bw::grad_q(prob, g0, q1))
        CHECK(frobenius_norm(gq) <= 1e-6);

    // normal-equation residuals (relative)
    {
        RMat a = mul(adjoint(prob.x), prob.x);
        RMat rhs(prob.x.cols(), prob.f_s.rows());
        RMat lhs = scale(g1, prob.rho1);
        for (std::size_t u = 0; u < prob.tasks(); ++u) {
            RMat m_u = mul(mul(prob.f_s, q0[u]), prob.f_u[u]);
            rhs = add(rhs, mul(mul(adjoint(prob.x), prob.y[u]), adjoint(m_u)));
            lhs = add(lhs, mul(mul(a, g1), mul(m_u, adjoint(m_u))));
        }
        CHECK(frobenius_norm(sub(lhs, rhs)) <= 1e-9 * frobenius_norm(rhs));
    }

    // penalty dominance: huge rho squashes G
    BlockwiseProblem<double> heavy = prob;
    heavy.rho1 = 1e12;
    RMat tinyg = bw::update_g(heavy, q0);
    CHECK(frobenius_norm(tinyg) <= 1e-9);
}

TEST_CASE("each half-update never increases the objective")
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto prob = spec_problem(100 + seed);
        auto [g, q] = bw::random_init(prob, seed);
        double f0 = bw::objective(prob, g, q);
        auto q1 = bw::update_q(prob, g);
        double f1 = bw::objective(prob, g, q1);
        CHECK(f1 <= f0 + 1e-10);
        RMat g1 = bw::update_g(prob, q1);
        double f2 = bw::objective(prob, g1, q1);
        CHECK(f2 <= f1 + 1e-10);
    }
}

TEST_CASE("alternate: monotone trace, stationarity, and the descent oracle")
{
    auto prob = spec_problem(7);
    auto [g0, q0] = bw::random_init(prob, 70);
    auto st = bw::alternate(prob, g0, q0, 100000, 1e-16, 5e-7);
    CHECK(st.converged);
    for (std::size_t i = 1; i < st.objective_trace.size(); ++i)
        CHECK(st.objective_trace[i] <= st.objective_trace[i - 1] + 1e-10);

    // finite-difference stationarity at the terminal point
    CHECK(fd_grad_norm(prob, st.g, st.q) <= 1e-6);

    // joint gradient descent from the same start reaches the same objective
    double f_gd = gd_oracle(prob, g0, q0);
    double f_ao = st.objective_trace.back();
    CHECK(std::abs(f_ao - f_gd) <= 1e-6 * std::max(1.0, std::abs(f_gd)));
}

TEST_CASE("restarting at a stationary point terminates immediately")
{
    auto prob = spec_problem(8);
    auto st = bw::alternate(prob, 80u, 3000, 1e-12);
    REQUIRE(st.converged);
    auto again = bw::alternate(prob, st.g, st.q, 50, 1e-10);
    CHECK(again.converged);
    CHECK(again.iterations == 1);
}

TEST_CASE("lipschitz bounds hold over random gradient probes")
{
    auto prob = spec_problem(9);
    auto [g, q] = bw::random_init(prob, 90);
    auto [lg, lq] = bw::lipschitz_estimates(prob, g, q);

    Rng rng(900);
    RMat base_g = bw::grad_g(prob, g, q, false); // data term only
    for (int t = 0; t < 1000; ++t) {
        RMat delta = bw::random_matrix<double>(g.rows(), g.cols(), rng, rng.uniform(0.01, 10.0));
        RMat moved = bw::grad_g(prob, add(g, delta), q, false);
        CHECK(frobenius_norm(sub(moved, base_g)) <=
              lg * frobenius_norm(delta) * (1.0 + 1e-12));
    }

    auto base_q = bw::grad_q(prob, g, q, false);
    for (int t = 0; t < 1000; ++t) {
        std::vector<RMat> qd(q.size());
        double d2 = 0.0;
        for (std::size_t u = 0; u < q.size(); ++u) {
            qd[u] = bw::random_matrix<double>(q[u].rows(), q[u].cols(), rng,
                                              rng.uniform(0.01, 10.0));
            double n = frobenius_norm(qd[u]);
            d2 += n * n;
        }
        std::vector<RMat> q_moved = q;
        for (std::size_t u = 0; u < q.size(); ++u)
            q_moved[u] = add(q[u], qd[u]);
        auto moved = bw::grad_q(prob, g, q_moved, false);
        double diff2 = 0.0;
        for (std::size_t u = 0; u < q.size(); ++u) {
            double n = frobenius_norm(sub(moved[u], base_q[u]));
            diff2 += n * n;
        }
        CHECK(std::sqrt(diff2) <= lq * std::sqrt(d2) * (1.0 + 1e-12));
    }

    // zero task weights kill the G-side curvature entirely
    std::vector<RMat> zq;
    for (std::size_t u = 0; u < prob.tasks(); ++u)
        zq.emplace_back(prob.f_s.cols(), prob.f_u[u].rows());
    auto [lg0, lq0] = bw::lipschitz_estimates(prob, g, zq);
    CHECK(lg0 == 0.0);
    CHECK(lq0 > 0.0);
}

TEST_CASE("complex instantiation works through the same code path")
{
    bw::ProblemDims dims;
    dims.v = 8;
    dims.r = 3;
    dims.n = 3;
    dims.q = 2;
    dims.d = {2, 2};
    dims.p = {2, 2};
    auto prob = bw::make_random_problem<cxd>(dims, 0.2, 0.2, 41);
    // the complex coupling converges linearly but slowly; give it room
    auto st = bw::alternate(prob, 42u, 4000, 1e-13);
    CHECK(st.converged);
    for (std::size_t i = 1; i < st.objective_trace.size(); ++i)
        CHECK(st.objective_trace[i] <= st.objective_trace[i - 1] + 1e-10);
    CHECK(st.grad_norm_trace.back() <= 1e-4);
}

TEST_CASE("identity-map preset and validation errors")
{
    bw::ProblemDims dims;
    dims.n = 4;
    dims.q = 4;
    dims.d = {2};
    dims.p = {2};
    auto prob = bw::make_random_problem<double>(dims, 0.1, 0.1, 50, true);
    for (std::size_t i = 0; i < prob.f_s.rows(); ++i)
        for (std::size_t j = 0; j < prob.f_s.cols(); ++j)
            CHECK(prob.f_s(i, j) == (i == j ? 1.0 : 0.0));

    BlockwiseProblem<double> bad = prob;
    bad.rho1 = 0.0;
    CHECK_THROWS_AS(bad.validate(), config_error);
}
