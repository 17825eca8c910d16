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
// Blockwise convergence model of the multi-task network: shared weights G
// and per-task weights Q_u connected through fixed inner maps, a ridge
// penalty on both blocks, and alternating closed-form updates (Q first,
// then G). Each half-update minimizes a convex ridge problem exactly, so
// the objective never increases and the iterates reach a stationary point.
//
// The normal equations are Kronecker-structured; they are solved by
// conjugate gradients on the matrix-shaped operator
//   G  ->  sum_u (X^H X) G (M_u M_u^H) + rho1 G,       M_u = F_S Q_u F_u,
// never materializing the nr x nr system. Real instantiation matches the
// derivation; complex works through conjugate transposes.

#ifndef RISBEAM_BLOCKWISE_HPP
#define RISBEAM_BLOCKWISE_HPP

#include <cmath>
#include <optional>
#include <vector>

#include "risbeam/linalg.hpp"

namespace risbeam::bw {

template <typename T>
struct BlockwiseProblem {
    Mat<T> x;                // V x r inputs
    std::vector<Mat<T>> y;   // U targets, V x p_u
    Mat<T> f_s;              // n x q shared inner map
    std::vector<Mat<T>> f_u; // d_u x p_u task inner maps
    double rho1 = 0.1;
    double rho2 = 0.1;

    std::size_t tasks() const { return y.size(); }

    void validate() const
    {
        if (!(rho1 > 0.0) || !(rho2 > 0.0))
            throw config_error("penalty coefficients must be positive");
        if (y.size() != f_u.size() || y.empty())
            throw config_error("need one target and one inner map per task");
        for (std::size_t u = 0; u < y.size(); ++u) {
            if (y[u].rows() != x.rows())
                throw std::invalid_argument("target row count must match the input samples");
            if (f_u[u].cols() != y[u].cols())
                throw std::invalid_argument("task inner map must produce the target width");
        }
    }
};

template <typename T>
struct AoState {
    Mat<T> g;               // r x n
    std::vector<Mat<T>> q;  // q x d_u per task
    int iterations = 0;
    bool converged = false;
    std::vector<double> objective_trace; // objective after init and each iteration
    std::vector<double> grad_norm_trace; // joint gradient norm per iteration
    double lipschitz_g = 0.0;
    double lipschitz_q = 0.0;
};

// f0 + ridge penalties, exactly as written in the formulation.
template <typename T>
double objective(const BlockwiseProblem<T> &prob, const Mat<T> &g, const std::vector<Mat<T>> &q)
{
    double f = 0.0;
    Mat<T> xg = mul(prob.x, g);
    for (std::size_t u = 0; u < prob.tasks(); ++u) {
        Mat<T> pred = mul(mul(mul(xg, prob.f_s), q[u]), prob.f_u[u]);
        Mat<T> res = sub(pred, prob.y[u]);
        double r = frobenius_norm(res);
        f += 0.5 * r * r;
    }
    double gn = frobenius_norm(g);
    f += 0.5 * prob.rho1 * gn * gn;
    double qn2 = 0.0;
    for (const auto &qu : q) {
        double n = frobenius_norm(qu);
        qn2 += n * n;
    }
    f += 0.5 * prob.rho2 * qn2;
    return f;
}

// Gradient with respect to G (conjugate-gradient convention for complex
// scalars; plain gradient for real). include_penalty=false gives the
// gradient of the data term f0 alone, the quantity the Lipschitz bounds
// speak about.
template <typename T>
Mat<T> grad_g(const BlockwiseProblem<T> &prob, const Mat<T> &g, const std::vector<Mat<T>> &q,
              bool include_penalty = true)
{
    Mat<T> out = include_penalty ? scale(g, T(prob.rho1))
                                 : Mat<T>(g.rows(), g.cols());
    Mat<T> xg = mul(prob.x, g);
    for (std::size_t u = 0; u < prob.tasks(); ++u) {
        Mat<T> m_u = mul(mul(prob.f_s, q[u]), prob.f_u[u]); // n x p_u
        Mat<T> res = sub(mul(xg, m_u), prob.y[u]);          // V x p_u
        out = add(out, mul(mul(adjoint(prob.x), res), adjoint(m_u)));
    }
    return out;
}

template <typename T>
std::vector<Mat<T>> grad_q(const BlockwiseProblem<T> &prob, const Mat<T> &g,
                           const std::vector<Mat<T>> &q, bool include_penalty = true)
{
    std::vector<Mat<T>> out;
    Mat<T> xgf = mul(mul(prob.x, g), prob.f_s); // V x q
    Mat<T> xgf_h = adjoint(xgf);
    for (std::size_t u = 0; u < prob.tasks(); ++u) {
        Mat<T> res = sub(mul(mul(xgf, q[u]), prob.f_u[u]), prob.y[u]);
        Mat<T> data = mul(mul(xgf_h, res), adjoint(prob.f_u[u]));
        out.push_back(include_penalty ? add(scale(q[u], T(prob.rho2)), data) : data);
    }
    return out;
}

template <typename T>
double joint_grad_norm(const BlockwiseProblem<T> &prob, const Mat<T> &g,
                       const std::vector<Mat<T>> &q)
{
    double s = 0.0;
    double gn = frobenius_norm(grad_g(prob, g, q));
    s += gn * gn;
    for (const auto &gq : grad_q(prob, g, q)) {
        double n = frobenius_norm(gq);
        s += n * n;
    }
    return std::sqrt(s);
}

namespace detail {

// Conjugate gradients on a matrix-shaped SPD operator.
template <typename T, typename Op>
Mat<T> cg_solve(const Op &apply, const Mat<T> &rhs, double rel_tol, int max_iter)
{
    Mat<T> x(rhs.rows(), rhs.cols());
    Mat<T> res = rhs;
    Mat<T> p = res;
    double rs = inner_real(res, res);
    const double stop = rel_tol * rel_tol * rs;
    if (rs == 0.0)
        return x;
    for (int it = 0; it < max_iter; ++it) {
        Mat<T> ap = apply(p);
        double denom = inner_real(p, ap);
        if (!(denom > 0.0))
            break;
        double alpha = rs / denom;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x.data()[i] += T(alpha) * p.data()[i];
            res.data()[i] -= T(alpha) * ap.data()[i];
        }
        double rs_new = inner_real(res, res);
        if (rs_new <= stop)
            break;
        double beta = rs_new / rs;
        for (std::size_t i = 0; i < p.size(); ++i)
            p.data()[i] = res.data()[i] + T(beta) * p.data()[i];
        rs = rs_new;
    }
    return x;
}

constexpr double kCgTol = 1e-13;

} // namespace detail

// Exact minimizer over G with Q frozen: solves
// sum_u (X^H X) G (M_u M_u^H) + rho1 G = sum_u X^H Y_u M_u^H.
template <typename T>
Mat<T> update_g(const BlockwiseProblem<T> &prob, const std::vector<Mat<T>> &q)
{
    const std::size_t r = prob.x.cols(), n = prob.f_s.rows();
    Mat<T> a = mul(adjoint(prob.x), prob.x); // r x r
    std::vector<Mat<T>> b;                   // n x n per task
    Mat<T> rhs(r, n);
    for (std::size_t u = 0; u < prob.tasks(); ++u) {
        Mat<T> m_u = mul(mul(prob.f_s, q[u]), prob.f_u[u]);
        b.push_back(mul(m_u, adjoint(m_u)));
        rhs = add(rhs, mul(mul(adjoint(prob.x), prob.y[u]), adjoint(m_u)));
    }
    auto apply = [&](const Mat<T> &gm) {
        Mat<T> out = scale(gm, T(prob.rho1));
        Mat<T> ag = mul(a, gm);
        for (std::size_t u = 0; u < prob.tasks(); ++u)
            out = add(out, mul(ag, b[u]));
        return out;
    };
    const int max_iter = 20 * static_cast<int>(r * n) + 50;
    return detail::cg_solve<T>(apply, rhs, detail::kCgTol, max_iter);
}

// Exact minimizer over each Q_u with G frozen (tasks are independent):
// (F_S^H G^H X^H X G F_S) Q_u (F_u F_u^H) + rho2 Q_u = F_S^H G^H X^H Y_u F_u^H.
template <typename T>
std::vector<Mat<T>> update_q(const BlockwiseProblem<T> &prob, const Mat<T> &g)
{
    Mat<T> xgf = mul(mul(prob.x, g), prob.f_s); // V x q
    Mat<T> p = mul(adjoint(xgf), xgf);          // q x q
    std::vector<Mat<T>> out(prob.tasks());
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (std::int64_t u = 0; u < static_cast<std::int64_t>(prob.tasks()); ++u) {
        Mat<T> r_u = mul(prob.f_u[u], adjoint(prob.f_u[u])); // d_u x d_u
        Mat<T> rhs = mul(mul(adjoint(xgf), prob.y[u]), adjoint(prob.f_u[u]));
        auto apply = [&](const Mat<T> &qm) {
            return add(scale(qm, T(prob.rho2)), mul(mul(p, qm), r_u));
        };
        const int max_iter = 20 * static_cast<int>(rhs.size()) + 50;
        out[u] = detail::cg_solve<T>(apply, rhs, detail::kCgTol, max_iter);
    }
    return out;
}

// Frobenius bounds on the Kronecker-form Hessians of f0:
//   L_G = || sum_u M_u M_u^H ||_F * || X^H X ||_F
//   L_Q = || X G F_S ||^2-scaled per-task blocks, stacked.
template <typename T>
std::pair<double, double> lipschitz_estimates(const BlockwiseProblem<T> &prob, const Mat<T> &g,
                                              const std::vector<Mat<T>> &q)
{
    Mat<T> a = mul(adjoint(prob.x), prob.x);
    Mat<T> b_sum(prob.f_s.rows(), prob.f_s.rows());
    for (std::size_t u = 0; u < prob.tasks(); ++u) {
        Mat<T> m_u = mul(mul(prob.f_s, q[u]), prob.f_u[u]);
        b_sum = add(b_sum, mul(m_u, adjoint(m_u)));
    }
    double l_g = frobenius_norm(b_sum) * frobenius_norm(a);

    Mat<T> xgf = mul(mul(prob.x, g), prob.f_s);
    Mat<T> p = mul(adjoint(xgf), xgf);
    double pn = frobenius_norm(p);
    double sum_sq = 0.0;
    for (std::size_t u = 0; u < prob.tasks(); ++u) {
        double rn = frobenius_norm(mul(prob.f_u[u], adjoint(prob.f_u[u])));
        sum_sq += (rn * pn) * (rn * pn);
    }
    return {l_g, std::sqrt(sum_sq)};
}

template <typename T>
T random_scalar(Rng &rng)
{
    if constexpr (std::is_same_v<T, cxd>)
        return cxd(rng.normal(), rng.normal()) / std::sqrt(2.0);
    else
        return static_cast<T>(rng.normal());
}

template <typename T>
Mat<T> random_matrix(std::size_t rows, std::size_t cols, Rng &rng, double sc = 1.0)
{
    Mat<T> m(rows, cols);
    for (std::size_t i = 0; i < m.size(); ++i)
        m.data()[i] = T(sc) * random_scalar<T>(rng);
    return m;
}

// Largest singular value by power iteration on A^H A.
template <typename T>
double spectral_norm(const Mat<T> &a, int iters = 64)
{
    Mat<T> aha = mul(adjoint(a), a);
    Mat<T> v(aha.rows(), 1, T(1));
    double lambda = 0.0;
    for (int i = 0; i < iters; ++i) {
        v = mul(aha, v);
        lambda = frobenius_norm(v);
        if (lambda == 0.0)
            return 0.0;
        v = scale(v, 1.0 / lambda);
    }
    return std::sqrt(lambda);
}

struct ProblemDims {
    std::size_t v = 20, r = 6, n = 5, q = 4;
    std::vector<std::size_t> d{3, 3, 3};
    std::vector<std::size_t> p{2, 2, 2};
};

// Random instance; inner maps are scaled to unit spectral norm. With
// identity_maps, F_S and F_u become (rectangular) identities instead.
template <typename T>
BlockwiseProblem<T> make_random_problem(const ProblemDims &dims, double rho1, double rho2,
                                        std::uint64_t seed, bool identity_maps = false)
{
    if (dims.d.size() != dims.p.size() || dims.d.empty())
        throw config_error("need matching d_u / p_u lists");
    Rng rng(seed);
    BlockwiseProblem<T> prob;
    prob.rho1 = rho1;
    prob.rho2 = rho2;
    prob.x = random_matrix<T>(dims.v, dims.r, rng);
    auto unit_map = [&rng, identity_maps](std::size_t rows, std::size_t cols) {
        Mat<T> m(rows, cols);
        if (identity_maps) {
            for (std::size_t i = 0; i < std::min(rows, cols); ++i)
                m(i, i) = T(1);
            return m;
        }
        Rng &r = rng;
        m = random_matrix<T>(rows, cols, r);
        double sn = spectral_norm(m);
        return sn > 0.0 ? scale(m, 1.0 / sn) : m;
    };
    prob.f_s = unit_map(dims.n, dims.q);
    for (std::size_t u = 0; u < dims.d.size(); ++u) {
        prob.f_u.push_back(unit_map(dims.d[u], dims.p[u]));
        prob.y.push_back(random_matrix<T>(dims.v, dims.p[u], rng));
    }
    prob.validate();
    return prob;
}

template <typename T>
std::pair<Mat<T>, std::vector<Mat<T>>> random_init(const BlockwiseProblem<T> &prob,
                                                   std::uint64_t seed, double init_scale = 0.1)
{
    Rng rng(seed);
    Mat<T> g = random_matrix<T>(prob.x.cols(), prob.f_s.rows(), rng, init_scale);
    std::vector<Mat<T>> q;
    for (std::size_t u = 0; u < prob.tasks(); ++u)
        q.push_back(random_matrix<T>(prob.f_s.cols(), prob.f_u[u].rows(), rng, init_scale));
    return {std::move(g), std::move(q)};
}

// Alternating optimization, Q half-step first then G. Stops when the
// objective decrease falls below tol, when the joint gradient norm falls
// below grad_tol (0 disables that stop), or at max_iter. On some
// ill-conditioned instances the per-iteration decrease reaches the noise
// floor long before the iterate is stationary, so stationarity checks
// should stop on grad_tol rather than on tol alone.
template <typename T>
AoState<T> alternate(const BlockwiseProblem<T> &prob, const Mat<T> &g0,
                     const std::vector<Mat<T>> &q0, int max_iter, double tol,
                     double grad_tol = 0.0)
{
    prob.validate();
    if (max_iter < 1)
        throw std::invalid_argument("alternate: max_iter must be >= 1");
    if (!(tol > 0.0))
        throw std::invalid_argument("alternate: tol must be positive");

    AoState<T> st;
    st.g = g0;
    st.q = q0;
    st.objective_trace.push_back(objective(prob, st.g, st.q));
    for (int i = 0; i < max_iter; ++i) {
        st.q = update_q(prob, st.g);
        st.g = update_g(prob, st.q);
        double f = objective(prob, st.g, st.q);
        st.objective_trace.push_back(f);
        st.grad_norm_trace.push_back(joint_grad_norm(prob, st.g, st.q));
        st.iterations = i + 1;
        double decrease = st.objective_trace[i] - f;
        if (decrease < tol || st.grad_norm_trace.back() <= grad_tol) {
            st.converged = true;
            break;
        }
    }
    auto [lg, lq] = lipschitz_estimates(prob, st.g, st.q);
    st.lipschitz_g = lg;
    st.lipschitz_q = lq;
    return st;
}

template <typename T>
AoState<T> alternate(const BlockwiseProblem<T> &prob, std::uint64_t init_seed, int max_iter,
                     double tol, double grad_tol = 0.0)
{
    auto [g0, q0] = random_init(prob, init_seed);
    return alternate(prob, g0, q0, max_iter, tol, grad_tol);
}

} // namespace risbeam::bw

#endif
