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
// Small dense matrices over double or complex<double>. Everything here is
// deliberately loop-based: the matrices in this project are tiny (K x K Gram
// matrices, N_r x M channels at desk scale) and deterministic evaluation
// order matters more than BLAS throughput.

#ifndef RISBEAM_LINALG_HPP
#define RISBEAM_LINALG_HPP

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "risbeam/common.hpp"

namespace risbeam {

template <typename T> struct field_traits {
    static double abs(T v) { return std::abs(v); }
    static T conj(T v) { return v; }
    static double real(T v) { return v; }
};
template <> struct field_traits<cxd> {
    static double abs(cxd v) { return std::abs(v); }
    static cxd conj(cxd v) { return std::conj(v); }
    static double real(cxd v) { return v.real(); }
};

template <typename T>
class Mat {
  public:
    Mat() = default;
    Mat(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), v_(rows * cols, fill) {}

    static Mat identity(std::size_t n)
    {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return v_.size(); }

    T &operator()(std::size_t i, std::size_t j) { return v_[i * cols_ + j]; }
    const T &operator()(std::size_t i, std::size_t j) const { return v_[i * cols_ + j]; }

    T *data() { return v_.data(); }
    const T *data() const { return v_.data(); }
    T *row(std::size_t i) { return v_.data() + i * cols_; }
    const T *row(std::size_t i) const { return v_.data() + i * cols_; }

    bool operator==(const Mat &o) const { return rows_ == o.rows_ && cols_ == o.cols_ && v_ == o.v_; }

  private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<T> v_;
};

using CMat = Mat<cxd>;
using RMat = Mat<double>;

template <typename T>
Mat<T> mul(const Mat<T> &a, const Mat<T> &b)
{
    if (a.cols() != b.rows())
        throw std::invalid_argument("mul: inner dimensions differ");
    Mat<T> c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            T aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

// conjugate transpose (plain transpose for real T)
template <typename T>
Mat<T> adjoint(const Mat<T> &a)
{
    Mat<T> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = field_traits<T>::conj(a(i, j));
    return t;
}

template <typename T>
Mat<T> transpose(const Mat<T> &a)
{
    Mat<T> t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            t(j, i) = a(i, j);
    return t;
}

template <typename T>
Mat<T> add(const Mat<T> &a, const Mat<T> &b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("add: shape mismatch");
    Mat<T> c = a;
    for (std::size_t i = 0; i < c.size(); ++i)
        c.data()[i] += b.data()[i];
    return c;
}

template <typename T>
Mat<T> sub(const Mat<T> &a, const Mat<T> &b)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("sub: shape mismatch");
    Mat<T> c = a;
    for (std::size_t i = 0; i < c.size(); ++i)
        c.data()[i] -= b.data()[i];
    return c;
}

template <typename T, typename S>
Mat<T> scale(const Mat<T> &a, S s)
{
    Mat<T> c = a;
    for (std::size_t i = 0; i < c.size(); ++i)
        c.data()[i] *= s;
    return c;
}

// A^H A
template <typename T>
Mat<T> gram(const Mat<T> &a)
{
    Mat<T> g(a.cols(), a.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            T s{};
            for (std::size_t k = 0; k < a.rows(); ++k)
                s += field_traits<T>::conj(a(k, i)) * a(k, j);
            g(i, j) = s;
        }
    return g;
}

template <typename T>
double frobenius_norm(const Mat<T> &a)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double m = field_traits<T>::abs(a.data()[i]);
        s += m * m;
    }
    return std::sqrt(s);
}

// real part of <a, b> = trace(a^H b); the usual inner product on matrices
template <typename T>
double inner_real(const Mat<T> &a, const Mat<T> &b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += field_traits<T>::real(field_traits<T>::conj(a.data()[i]) * b.data()[i]);
    return s;
}

template <typename T>
double norm1(const Mat<T> &a)
{
    double best = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.rows(); ++i)
            s += field_traits<T>::abs(a(i, j));
        best = std::max(best, s);
    }
    return best;
}

// LU factorization with partial pivoting. Determinants are kept in
// log-magnitude plus unit-modulus phase form so large K never overflows.
template <typename T>
struct Lu {
    Mat<T> lu;
    std::vector<std::size_t> piv;
    int swaps = 0;
    bool singular = false;
    double log_abs_det = 0.0; // -inf when singular
    T det_phase = T{1};       // unit modulus (or +-1 for real)
};

template <typename T>
Lu<T> lu_factor(Mat<T> a)
{
    const std::size_t n = a.rows();
    if (n != a.cols())
        throw std::invalid_argument("lu_factor: matrix must be square");
    Lu<T> f;
    f.piv.resize(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        double best = field_traits<T>::abs(a(c, c));
        for (std::size_t r = c + 1; r < n; ++r) {
            double m = field_traits<T>::abs(a(r, c));
            if (m > best) {
                best = m;
                p = r;
            }
        }
        f.piv[c] = p;
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a(c, j), a(p, j));
            ++f.swaps;
        }
        T pivot = a(c, c);
        double pm = field_traits<T>::abs(pivot);
        if (pm == 0.0) {
            f.singular = true;
            f.log_abs_det = -std::numeric_limits<double>::infinity();
            f.lu = std::move(a);
            return f;
        }
        f.log_abs_det += std::log(pm);
        f.det_phase *= pivot / T(pm);
        for (std::size_t r = c + 1; r < n; ++r) {
            T m = a(r, c) / pivot;
            a(r, c) = m;
            for (std::size_t j = c + 1; j < n; ++j)
                a(r, j) -= m * a(c, j);
        }
    }
    if (f.swaps % 2 == 1)
        f.det_phase = -f.det_phase;
    f.lu = std::move(a);
    return f;
}

// Solve A X = B given the factorization of A.
template <typename T>
Mat<T> lu_solve(const Lu<T> &f, Mat<T> b)
{
    if (f.singular)
        throw rank_deficiency_error("lu_solve: singular matrix", std::numeric_limits<double>::infinity());
    const std::size_t n = f.lu.rows();
    if (b.rows() != n)
        throw std::invalid_argument("lu_solve: shape mismatch");
    for (std::size_t c = 0; c < n; ++c)
        if (f.piv[c] != c)
            for (std::size_t j = 0; j < b.cols(); ++j)
                std::swap(b(c, j), b(f.piv[c], j));
    for (std::size_t c = 0; c < n; ++c) // forward, unit lower
        for (std::size_t r = c + 1; r < n; ++r) {
            T m = f.lu(r, c);
            for (std::size_t j = 0; j < b.cols(); ++j)
                b(r, j) -= m * b(c, j);
        }
    for (std::size_t c = n; c-- > 0;) { // backward, upper
        for (std::size_t j = 0; j < b.cols(); ++j)
            b(c, j) /= f.lu(c, c);
        for (std::size_t r = 0; r < c; ++r) {
            T m = f.lu(r, c);
            for (std::size_t j = 0; j < b.cols(); ++j)
                b(r, j) -= m * b(c, j);
        }
    }
    return b;
}

template <typename T>
Mat<T> inverse(const Mat<T> &a)
{
    return lu_solve(lu_factor(a), Mat<T>::identity(a.rows()));
}

// 1-norm condition estimate; +inf when singular.
template <typename T>
double cond1_estimate(const Mat<T> &a)
{
    auto f = lu_factor(a);
    if (f.singular)
        return std::numeric_limits<double>::infinity();
    Mat<T> inv = lu_solve(f, Mat<T>::identity(a.rows()));
    return norm1(a) * norm1(inv);
}

} // namespace risbeam

#endif
