// SPDX-License-Identifier: Apache-2.0
//
// ngma-alloc: resource allocation toolkit for next-generation multiple access
// Copyright (C) 2026 The ngma-alloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ngma/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace ngma {

RMatrix::RMatrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

RMatrix RMatrix::identity(std::size_t n) {
    RMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

RMatrix RMatrix::transpose() const {
    RMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            t(j, i) = (*this)(i, j);
    return t;
}

RMatrix operator*(const RMatrix &a, const RMatrix &b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("RMatrix: shape mismatch in *");
    RMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

rvec operator*(const RMatrix &a, const rvec &x) {
    if (a.cols() != x.size())
        throw std::invalid_argument("RMatrix: shape mismatch in matvec");
    rvec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

rvec solve_linear(RMatrix a, rvec b) {
    const std::size_t n = a.rows();
    if (a.cols() != n || b.size() != n)
        throw std::invalid_argument("solve_linear: shape mismatch");
    double amax = 0.0;
    for (double v : a.data())
        amax = std::max(amax, std::abs(v));
    const double tiny = 1e-300 + 1e-15 * amax;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > std::abs(a(piv, k)))
                piv = i;
        if (std::abs(a(piv, k)) <= tiny)
            throw std::runtime_error("solve_linear: singular system");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j)
                std::swap(a(k, j), a(piv, j));
            std::swap(b[k], b[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0)
                continue;
            for (std::size_t j = k; j < n; ++j)
                a(i, j) -= f * a(k, j);
            b[i] -= f * b[k];
        }
    }
    rvec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t j = ii + 1; j < n; ++j)
            s -= a(ii, j) * x[j];
        x[ii] = s / a(ii, ii);
    }
    return x;
}

RMatrix nullspace(const RMatrix &a, double rel_tol) {
    const std::size_t n = a.cols();
    // Gram-Schmidt on the rows of A gives an orthonormal basis of the row
    // space; the complement is completed from the standard basis.
    std::vector<rvec> basis;
    double scale = 0.0;
    for (double v : a.data())
        scale = std::max(scale, std::abs(v));
    const double tol = rel_tol * std::max(scale, 1e-300) * std::sqrt(static_cast<double>(n) + 1.0);
    auto orthogonalize = [&](rvec v) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto &q : basis) {
                const double d = dot(q, v);
                for (std::size_t i = 0; i < n; ++i)
                    v[i] -= d * q[i];
            }
        return v;
    };
    for (std::size_t r = 0; r < a.rows(); ++r) {
        rvec v(n);
        for (std::size_t j = 0; j < n; ++j)
            v[j] = a(r, j);
        v = orthogonalize(v);
        const double nv = norm(v);
        if (nv > tol) {
            for (auto &x : v)
                x /= nv;
            basis.push_back(v);
        }
    }
    const std::size_t rank = basis.size();
    std::vector<rvec> null;
    for (std::size_t e = 0; e < n && null.size() < n - rank; ++e) {
        rvec v(n, 0.0);
        v[e] = 1.0;
        v = orthogonalize(v);
        const double nv = norm(v);
        if (nv > 1e-8) {
            for (auto &x : v)
                x /= nv;
            basis.push_back(v);
            null.push_back(v);
        }
    }
    RMatrix z(n, null.size());
    for (std::size_t c = 0; c < null.size(); ++c)
        for (std::size_t i = 0; i < n; ++i)
            z(i, c) = null[c][i];
    return z;
}

cvec solve_hpd(const CMatrix &a, const cvec &b) {
    const std::size_t n = a.rows();
    if (!a.square() || b.size() != n)
        throw std::invalid_argument("solve_hpd: shape mismatch");
    CMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k)
            d -= std::norm(l(j, k));
        if (!(d > 0.0))
            throw std::runtime_error("solve_hpd: matrix not positive definite");
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            cd s = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / ljj;
        }
    }
    cvec y(n);
    for (std::size_t i = 0; i < n; ++i) {
        cd s = b[i];
        for (std::size_t k = 0; k < i; ++k)
            s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    cvec x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        cd s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k)
            s -= std::conj(l(k, ii)) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

double dot(const rvec &a, const rvec &b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double norm(const rvec &a) { return std::sqrt(dot(a, a)); }

double norm_inf(const rvec &a) {
    double m = 0.0;
    for (double v : a)
        m = std::max(m, std::abs(v));
    return m;
}

} // namespace ngma
