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

#include <cmath>
#include <utility>

namespace ngma {

CMatrix::CMatrix(std::size_t rows, std::size_t cols, cd fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

CMatrix::CMatrix(std::size_t rows, std::size_t cols, cvec entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
    if (data_.size() != rows_ * cols_)
        throw std::invalid_argument("CMatrix: entry count does not match shape");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cd>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
        if (r.size() != cols_)
            throw std::invalid_argument("CMatrix: ragged initializer");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diag(const cvec &d) {
    CMatrix m(d.size(), d.size());
    for (std::size_t i = 0; i < d.size(); ++i)
        m(i, i) = d[i];
    return m;
}

CMatrix CMatrix::outer(const cvec &a, const cvec &b) {
    CMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            m(i, j) = a[i] * std::conj(b[j]);
    return m;
}

CMatrix CMatrix::column(const cvec &v) { return CMatrix(v.size(), 1, v); }

cvec CMatrix::col(std::size_t j) const {
    cvec v(rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        v[i] = (*this)(i, j);
    return v;
}

cvec CMatrix::row(std::size_t i) const {
    return cvec(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
}

void CMatrix::set_col(std::size_t j, const cvec &v) {
    if (v.size() != rows_)
        throw std::invalid_argument("CMatrix::set_col: length mismatch");
    for (std::size_t i = 0; i < rows_; ++i)
        (*this)(i, j) = v[i];
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            m(j, i) = std::conj((*this)(i, j));
    return m;
}

CMatrix CMatrix::transpose() const {
    CMatrix m(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j)
            m(j, i) = (*this)(i, j);
    return m;
}

double CMatrix::frobenius_norm() const {
    double s = 0.0;
    for (const auto &z : data_)
        s += std::norm(z);
    return std::sqrt(s);
}

cd CMatrix::trace() const {
    cd t = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i)
        t += (*this)(i, i);
    return t;
}

bool CMatrix::all_finite() const {
    for (const auto &z : data_)
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
            return false;
    return true;
}

CMatrix &CMatrix::operator+=(const CMatrix &o) {
    if (o.rows_ != rows_ || o.cols_ != cols_)
        throw std::invalid_argument("CMatrix: shape mismatch in +");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] += o.data_[i];
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &o) {
    if (o.rows_ != rows_ || o.cols_ != cols_)
        throw std::invalid_argument("CMatrix: shape mismatch in -");
    for (std::size_t i = 0; i < data_.size(); ++i)
        data_[i] -= o.data_[i];
    return *this;
}

CMatrix &CMatrix::operator*=(cd s) {
    for (auto &z : data_)
        z *= s;
    return *this;
}

CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
CMatrix operator*(cd s, CMatrix a) { return a *= s; }

CMatrix operator*(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("CMatrix: shape mismatch in *");
    CMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const cd aik = a(i, k);
            if (aik == cd(0.0, 0.0))
                continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

cvec operator*(const CMatrix &a, const cvec &x) {
    if (a.cols() != x.size())
        throw std::invalid_argument("CMatrix: shape mismatch in matvec");
    cvec y(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        cd s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

cd dot(const cvec &a, const cvec &b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    cd s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(const cvec &a) {
    double s = 0.0;
    for (const auto &z : a)
        s += std::norm(z);
    return s;
}

double norm(const cvec &a) { return std::sqrt(norm2(a)); }

cvec axpy(cd alpha, const cvec &x, const cvec &y) {
    if (x.size() != y.size())
        throw std::invalid_argument("axpy: length mismatch");
    cvec r(y);
    for (std::size_t i = 0; i < x.size(); ++i)
        r[i] += alpha * x[i];
    return r;
}

cvec scaled(const cvec &x, cd alpha) {
    cvec r(x);
    for (auto &z : r)
        z *= alpha;
    return r;
}

cvec kron(const cvec &a, const cvec &b) {
    cvec r;
    r.reserve(a.size() * b.size());
    for (const auto &x : a)
        for (const auto &y : b)
            r.push_back(x * y);
    return r;
}

double db_convert(double x, DbDirection direction) {
    if (direction == DbDirection::ToLinear)
        return std::pow(10.0, x / 10.0);
    if (!(x > 0.0))
        throw std::domain_error("db_convert: to-dB needs a positive input");
    return 10.0 * std::log10(x);
}

} // namespace ngma
