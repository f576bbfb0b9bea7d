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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <vector>

namespace ngma {

using cd = std::complex<double>;
using cvec = std::vector<cd>;
using rvec = std::vector<double>;

// Dense complex matrix, row-major.
class CMatrix {
  public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols, cd fill = cd(0.0, 0.0));
    CMatrix(std::size_t rows, std::size_t cols, cvec entries);
    CMatrix(std::initializer_list<std::initializer_list<cd>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix diag(const cvec &d);
    static CMatrix outer(const cvec &a, const cvec &b); // a b^H
    static CMatrix column(const cvec &v);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }
    const cvec &data() const { return data_; }
    cvec &data() { return data_; }

    cd &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cd &operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cvec col(std::size_t j) const;
    cvec row(std::size_t i) const;
    void set_col(std::size_t j, const cvec &v);

    CMatrix adjoint() const;
    CMatrix transpose() const;
    double frobenius_norm() const;
    cd trace() const;
    bool all_finite() const;

    CMatrix &operator+=(const CMatrix &o);
    CMatrix &operator-=(const CMatrix &o);
    CMatrix &operator*=(cd s);

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    cvec data_;
};

CMatrix operator+(CMatrix a, const CMatrix &b);
CMatrix operator-(CMatrix a, const CMatrix &b);
CMatrix operator*(const CMatrix &a, const CMatrix &b);
CMatrix operator*(cd s, CMatrix a);
cvec operator*(const CMatrix &a, const cvec &x);

// Vector helpers. dot(a, b) = a^H b.
cd dot(const cvec &a, const cvec &b);
double norm2(const cvec &a); // squared Euclidean norm
double norm(const cvec &a);
cvec axpy(cd alpha, const cvec &x, const cvec &y); // alpha x + y
cvec scaled(const cvec &x, cd alpha);
cvec kron(const cvec &a, const cvec &b);

struct HermitianEig {
    rvec values;     // ascending
    CMatrix vectors; // orthonormal columns, column i pairs with values[i]
};

// Cyclic Jacobi. The input is symmetrized before factoring. Ties in the
// spectrum keep the lowest-index pivot first.
HermitianEig eig_hermitian(const CMatrix &a);

// Frobenius-nearest PSD matrix (negative eigenvalues clipped).
CMatrix psd_project(const CMatrix &a);

struct DominantEig {
    double value = 0.0;
    cvec vector;
    bool degenerate = false; // zero matrix
};

// Largest eigenpair; on ties the lowest-index basis direction wins.
DominantEig dominant_eigvec(const CMatrix &a);

enum class DbDirection { ToLinear, ToDb };

double db_convert(double x, DbDirection direction);
inline double db_to_linear(double db) { return db_convert(db, DbDirection::ToLinear); }
inline double linear_to_db(double x) { return db_convert(x, DbDirection::ToDb); }

// Deterministic random stream. mt19937_64 output is fixed by the standard;
// the uniform/normal transforms below are ours so results do not depend on
// the standard library vendor.
class Rng {
  public:
    explicit Rng(std::uint64_t seed = 0);

    std::uint64_t seed() const { return seed_; }
    Rng split(std::uint64_t stream) const;

    std::uint64_t next_u64();
    double uniform();                    // [0, 1)
    double uniform(double lo, double hi); // [lo, hi)
    std::size_t uniform_index(std::size_t n);
    double normal();                     // N(0, 1)
    cd cnormal();                        // CN(0, 1)

  private:
    std::uint64_t seed_;
    std::uint64_t splits_ = 0;
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v);

// Small dense real matrix used by the convex kernel.
class RMatrix {
  public:
    RMatrix() = default;
    RMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);

    static RMatrix identity(std::size_t n);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    double &operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    const rvec &data() const { return data_; }

    RMatrix transpose() const;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    rvec data_;
};

RMatrix operator*(const RMatrix &a, const RMatrix &b);
rvec operator*(const RMatrix &a, const rvec &x);

// LU with partial pivoting. Throws std::runtime_error on a singular system.
rvec solve_linear(RMatrix a, rvec b);

// Orthonormal basis of {x : A x = 0}, columns of the result. Rank is decided
// with the given relative tolerance.
RMatrix nullspace(const RMatrix &a, double rel_tol = 1e-12);

// Cholesky solve of a Hermitian positive definite system.
cvec solve_hpd(const CMatrix &a, const cvec &b);

double dot(const rvec &a, const rvec &b);
double norm(const rvec &a);
double norm_inf(const rvec &a);

} // namespace ngma
