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

#include <doctest.h>

#include <cmath>

using namespace ngma;

namespace {

CMatrix random_hermitian(Rng &rng, std::size_t n) {
    CMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = rng.normal();
        for (std::size_t j = i + 1; j < n; ++j) {
            a(i, j) = rng.cnormal();
            a(j, i) = std::conj(a(i, j));
        }
    }
    return a;
}

CMatrix random_psd(Rng &rng, std::size_t n, std::size_t rank) {
    CMatrix b(n, rank);
    for (auto &v : b.data())
        v = rng.cnormal();
    return b * b.adjoint();
}

CMatrix reconstruct(const HermitianEig &e) {
    const std::size_t n = e.values.size();
    CMatrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        d(i, i) = e.values[i];
    return e.vectors * d * e.vectors.adjoint();
}

double min_eig(const CMatrix &a) { return eig_hermitian(a).values.front(); }

} // namespace

TEST_CASE("eig: identity and diagonal") {
    const HermitianEig id = eig_hermitian(CMatrix::identity(3));
    CHECK(id.values == rvec{1.0, 1.0, 1.0});

    const HermitianEig d = eig_hermitian(CMatrix::diag({cd(-1.0), cd(2.0)}));
    CHECK(d.values[0] == doctest::Approx(-1.0));
    CHECK(d.values[1] == doctest::Approx(2.0));
    CHECK(std::abs(d.vectors(0, 0)) == doctest::Approx(1.0));
    CHECK(std::abs(d.vectors(1, 1)) == doctest::Approx(1.0));
}

TEST_CASE("eig: reconstruction and orthonormality up to 32x32") {
    Rng rng(11);
    for (std::size_t n : {1u, 2u, 5u, 9u, 16u, 32u}) {
        const CMatrix a = random_hermitian(rng, n);
        const HermitianEig e = eig_hermitian(a);
        CHECK((a - reconstruct(e)).frobenius_norm() <= 1e-8 * a.frobenius_norm());
        CHECK((e.vectors.adjoint() * e.vectors - CMatrix::identity(n)).frobenius_norm() <= 1e-8);
        for (std::size_t i = 0; i + 1 < n; ++i)
            CHECK(e.values[i] <= e.values[i + 1]);
        for (std::size_t i = 0; i < n; ++i) {
            const cvec v = e.vectors.col(i);
            const cvec r = axpy(cd(-e.values[i]), v, a * v);
            CHECK(norm(r) <= 1e-8 * std::max(1.0, a.frobenius_norm()));
        }
    }
}

TEST_CASE("eig: rejects bad input") {
    CHECK_THROWS_AS(eig_hermitian(CMatrix(2, 3)), std::invalid_argument);
    CMatrix a = CMatrix::identity(2);
    a(0, 1) = cd(std::nan(""), 0.0);
    CHECK_THROWS_AS(eig_hermitian(a), std::invalid_argument);
    CHECK_THROWS_AS(psd_project(CMatrix(3, 1)), std::invalid_argument);
}

TEST_CASE("psd_project: fixed point and clipping") {
    Rng rng(5);
    const CMatrix p = random_psd(rng, 4, 2);
    CHECK((psd_project(p) - p).frobenius_norm() <= 1e-10 * std::max(1.0, p.frobenius_norm()));
    const CMatrix c = psd_project(CMatrix::diag({cd(-1.0), cd(2.0)}));
    CHECK((c - CMatrix::diag({cd(0.0), cd(2.0)})).frobenius_norm() <= 1e-12);
}

TEST_CASE("psd_project: nearest among sampled PSD matrices") {
    Rng rng(21);
    for (int rep = 0; rep < 3; ++rep) {
        const CMatrix a = random_hermitian(rng, 4);
        const CMatrix proj = psd_project(a);
        CHECK(min_eig(proj) >= -1e-10);
        const double best = (a - proj).frobenius_norm();
        for (int s = 0; s < 1000; ++s) {
            // PSD candidates near the projection and far from it.
            const double t = std::pow(10.0, rng.uniform(-4.0, 0.5));
            const CMatrix cand = s % 2 ? proj + cd(t) * random_psd(rng, 4, 1 + s % 4)
                                       : psd_project(proj + cd(t) * random_hermitian(rng, 4));
            CHECK((a - cand).frobenius_norm() >= best - 1e-10);
        }
    }
}

TEST_CASE("psd_project: random Hermitian up to 32x32") {
    Rng rng(8);
    for (std::size_t n : {3u, 12u, 32u}) {
        const CMatrix proj = psd_project(random_hermitian(rng, n));
        CHECK(min_eig(proj) >= -1e-10 * std::max(1.0, proj.frobenius_norm()));
    }
}

TEST_CASE("dominant_eigvec") {
    const cvec h{cd(1.0), cd(0.0, 1.0)};
    const DominantEig r1 = dominant_eigvec(CMatrix::outer(h, h));
    CHECK(r1.value == doctest::Approx(2.0));
    CHECK(norm(r1.vector) == doctest::Approx(1.0));
    CHECK(std::abs(dot(r1.vector, h)) == doctest::Approx(norm(h)));
    CHECK_FALSE(r1.degenerate);

    const DominantEig id = dominant_eigvec(CMatrix::identity(2));
    CHECK(id.value == doctest::Approx(1.0));
    CHECK(std::abs(id.vector[0]) == doctest::Approx(1.0));
    CHECK(std::abs(id.vector[1]) == doctest::Approx(0.0));

    const DominantEig z = dominant_eigvec(CMatrix(3, 3));
    CHECK(z.degenerate);
    CHECK(z.value == 0.0);

    Rng rng(3);
    for (int rep = 0; rep < 10; ++rep) {
        const CMatrix a = random_psd(rng, 6, 6);
        const HermitianEig full = eig_hermitian(a);
        const DominantEig top = dominant_eigvec(a);
        CHECK(top.value == doctest::Approx(full.values.back()).epsilon(1e-10));
        CHECK(std::abs(dot(top.vector, full.vectors.col(5))) == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("db_convert") {
    CHECK(db_to_linear(0.0) == 1.0);
    CHECK(db_to_linear(-117.0) == doctest::Approx(1.995262315e-12).epsilon(1e-9));
    CHECK(db_to_linear(30.0) == doctest::Approx(1000.0).epsilon(1e-14));
    for (double x = -200.0; x <= 200.0; x += 0.37)
        CHECK(std::abs(linear_to_db(db_to_linear(x)) - x) <= 1e-12);
    CHECK_THROWS_AS(linear_to_db(0.0), std::domain_error);
    CHECK_THROWS_AS(linear_to_db(-1.0), std::domain_error);
}

TEST_CASE("Rng: same seed, same stream") {
    Rng a(77), b(77), c(78);
    bool differs = false;
    for (int i = 0; i < 1000; ++i) {
        const double x = a.uniform();
        CHECK(x == b.uniform());
        const cd z = a.cnormal();
        CHECK(z == b.cnormal());
        differs = differs || x != c.uniform();
    }
    CHECK(differs);
    Rng s1 = Rng(5).split(2), s2 = Rng(5).split(2), s3 = Rng(5).split(3);
    const auto v1 = s1.next_u64();
    CHECK(v1 == s2.next_u64());
    CHECK(v1 != s3.next_u64());
    CHECK_THROWS_AS(a.uniform_index(0), std::invalid_argument);
}

TEST_CASE("Rng: moments") {
    Rng r(9);
    const int n = 200000;
    double s = 0.0, s2 = 0.0, cpow = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = r.normal();
        s += x;
        s2 += x * x;
        cpow += std::norm(r.cnormal());
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(std::abs(cpow / n - 1.0) < 0.02);
}

TEST_CASE("real kernels") {
    RMatrix a(2, 2);
    a(0, 0) = 2.0;
    a(0, 1) = 1.0;
    a(1, 0) = 1.0;
    a(1, 1) = 3.0;
    const rvec x = solve_linear(a, {3.0, 5.0});
    CHECK(x[0] == doctest::Approx(0.8));
    CHECK(x[1] == doctest::Approx(1.4));
    CHECK_THROWS_AS(solve_linear(RMatrix(2, 2), {1.0, 1.0}), std::runtime_error);

    RMatrix row(1, 3);
    row(0, 0) = 1.0;
    row(0, 1) = 1.0;
    row(0, 2) = 1.0;
    const RMatrix z = nullspace(row);
    REQUIRE(z.cols() == 2);
    const RMatrix az = row * z;
    CHECK(std::abs(az(0, 0)) < 1e-14);
    CHECK(std::abs(az(0, 1)) < 1e-14);
    const RMatrix g = z.transpose() * z;
    CHECK(g(0, 0) == doctest::Approx(1.0));
    CHECK(std::abs(g(0, 1)) < 1e-14);

    Rng rng(4);
    const CMatrix h = random_psd(rng, 4, 4) + CMatrix::identity(4);
    const cvec b{cd(1.0), cd(0.0, 2.0), cd(-1.0, 1.0), cd(0.5)};
    const cvec y = solve_hpd(h, b);
    CHECK(norm(axpy(cd(-1.0), b, h * y)) < 1e-12);
}

TEST_CASE("vector helpers") {
    const cvec a{cd(1.0, 1.0), cd(2.0)}, b{cd(0.0, 1.0), cd(1.0)};
    CHECK(dot(a, b) == cd(3.0, 1.0));
    CHECK(norm2(a) == 6.0);
    const cvec k = kron(cvec{cd(1.0), cd(2.0)}, cvec{cd(3.0), cd(4.0)});
    CHECK(k == cvec{cd(3.0), cd(4.0), cd(6.0), cd(8.0)});
    CHECK_THROWS_AS(dot(a, cvec{cd(1.0)}), std::invalid_argument);
}
