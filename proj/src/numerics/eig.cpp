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
#include <numeric>
#include <string>

namespace ngma {

namespace {

void check_square_finite(const CMatrix &a, const char *who) {
    if (!a.square())
        throw std::invalid_argument(std::string(who) + ": matrix is not square");
    if (!a.all_finite())
        throw std::invalid_argument(std::string(who) + ": non-finite entries");
}

double off_diagonal_norm2(const CMatrix &a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            if (i != j)
                s += std::norm(a(i, j));
    return s;
}

} // namespace

HermitianEig eig_hermitian(const CMatrix &input) {
    check_square_finite(input, "eig_hermitian");
    const std::size_t n = input.rows();

    CMatrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i) = input(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            a(i, j) = 0.5 * (input(i, j) + std::conj(input(j, i)));
            a(j, i) = std::conj(a(i, j));
        }
    }
    CMatrix v = CMatrix::identity(n);

    const double scale = std::max(a.frobenius_norm(), 1e-300);
    const double target = 1e-30 * scale * scale;

    for (int sweep = 0; sweep < 100; ++sweep) {
        if (off_diagonal_norm2(a) <= target)
            break;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double mag = std::abs(a(p, q));
                if (mag <= 1e-300)
                    continue;
                const cd phase = a(p, q) / mag; // e^{i phi}
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();

                // Real symmetric 2x2 [[app, mag], [mag, aqq]] after phasing.
                const double tau = (aqq - app) / (2.0 * mag);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;

                // Unitary 2x2 block G = diag(1, conj(phase)) * [[c, s], [-s, c]].
                const cd gpp = c;
                const cd gpq = s;
                const cd gqp = -s * std::conj(phase);
                const cd gqq = c * std::conj(phase);

                for (std::size_t k = 0; k < n; ++k) {
                    const cd akp = a(k, p);
                    const cd akq = a(k, q);
                    a(k, p) = akp * gpp + akq * gqp;
                    a(k, q) = akp * gpq + akq * gqq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cd apk = a(p, k);
                    const cd aqk = a(q, k);
                    a(p, k) = std::conj(gpp) * apk + std::conj(gqp) * aqk;
                    a(q, k) = std::conj(gpq) * apk + std::conj(gqq) * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();

                for (std::size_t k = 0; k < n; ++k) {
                    const cd vkp = v(k, p);
                    const cd vkq = v(k, q);
                    v(k, p) = vkp * gpp + vkq * gqp;
                    v(k, q) = vkp * gpq + vkq * gqq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    HermitianEig out;
    out.values.resize(n);
    out.vectors = CMatrix(n, n);
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        out.values[c] = a(src, src).real();
        for (std::size_t r = 0; r < n; ++r)
            out.vectors(r, c) = v(r, src);
    }
    return out;
}

CMatrix psd_project(const CMatrix &a) {
    if (!a.square())
        throw std::invalid_argument("psd_project: matrix is not square");
    const HermitianEig e = eig_hermitian(a);
    const std::size_t n = a.rows();
    CMatrix out(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = e.values[k];
        if (lam <= 0.0)
            continue;
        for (std::size_t i = 0; i < n; ++i) {
            const cd vi = e.vectors(i, k) * lam;
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += vi * std::conj(e.vectors(j, k));
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out(i, i) = out(i, i).real();
        for (std::size_t j = i + 1; j < n; ++j) {
            const cd m = 0.5 * (out(i, j) + std::conj(out(j, i)));
            out(i, j) = m;
            out(j, i) = std::conj(m);
        }
    }
    return out;
}

DominantEig dominant_eigvec(const CMatrix &a) {
    check_square_finite(a, "dominant_eigvec");
    const std::size_t n = a.rows();
    DominantEig out;
    if (n == 0) {
        out.degenerate = true;
        return out;
    }
    if (a.frobenius_norm() == 0.0) {
        out.degenerate = true;
        out.vector.assign(n, 0.0);
        out.vector[0] = 1.0;
        return out;
    }
    const HermitianEig e = eig_hermitian(a);
    const double top = e.values.back();
    const double tie = 1e-12 * std::abs(top);
    // Stable sort keeps tied eigenvalues in pivot order, so the first member
    // of the top cluster is the lowest-index one.
    std::size_t pick = n - 1;
    while (pick > 0 && top - e.values[pick - 1] <= tie)
        --pick;
    out.value = e.values[pick];
    out.vector = e.vectors.col(pick);
    return out;
}

} // namespace ngma
