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

#include "ngma/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ngma {

namespace {

// In-place Cholesky of a Hermitian matrix (lower factor). False if not PD.
bool cholesky(CMatrix &a) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k)
            d -= std::norm(a(j, k));
        if (!(d > 0.0))
            return false;
        d = std::sqrt(d);
        a(j, j) = d;
        for (std::size_t i = j + 1; i < n; ++i) {
            cd s = a(i, j);
            for (std::size_t k = 0; k < j; ++k)
                s -= a(i, k) * std::conj(a(j, k));
            a(i, j) = s / d;
        }
    }
    return true;
}

cvec cholesky_solve(const CMatrix &l, cvec b) {
    const std::size_t n = l.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k)
            b[i] -= l(i, k) * b[k];
        b[i] /= l(i, i).real();
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t k = i + 1; k < n; ++k)
            b[i] -= std::conj(l(k, i)) * b[k];
        b[i] /= l(i, i).real();
    }
    return b;
}

std::vector<cvec> normalized(const std::vector<cvec> &h, const rvec &sigma2) {
    if (h.empty() || sigma2.size() != h.size())
        throw std::invalid_argument("mac: need one noise power per user");
    std::vector<cvec> g(h.size());
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (!(sigma2[k] > 0.0))
            throw std::invalid_argument("mac: noise power must be positive");
        if (h[k].size() != h[0].size())
            throw std::invalid_argument("mac: channel lengths differ");
        g[k] = scaled(h[k], 1.0 / std::sqrt(sigma2[k]));
    }
    return g;
}

// log2 det(I + sum q_k g_k g_k^H) and, when asked, M_kl = g_k^H S^{-1} g_l.
double log_det_mac(const std::vector<cvec> &g, const rvec &q, CMatrix *m) {
    const std::size_t n = g[0].size(), k = g.size();
    CMatrix s = CMatrix::identity(n);
    for (std::size_t u = 0; u < k; ++u) {
        if (q[u] < 0.0)
            return -kInf;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                s(i, j) += q[u] * g[u][i] * std::conj(g[u][j]);
    }
    if (!cholesky(s))
        return -kInf;
    double ld = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        ld += 2.0 * std::log(s(i, i).real());
    if (m) {
        *m = CMatrix(k, k);
        for (std::size_t l = 0; l < k; ++l) {
            const cvec x = cholesky_solve(s, g[l]);
            for (std::size_t r = 0; r < k; ++r)
                (*m)(r, l) = dot(g[r], x);
        }
    }
    return ld / std::numbers::ln2;
}

} // namespace

MacSolution mac_sum_capacity(const std::vector<cvec> &h, const rvec &sigma2, double p_max, const SolverOptions &opts) {
    if (!(p_max >= 0.0))
        throw std::invalid_argument("mac_sum_capacity: negative power budget");
    const auto g = normalized(h, sigma2);
    const std::size_t k = g.size();
    MacSolution out;
    if (p_max == 0.0) {
        out.q.assign(k, 0.0);
        return out;
    }
    if (k == 1) {
        out.q = {p_max};
        out.sum_rate = std::log2(1.0 + p_max * norm2(g[0]));
        return out;
    }
    // q = p_max y with y on the unit simplex.
    ConvexProblem prob;
    prob.n = k;
    prob.objective = [&g, p_max, k](const rvec &y, rvec *grad, RMatrix *hess) {
        rvec q(k);
        for (std::size_t u = 0; u < k; ++u)
            q[u] = p_max * y[u];
        CMatrix m;
        const double f = log_det_mac(g, q, (grad || hess) ? &m : nullptr);
        if (!std::isfinite(f))
            return kInf;
        const double c = p_max / std::numbers::ln2;
        if (grad) {
            grad->assign(k, 0.0);
            for (std::size_t u = 0; u < k; ++u)
                (*grad)[u] = -c * m(u, u).real();
        }
        if (hess) {
            *hess = RMatrix(k, k);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < k; ++b)
                    (*hess)(a, b) = c * p_max * std::norm(m(a, b));
        }
        return -f;
    };
    prob.a_eq = RMatrix(1, k, 1.0);
    prob.b_eq = {1.0};
    prob.lower.assign(k, 0.0);
    SolverOptions inner = opts;
    inner.tol_gap = std::min(opts.tol_gap, 1e-12);
    const ConvexResult r = solve_convex(prob, rvec(k, 1.0 / static_cast<double>(k)), inner);
    out.q.resize(k);
    for (std::size_t u = 0; u < k; ++u)
        out.q[u] = p_max * std::max(r.x[u], 0.0);
    out.sum_rate = log_det_mac(g, out.q, nullptr);
    out.iterations = r.iterations;
    return out;
}

std::vector<cvec> mac_to_bc_beams(const std::vector<cvec> &h, const rvec &sigma2, const rvec &q,
                                  const std::vector<std::size_t> &decode_order) {
    const auto g = normalized(h, sigma2);
    const std::size_t k = g.size(), n = g[0].size();
    if (q.size() != k || decode_order.size() != k)
        throw std::invalid_argument("mac_to_bc_beams: dimension mismatch");
    (void)SicOrder::from_permutation(decode_order); // validates

    // Uplink MMSE-SIC: the downlink user decoded at position i is cancelled
    // after every user at positions j < i.
    std::vector<cvec> u(k);
    rvec sinr(k, 0.0);
    CMatrix s = CMatrix::identity(n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t a = decode_order[i];
        CMatrix l = s;
        if (!cholesky(l))
            throw std::runtime_error("mac_to_bc_beams: covariance not positive definite");
        cvec w = cholesky_solve(l, g[a]);
        const double nw = norm(w);
        u[a] = nw > 0.0 ? scaled(w, 1.0 / nw) : cvec(n, cd(0.0));
        sinr[a] = q[a] * dot(g[a], w).real();
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c)
                s(r, c) += q[a] * g[a][r] * std::conj(g[a][c]);
    }
    // Downlink powers from the last-decoded user backwards.
    rvec b(k, 0.0);
    for (std::size_t i = k; i-- > 0;) {
        const std::size_t a = decode_order[i];
        const double gain = std::norm(dot(g[a], u[a]));
        if (sinr[a] <= 0.0 || gain <= 0.0)
            continue;
        double interf = 1.0;
        for (std::size_t j = i + 1; j < k; ++j) {
            const std::size_t r = decode_order[j];
            interf += b[r] * std::norm(dot(g[a], u[r]));
        }
        b[a] = sinr[a] * interf / gain;
    }
    // The duality preserves total power; remove the roundoff of the
    // triangular recursion so the budget holds exactly.
    double total = 0.0, q_total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
        total += b[a];
        q_total += q[a];
    }
    const double fix = total > 0.0 ? q_total / total : 1.0;
    std::vector<cvec> beams(k);
    for (std::size_t a = 0; a < k; ++a)
        beams[a] = scaled(u[a], std::sqrt(b[a] * fix));
    return beams;
}

double mac_norm_bound(const rvec &norm_bound, double p_max) {
    // Water-filling over 1 / a_k^2.
    std::vector<double> floor;
    for (double a : norm_bound)
        if (a > 0.0)
            floor.push_back(1.0 / (a * a));
    if (floor.empty() || p_max <= 0.0)
        return 0.0;
    std::sort(floor.begin(), floor.end());
    double level = 0.0;
    std::size_t active = floor.size();
    for (std::size_t j = 1; j <= floor.size(); ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < j; ++i)
            sum += floor[i];
        const double mu = (p_max + sum) / static_cast<double>(j);
        if (j == floor.size() || mu <= floor[j]) {
            level = mu;
            active = j;
            break;
        }
    }
    double r = 0.0;
    for (std::size_t i = 0; i < active; ++i)
        r += std::log2(level / floor[i]);
    return r;
}

} // namespace ngma
