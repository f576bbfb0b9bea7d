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

#include "ngma/channels.hpp"
#include "ngma/solvers.hpp"

#include <doctest.h>

#include <cmath>

using namespace ngma;

namespace {

std::vector<cvec> random_channels(Rng &rng, std::size_t k, std::size_t n) {
    std::vector<cvec> h(k, cvec(n));
    for (auto &v : h)
        for (auto &e : v)
            e = rng.cnormal();
    return h;
}

// Two-user log2 det(I + q1 g1 g1^H + q2 g2 g2^H) via the matrix determinant
// lemma, maximized on a fine grid of the power split then golden-refined.
double two_user_capacity(const std::vector<cvec> &h, const rvec &sigma2, double p_max) {
    const double a = norm2(h[0]) / sigma2[0], b = norm2(h[1]) / sigma2[1];
    const double c = std::norm(dot(h[0], h[1])) / (sigma2[0] * sigma2[1]);
    auto f = [&](double q1) {
        const double q2 = p_max - q1;
        return std::log2((1.0 + q1 * a) * (1.0 + q2 * b) - q1 * q2 * c);
    };
    const int grid = 20000;
    int arg = 0;
    for (int i = 1; i <= grid; ++i)
        if (f(p_max * i / grid) > f(p_max * arg / grid))
            arg = i;
    double lo = p_max * std::max(0, arg - 1) / grid, hi = p_max * std::min(grid, arg + 1) / grid;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        (f(x1) < f(x2) ? lo : hi) = f(x1) < f(x2) ? x1 : x2;
    }
    return f(0.5 * (lo + hi));
}

} // namespace

TEST_CASE("mac: two-user sum capacity matches the determinant-lemma search") {
    Rng rng(21);
    SolverOptions o;
    for (int t = 0; t < 30; ++t) {
        const auto h = random_channels(rng, 2, 3);
        const rvec s2{0.5 + rng.uniform(), 0.5 + rng.uniform()};
        const double p = 0.1 + 20.0 * rng.uniform();
        CHECK(mac_sum_capacity(h, s2, p, o).sum_rate == doctest::Approx(two_user_capacity(h, s2, p)).epsilon(1e-7));
    }
}

TEST_CASE("mac: downlink beams reach the capacity in every decode order") {
    Rng rng(4);
    SolverOptions o;
    for (int t = 0; t < 10; ++t) {
        const std::size_t k = 2 + t % 3;
        const auto h = random_channels(rng, k, 4);
        rvec s2(k);
        for (auto &v : s2)
            v = 0.2 + rng.uniform();
        const auto mac = mac_sum_capacity(h, s2, 5.0, o);
        double q_sum = 0.0;
        for (double q : mac.q) {
            CHECK(q >= 0.0);
            q_sum += q;
        }
        CHECK(q_sum == doctest::Approx(5.0).epsilon(1e-9));
        for (const auto &order : all_sic_orders(k)) {
            const auto perm = *order.permutation();
            const auto beams = mac_to_bc_beams(h, s2, mac.q, perm);
            double power = 0.0;
            for (const auto &p : beams)
                power += norm2(p);
            CHECK(power == doctest::Approx(5.0).epsilon(1e-9));
            CHECK(sum_rate(miso_sinr(h, beams, SicOrder::from_permutation(perm), s2)) ==
                  doctest::Approx(mac.sum_rate).epsilon(1e-9));
        }
    }
}

TEST_CASE("mac: norm bound dominates the capacity") {
    Rng rng(8);
    SolverOptions o;
    for (int t = 0; t < 20; ++t) {
        const auto h = random_channels(rng, 3, 2);
        const rvec s2{1.0, 0.5, 2.0};
        rvec bound(3);
        for (std::size_t u = 0; u < 3; ++u)
            bound[u] = std::sqrt(norm2(h[u]) / s2[u]);
        CHECK(mac_norm_bound(bound, 3.0) >= mac_sum_capacity(h, s2, 3.0, o).sum_rate - 1e-9);
    }
}

TEST_CASE("mac: single user is the matched-filter rate") {
    Rng rng(2);
    const auto h = random_channels(rng, 1, 4);
    SolverOptions o;
    CHECK(mac_sum_capacity(h, {0.7}, 3.0, o).sum_rate ==
          doctest::Approx(std::log2(1.0 + 3.0 * norm2(h[0]) / 0.7)).epsilon(1e-12));
}

TEST_CASE("irs: branch and bound over phases equals codebook enumeration") {
    Rng rng(13);
    SolverOptions o;
    o.tol_gap = 1e-9;
    for (int t = 0; t < 5; ++t) {
        IrsSumRateData d;
        const std::size_t k = 2, n = 2, m = 3;
        d.h_direct = random_channels(rng, k, n);
        d.f = CMatrix(n, m);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t e = 0; e < m; ++e)
                d.f(i, e) = rng.cnormal();
        d.h_reflect = random_channels(rng, k, m);
        for (auto &v : d.h_reflect)
            for (auto &e : v)
                e *= 0.5;
        d.sigma2 = {1.0, 1.0};
        d.p_max = 4.0;
        d.phase_bits = 2;
        const auto inst = build_problem(d);
        double best = 0.0;
        rvec psi(m);
        for (int c = 0; c < 64; ++c) {
            for (std::size_t e = 0; e < m; ++e)
                psi[e] = ((c >> (2 * e)) & 3) / 4.0;
            std::vector<cvec> h;
            for (std::size_t u = 0; u < k; ++u)
                h.push_back(irs_effective_channel(d.h_direct[u], d.f, psi, d.h_reflect[u]));
            best = std::max(best, mac_sum_capacity(h, d.sigma2, d.p_max, o).sum_rate);
        }
        const auto r = solve_bnb(inst, irs_phase_relaxer(inst, {0, 1}, make_irs_cache(), o), o);
        CHECK(r.solution.status == SolveStatus::Optimal);
        CHECK(r.solution.objective == doctest::Approx(best).epsilon(1e-7));
        CHECK(check_feasibility(inst, r.solution.x, 1e-7).feasible);
    }
}
