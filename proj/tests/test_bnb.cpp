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

#include "doctest.h"
#include "ngma/solvers.hpp"

#include <chrono>
#include <cmath>
#include <map>

using namespace ngma;

namespace {

ProblemInstance random_ofdma(Rng &rng, std::size_t k, std::size_t m) {
    OfdmaPowerMinData d;
    d.h = CMatrix(k, m);
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t c = 0; c < m; ++c)
            d.h(u, c) = rng.cnormal();
    d.p_max.assign(k, 50.0);
    d.sigma2.assign(k, 1.0);
    for (std::size_t u = 0; u < k; ++u)
        d.r_min.push_back(rng.uniform(0.5, 3.0));
    return build_problem(d);
}

// Independent oracle: every injective stream->carrier map with the
// single-carrier closed form p = (2^R - 1) sigma^2 / |H|^2.
double brute_force(const OfdmaPowerMinData &d) {
    double best = kInf;
    const std::size_t k = d.h.rows(), m = d.h.cols();
    std::vector<std::size_t> pick(k, 0);
    for (;;) {
        bool distinct = true;
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a + 1; b < k; ++b)
                distinct = distinct && pick[a] != pick[b];
        if (distinct) {
            double tot = 0.0;
            bool ok = true;
            for (std::size_t u = 0; u < k; ++u) {
                const double p = (std::exp2(d.r_min[u]) - 1.0) * d.sigma2[u] / std::norm(d.h(u, pick[u]));
                ok = ok && p <= d.p_max[u];
                tot += p;
            }
            if (ok)
                best = std::min(best, tot);
        }
        std::size_t i = 0;
        while (i < k && ++pick[i] == m)
            pick[i++] = 0;
        if (i == k)
            break;
    }
    return best;
}

} // namespace

TEST_CASE("BnB picks the stronger subcarrier for a single user") {
    OfdmaPowerMinData d;
    d.h = CMatrix{{cd(1.0), cd(2.0)}};
    d.p_max = {10.0};
    d.r_min = {1.0};
    d.sigma2 = {1.0};
    const auto inst = build_problem(d);
    const BnbResult r = solve_bnb(inst, ofdma_relaxer(inst, SolverOptions{}), SolverOptions{});
    REQUIRE(r.solution.status == SolveStatus::Optimal);
    CHECK(r.solution.objective == doctest::Approx(0.25).epsilon(1e-12));
    const rvec pi = inst.layout.get(r.solution.x, "pi");
    CHECK(pi[0] == 0.0);
    CHECK(pi[1] == 1.0);
}

TEST_CASE("BnB with every binary fixed by dimension does not branch") {
    OfdmaPowerMinData d;
    d.h = CMatrix{{cd(0.0, 1.5)}};
    d.p_max = {10.0};
    d.r_min = {2.0};
    d.sigma2 = {0.5};
    const auto inst = build_problem(d);
    const BnbResult r = solve_bnb(inst, ofdma_relaxer(inst, SolverOptions{}), SolverOptions{});
    CHECK(r.nodes == 1);
    CHECK(r.solution.objective == doctest::Approx(3.0 * 0.5 / 2.25).epsilon(1e-12));
}

// Root relaxation whose phase I once pushed pi below zero, where the
// perspective rate is undefined, and reported the instance infeasible.
TEST_CASE("BnB root relaxation with a weak second user stays feasible") {
    OfdmaPowerMinData d;
    d.h = CMatrix(2, 3);
    const cd rows[2][3] = {{cd(-0.45986773273963316, -0.68243401672728554), cd(0.98330803725607485, -0.46861365133116556),
                            cd(-0.64276462153765612, 0.23853234554898761)},
                           {cd(-0.19166001499263072, 0.053051825179949538), cd(-0.24802376209107477, 0.49422010383860537),
                            cd(0.071409360302545938, -0.45976675229515518)}};
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t c = 0; c < 3; ++c)
            d.h(u, c) = rows[u][c];
    d.p_max = {50.0, 50.0};
    d.sigma2 = {1.0, 1.0};
    d.r_min = {2.9397727803857006, 2.8394841246022797};
    const auto inst = build_problem(d);
    const double oracle = brute_force(d);
    REQUIRE(std::isfinite(oracle));
    const BnbResult b = solve_bnb(inst, ofdma_relaxer(inst, SolverOptions{}), SolverOptions{});
    REQUIRE(b.solution.status == SolveStatus::Optimal);
    CHECK(b.solution.objective == doctest::Approx(oracle).epsilon(1e-6));
}

TEST_CASE("BnB matches exhaustive enumeration on K=2, M=3 instances") {
    Rng rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const auto inst = random_ofdma(rng, 2, 3);
        const auto &d = std::get<OfdmaPowerMinData>(inst.kind);
        const Solution ex = solve_exhaustive(inst, ofdma_closed_form(inst), SolverOptions{});
        const double oracle = brute_force(d);
        const BnbResult b = solve_bnb(inst, ofdma_relaxer(inst, SolverOptions{}), SolverOptions{});
        if (!std::isfinite(oracle)) {
            CHECK(ex.status == SolveStatus::Infeasible);
            CHECK(b.solution.status == SolveStatus::Infeasible);
            continue;
        }
        CHECK(ex.objective == doctest::Approx(oracle).epsilon(1e-12));
        REQUIRE(b.solution.status == SolveStatus::Optimal);
        CHECK(b.solution.objective == doctest::Approx(oracle).epsilon(1e-6));
        CHECK(*b.solution.gap >= 0.0);
        CHECK(b.global_bound <= oracle * (1.0 + 1e-9));
        // Tightened bounds never decrease from parent to child.
        std::map<std::size_t, double> bound;
        for (const auto &n : b.log) {
            bound[n.id] = n.bound;
            if (n.id != n.parent)
                CHECK(n.bound >= bound.at(n.parent));
        }
    }
}

TEST_CASE("exhaustive enumeration refuses oversized declarations") {
    auto payoff = [](const std::vector<int> &) { return std::optional<double>(0.0); };
    CHECK_THROWS_AS(solve_exhaustive(21, payoff, Sense::Maximize), std::invalid_argument);
}

TEST_CASE("exhaustive enumeration of a payoff table") {
    const double table[2][2] = {{1.0, 4.0}, {3.0, 2.0}};
    auto payoff = [&](const std::vector<int> &a) { return std::optional<double>(table[a[0]][a[1]]); };
    const Solution s = solve_exhaustive(2, payoff, Sense::Maximize);
    CHECK(s.objective == 4.0);
    CHECK(s.x == rvec{0.0, 1.0});
    CHECK(s.iterations == 4);
}

TEST_CASE("exhaustive enumeration over pairwise SIC indicators finds 3! orders") {
    std::size_t valid = 0;
    auto payoff = [&](const std::vector<int> &a) -> std::optional<double> {
        std::vector<std::vector<int>> alpha(3, std::vector<int>(3, 0));
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                alpha[i][j] = i == j ? 0 : a[i * 3 + j];
        for (std::size_t i = 0; i < 3; ++i)
            if (a[i * 3 + i])
                return std::nullopt;
        try {
            if (!SicOrder::from_pairwise(alpha).permutation())
                return std::nullopt;
        } catch (const std::invalid_argument &) {
            return std::nullopt;
        }
        ++valid;
        return 1.0;
    };
    solve_exhaustive(9, payoff, Sense::Maximize);
    CHECK(valid == 6);
    CHECK(all_sic_orders(3).size() == 6);
}
