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

#include <cmath>

using namespace ngma;

namespace {

SmoothFn halfspace(rvec a, double b) { return linear_fn(std::move(a), -b); }

} // namespace

TEST_CASE("projection onto a halfspace matches the closed form") {
    // min ||x - c||^2 s.t. a.x <= b, projection is c - (a.c - b)_+ a / ||a||^2
    const rvec c{2.0, 1.0, -0.5};
    const rvec a{1.0, 2.0, 0.5};
    const double b = 1.0;
    ConvexProblem p;
    p.n = 3;
    p.objective = quadratic_fn(RMatrix::identity(3), c, 1.0);
    p.inequalities.push_back(halfspace(a, b));
    SolverOptions o;
    o.tol_gap = 1e-8;
    const ConvexResult r = solve_convex(p, rvec{0.0, 0.0, 0.0}, o);
    REQUIRE(r.status == SolveStatus::Optimal);
    const double viol = dot(a, c) - b;
    const double aa = dot(a, a);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(r.x[i] == doctest::Approx(c[i] - viol * a[i] / aa).epsilon(1e-6));
    CHECK(r.multipliers[0] == doctest::Approx(2.0 * viol / aa).epsilon(1e-5));
    CHECK(r.kkt_residual < 1e-6);
}

TEST_CASE("equality constraints are eliminated") {
    // min x^2 + y^2 + z^2 s.t. x + y + z = 3 -> (1, 1, 1)
    ConvexProblem p;
    p.n = 3;
    p.objective = quadratic_fn(RMatrix::identity(3), rvec(3, 0.0), 1.0);
    p.a_eq = RMatrix(1, 3, 1.0);
    p.b_eq = {3.0};
    const ConvexResult r = solve_convex(p, rvec{5.0, -1.0, 0.0}, SolverOptions{});
    REQUIRE(r.status == SolveStatus::Optimal);
    for (double v : r.x)
        CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("phase I finds an interior point from an infeasible start") {
    // max log(x) + log(y) s.t. x + y <= 2, x,y in [0, 5] -> (1, 1)
    ConvexProblem p;
    p.n = 2;
    p.objective = [](const rvec &x, rvec *g, RMatrix *h) {
        if (x[0] <= 0.0 || x[1] <= 0.0)
            return kInf;
        if (g)
            *g = {-1.0 / x[0], -1.0 / x[1]};
        if (h) {
            *h = RMatrix(2, 2);
            (*h)(0, 0) = 1.0 / (x[0] * x[0]);
            (*h)(1, 1) = 1.0 / (x[1] * x[1]);
        }
        return -std::log(x[0]) - std::log(x[1]);
    };
    p.inequalities.push_back(halfspace({1.0, 1.0}, 2.0));
    p.lower = {0.0, 0.0};
    p.upper = {5.0, 5.0};
    const ConvexResult r = solve_convex(p, rvec{4.0, 4.0}, SolverOptions{});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("an empty feasible set is reported as infeasible") {
    ConvexProblem p;
    p.n = 1;
    p.objective = linear_fn({1.0});
    p.inequalities.push_back(halfspace({1.0}, -1.0)); // x <= -1
    p.lower = {0.0};
    const ConvexResult r = solve_convex(p, rvec{0.5}, SolverOptions{});
    CHECK(r.status == SolveStatus::Infeasible);
}

TEST_CASE("LP vertex and duality gap certificate") {
    // min -x - 2y s.t. x + y <= 4, x <= 3, y <= 3, x,y >= 0 -> (1, 3), -7
    ConvexProblem p;
    p.n = 2;
    p.objective = linear_fn({-1.0, -2.0});
    p.inequalities.push_back(halfspace({1.0, 1.0}, 4.0));
    p.lower = {0.0, 0.0};
    p.upper = {3.0, 3.0};
    SolverOptions o;
    o.tol_gap = 1e-9;
    const ConvexResult r = solve_convex(p, rvec{0.1, 0.1}, o);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-7.0).epsilon(1e-7));
    CHECK(r.objective - r.duality_gap <= -7.0 + 1e-12);
}

TEST_CASE("scalar rate constraint inverts to p = 1") {
    ConvexProblem p;
    p.n = 1;
    p.objective = linear_fn({1.0});
    // 1 - log2(1 + p) <= 0
    p.inequalities.push_back([](const rvec &x, rvec *g, RMatrix *h) {
        if (x[0] <= -1.0)
            return kInf;
        const double l2 = std::log(2.0);
        if (g)
            *g = {-1.0 / ((1.0 + x[0]) * l2)};
        if (h) {
            *h = RMatrix(1, 1);
            (*h)(0, 0) = 1.0 / ((1.0 + x[0]) * (1.0 + x[0]) * l2);
        }
        return 1.0 - std::log2(1.0 + x[0]);
    });
    p.lower = {0.0};
    SolverOptions o;
    o.tol_gap = 1e-9;
    const ConvexResult r = solve_convex(p, rvec{3.0}, o);
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("unconstrained quadratic takes at most three Newton steps") {
    RMatrix a(3, 3);
    a(0, 0) = 2.0;
    a(0, 1) = 1.0;
    a(1, 1) = 3.0;
    a(2, 0) = -1.0;
    a(2, 2) = 0.5;
    const rvec b{1.0, -2.0, 4.0};
    ConvexProblem p;
    p.n = 3;
    p.objective = quadratic_fn(a, b, 0.5);
    const ConvexResult r = solve_convex(p, rvec{10.0, 10.0, 10.0}, SolverOptions{});
    REQUIRE(r.status == SolveStatus::Optimal);
    CHECK(r.iterations <= 3);
    const rvec sol = solve_linear(a, b);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(r.x[i] == doctest::Approx(sol[i]).epsilon(1e-10));
}

TEST_CASE("two-user power minimization with fixed beams matches a grid search") {
    Rng rng(17);
    for (int t = 0; t < 10; ++t) {
        // g[a][b]: gain of user b's beam at user a.
        double g[2][2];
        for (auto &row : g)
            for (auto &e : row)
                e = 0.05 + rng.uniform();
        g[0][0] += 1.0;
        g[1][1] += 1.0;
        const double gamma[2] = {0.2 + rng.uniform(), 0.2 + rng.uniform()}, s2 = 0.1;
        ConvexProblem p;
        p.n = 2;
        p.objective = linear_fn({1.0, 1.0});
        p.inequalities = {linear_fn({-g[0][0], gamma[0] * g[0][1]}, gamma[0] * s2),
                          linear_fn({gamma[1] * g[1][0], -g[1][1]}, gamma[1] * s2)};
        p.lower = {0.0, 0.0};
        SolverOptions o;
        o.tol_gap = 1e-9;
        const ConvexResult r = solve_convex(p, rvec{50.0, 50.0}, o);

        // Grid over q1; the cheapest feasible q2 is the user-2 requirement.
        const double q1_max = 20.0;
        double best = kInf;
        for (int i = 0; i <= 1000000; ++i) {
            const double q1 = q1_max * i / 1000000.0;
            const double q2 = gamma[1] * (q1 * g[1][0] + s2) / g[1][1];
            if (q1 * g[0][0] >= gamma[0] * (q2 * g[0][1] + s2))
                best = std::min(best, q1 + q2);
        }
        if (best == kInf) {
            CHECK(r.status == SolveStatus::Infeasible);
            continue;
        }
        REQUIRE(r.status == SolveStatus::Optimal);
        CHECK(r.objective == doctest::Approx(best).epsilon(1e-3));
    }
}
