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

namespace ngma {

namespace {

double log_objective(const rvec &zeta) {
    double s = 0.0;
    for (double z : zeta)
        s += std::log2(z);
    return s;
}

} // namespace

PolyblockResult solve_polyblock(const ProblemInstance &inst, const SolverOptions &opts) {
    validate(opts);
    const auto form = noma_monotone_form(inst);
    if (!form)
        throw std::invalid_argument("solve_polyblock: needs a single-subcarrier NomaSumRate instance with nonzero gains");
    const std::size_t k = form->lower.size();
    PolyblockResult res;
    Solution &sol = res.solution;

    auto feasible = [&](const rvec &zeta) {
        return check_feasibility(inst, form->point(form->powers(zeta)), opts.tol_feas).feasible;
    };
    auto within_budget = [&](const rvec &zeta) {
        const Feasibility f = check_feasibility(inst, form->point(form->powers(zeta)), opts.tol_feas);
        for (const auto &r : f.residuals)
            if (r.constraint == "C1" && r.value > (r.limit < 0.0 ? opts.tol_feas : r.limit))
                return false;
        return true;
    };
    const rvec &lo = form->lower;
    for (std::size_t u = 0; u < k; ++u)
        if (lo[u] > form->upper[u]) {
            sol.status = SolveStatus::Infeasible;
            return res;
        }
    if (!feasible(lo)) {
        sol.status = SolveStatus::Infeasible;
        return res;
    }

    // Reduced upper corner: along each axis from the lower corner, the last
    // feasible point. Every feasible zeta lies below it.
    rvec top_corner = form->upper;
    for (std::size_t u = 0; u < k; ++u) {
        double a = lo[u], b = form->upper[u];
        rvec z = lo;
        z[u] = b;
        if (feasible(z))
            continue;
        for (int i = 0; i < 100 && b - a > 1e-15 * b; ++i) {
            z[u] = 0.5 * (a + b);
            (feasible(z) ? a : b) = z[u];
        }
        top_corner[u] = b;
    }

    rvec best = lo;
    double lb = log_objective(lo);
    // Axis end points are feasible and seed the incumbent.
    for (std::size_t u = 0; u < k; ++u) {
        rvec z = lo;
        z[u] = top_corner[u];
        if (!feasible(z))
            z[u] = lo[u] + (1.0 - 1e-12) * (top_corner[u] - lo[u]);
        if (feasible(z) && log_objective(z) > lb) {
            lb = log_objective(z);
            best = z;
        }
    }
    struct Vertex {
        rvec z;
        double value;
    };
    std::vector<Vertex> vertices{{top_corner, log_objective(top_corner)}};
    res.peak_vertices = 1;
    bool converged = false;

    for (std::size_t it = 0;; ++it) {
        auto top = std::max_element(vertices.begin(), vertices.end(),
                                    [](const Vertex &a, const Vertex &b) { return a.value < b.value; });
        const double ub = top == vertices.end() ? lb : std::max(top->value, lb);
        res.upper_history.push_back(ub);
        res.lower_history.push_back(lb);
        sol.iterations = it;
        if (top == vertices.end() || ub - lb <= opts.tol_gap * std::max(std::abs(lb), 1e-12)) {
            converged = true;
            break;
        }
        if (vertices.size() > opts.max_vertices)
            break;
        const rvec v = top->z;
        rvec cut;
        if (feasible(v)) {
            best = v;
            lb = top->value;
            cut = v;
        } else {
            // Bisection along the ray to the origin against the power budget
            // alone; the cut stays valid even where the QoS floor fails.
            double a = 0.0, b = 1.0;
            auto at = [&](double t) {
                rvec z(k);
                for (std::size_t u = 0; u < k; ++u)
                    z[u] = t * v[u];
                return z;
            };
            for (int i = 0; i < 60 && b - a > 1e-14; ++i) {
                const double mid = 0.5 * (a + b);
                (within_budget(at(mid)) ? a : b) = mid;
            }
            const rvec z = at(a);
            const double fz = log_objective(z);
            if (fz > lb && feasible(z)) {
                lb = fz;
                best = z;
            }
            cut = at(b);
        }
        // Replace every vertex strictly above the cut point by its children.
        std::vector<Vertex> next;
        for (const auto &w : vertices) {
            bool above = true;
            for (std::size_t u = 0; u < k && above; ++u)
                above = w.z[u] > cut[u];
            if (!above) {
                if (w.value > lb)
                    next.push_back(w);
                continue;
            }
            for (std::size_t u = 0; u < k; ++u) {
                rvec c = w.z;
                c[u] = cut[u];
                if (c[u] < lo[u])
                    continue;
                const double val = log_objective(c);
                if (val > lb)
                    next.push_back({std::move(c), val});
            }
        }
        vertices = std::move(next);
        res.peak_vertices = std::max(res.peak_vertices, vertices.size());
    }

    sol.x = form->point(form->powers(best));
    sol.objective = evaluate_objective(inst, sol.x);
    sol.max_residual = check_feasibility(inst, sol.x, opts.tol_feas).max_residual;
    const double ub = res.upper_history.back();
    sol.gap = std::max(0.0, ub - lb) / std::max(std::abs(lb), 1e-300);
    sol.status = converged ? SolveStatus::Optimal : SolveStatus::Feasible;
    return res;
}

} // namespace ngma
