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

#include <cmath>
#include <string>

namespace ngma {

namespace {

bool better(Sense sense, double a, double b) { return sense == Sense::Maximize ? a > b : a < b; }

} // namespace

Solution solve_exhaustive(std::size_t n_binary,
                          const std::function<std::optional<double>(const std::vector<int> &)> &payoff, Sense sense) {
    if (n_binary > kMaxExhaustiveBinaries)
        throw std::invalid_argument("solve_exhaustive: " + std::to_string(n_binary) + " binaries exceed the budget of " +
                                    std::to_string(kMaxExhaustiveBinaries));
    Solution sol;
    sol.status = SolveStatus::Infeasible;
    sol.objective = sense == Sense::Maximize ? -kInf : kInf;
    std::vector<int> a(n_binary);
    const std::size_t total = std::size_t{1} << n_binary;
    for (std::size_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < n_binary; ++i)
            a[i] = static_cast<int>((mask >> i) & 1u);
        ++sol.iterations;
        const auto v = payoff(a);
        if (v && (sol.status == SolveStatus::Infeasible || better(sense, *v, sol.objective))) {
            sol.objective = *v;
            sol.x.assign(a.begin(), a.end());
            sol.status = SolveStatus::Optimal;
        }
    }
    if (sol.status == SolveStatus::Optimal)
        sol.gap = 0.0;
    return sol;
}

Solution solve_exhaustive(const ProblemInstance &inst, const GridSpec &grid, const SolverOptions &opts) {
    validate(opts);
    std::vector<std::size_t> bin, cont;
    for (const auto &b : inst.layout.blocks())
        for (std::size_t i = 0; i < b.width(); ++i)
            (b.binary ? bin : cont).push_back(b.offset + i);
    if (bin.size() > kMaxExhaustiveBinaries)
        throw std::invalid_argument("solve_exhaustive: " + std::to_string(bin.size()) +
                                    " binaries exceed the budget of " + std::to_string(kMaxExhaustiveBinaries));
    const bool use_grid = !cont.empty() && !grid.inner;
    rvec lo(inst.layout.size()), hi(inst.layout.size());
    for (const auto &b : inst.layout.blocks())
        for (std::size_t i = 0; i < b.width(); ++i) {
            lo[b.offset + i] = b.lower[i];
            hi[b.offset + i] = b.upper[i];
        }
    std::size_t grid_points = 1;
    if (use_grid) {
        if (cont.size() > kMaxExhaustiveGridDims)
            throw std::invalid_argument("solve_exhaustive: " + std::to_string(cont.size()) +
                                        " continuous dimensions exceed the grid budget of " +
                                        std::to_string(kMaxExhaustiveGridDims));
        if (grid.points_per_dim < 2)
            throw std::invalid_argument("solve_exhaustive: continuous variables need a grid of at least 2 points");
        for (std::size_t c : cont) {
            if (!std::isfinite(lo[c]) || !std::isfinite(hi[c]))
                throw std::invalid_argument("solve_exhaustive: grid dimensions need finite bounds");
            grid_points *= grid.points_per_dim;
        }
    }

    const Sense sense = inst.sense;
    Solution sol;
    sol.status = SolveStatus::Infeasible;
    sol.objective = sense == Sense::Maximize ? -kInf : kInf;
    rvec x = inst.layout.zeros();
    auto consider = [&](const rvec &pt) {
        ++sol.iterations;
        if (!check_feasibility(inst, pt, opts.tol_feas).feasible)
            return;
        const double v = evaluate_objective(inst, pt);
        if (sol.status == SolveStatus::Infeasible || better(sense, v, sol.objective)) {
            sol.objective = v;
            sol.x = pt;
            sol.status = SolveStatus::Optimal;
        }
    };
    const std::size_t total = std::size_t{1} << bin.size();
    for (std::size_t mask = 0; mask < total; ++mask) {
        for (std::size_t i = 0; i < bin.size(); ++i)
            x[bin[i]] = static_cast<double>((mask >> i) & 1u);
        if (grid.inner) {
            if (auto pt = grid.inner(x))
                consider(*pt);
            else
                ++sol.iterations;
            continue;
        }
        for (std::size_t g = 0; g < grid_points; ++g) {
            std::size_t rem = g;
            for (std::size_t c : cont) {
                const std::size_t idx = rem % grid.points_per_dim;
                rem /= grid.points_per_dim;
                x[c] = lo[c] + (hi[c] - lo[c]) * static_cast<double>(idx) / static_cast<double>(grid.points_per_dim - 1);
            }
            consider(x);
        }
    }
    if (sol.status == SolveStatus::Optimal) {
        sol.max_residual = check_feasibility(inst, sol.x, opts.tol_feas).max_residual;
        if (!use_grid)
            sol.gap = 0.0;
    }
    return sol;
}

} // namespace ngma
