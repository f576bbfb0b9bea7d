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

namespace ngma {

namespace {

BcdResult run_bcd(const std::function<double(const rvec &)> &objective, Sense sense, const rvec &x0,
                  const std::vector<BcdBlock> &blocks, const SolverOptions &opts,
                  const std::function<void(const std::string &, const rvec &)> &after_update) {
    validate(opts);
    if (blocks.empty())
        throw std::invalid_argument("solve_bcd: no blocks");
    // Work in maximization sense.
    const double sign = sense == Sense::Maximize ? 1.0 : -1.0;
    BcdResult res;
    rvec x = x0;
    double f = objective(x);
    bool converged = false;
    for (std::size_t cycle = 0; cycle < opts.max_iter; ++cycle) {
        const double start = f;
        for (const auto &b : blocks) {
            rvec y = b.update(x);
            if (y.size() != x.size())
                throw std::runtime_error("solve_bcd: block " + b.name + " changed the variable length");
            const double fy = objective(y);
            BcdUpdate u{cycle, b.name, f, fy, sign * fy >= sign * f};
            res.history.push_back(u);
            if (!u.accepted)
                continue;
            if (after_update)
                after_update(b.name, y);
            x = std::move(y);
            f = fy;
        }
        res.cycles = cycle + 1;
        if (sign * (f - start) <= opts.tol_gap * std::max(1.0, std::abs(f))) {
            converged = true;
            break;
        }
    }
    res.solution.x = x;
    res.solution.objective = f;
    res.solution.iterations = res.cycles;
    res.solution.status = converged ? SolveStatus::Feasible : SolveStatus::IterationLimit;
    return res;
}

} // namespace

BcdResult solve_bcd(const std::function<double(const rvec &)> &objective, Sense sense, const rvec &x0,
                    const std::vector<BcdBlock> &blocks, const SolverOptions &opts) {
    return run_bcd(objective, sense, x0, blocks, opts, nullptr);
}

BcdResult solve_bcd(const ProblemInstance &inst, const rvec &x0, const std::vector<BcdBlock> &blocks,
                    const SolverOptions &opts) {
    auto check = [&](const std::string &block, const rvec &y) {
        const Feasibility f = check_feasibility(inst, y, opts.tol_feas);
        if (f.feasible)
            return;
        for (const auto &r : f.residuals)
            if (r.value > (r.limit < 0.0 ? opts.tol_feas : r.limit))
                throw std::runtime_error("solve_bcd: block " + block + " violated " + r.constraint + "[" +
                                         std::to_string(r.index) + "] by " + std::to_string(r.value));
    };
    BcdResult r = run_bcd([&](const rvec &x) { return evaluate_objective(inst, x); }, inst.sense, x0, blocks, opts,
                          check);
    r.solution.max_residual = check_feasibility(inst, r.solution.x, opts.tol_feas).max_residual;
    return r;
}

} // namespace ngma
