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
#include <queue>

namespace ngma {

namespace {

struct Node {
    std::size_t id = 0;
    std::size_t depth = 0;
    std::vector<int> fixed;
    rvec binaries;
    double bound = 0.0; // minimization sense
};

struct NodeOrder {
    bool operator()(const Node &a, const Node &b) const {
        if (a.bound != b.bound)
            return a.bound > b.bound;
        return a.id > b.id;
    }
};

double relative_gap(double incumbent, double bound) {
    return std::max(0.0, incumbent - bound) / std::max(std::abs(incumbent), 1e-300);
}

} // namespace

BnbResult solve_bnb(const ProblemInstance &inst, const Relaxer &relaxer, const SolverOptions &opts) {
    validate(opts);
    if (!relaxer.relax || !relaxer.complete)
        throw std::invalid_argument("solve_bnb: relaxer is incomplete");
    const double sign = inst.sense == Sense::Maximize ? -1.0 : 1.0;
    const std::size_t nb = relaxer.n_binary;

    BnbResult res;
    double incumbent = kInf;
    rvec best_x;
    std::size_t next_id = 0;

    auto try_complete = [&](const std::vector<int> &fixed, const rvec &binaries) {
        std::vector<int> a(nb);
        for (std::size_t i = 0; i < nb; ++i)
            a[i] = fixed[i] >= 0 ? fixed[i] : (binaries[i] >= 0.5 ? 1 : 0);
        const auto c = relaxer.complete(a);
        if (c && sign * c->first < incumbent) {
            incumbent = sign * c->first;
            best_x = c->second;
        }
    };
    auto prunable = [&](double bound) {
        return std::isfinite(incumbent) && bound >= incumbent - opts.tol_gap * std::abs(incumbent);
    };

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    {
        Node root;
        root.id = next_id++;
        root.fixed.assign(nb, -1);
        const BnbRelaxation r = relaxer.relax(root.fixed);
        if (r.feasible) {
            root.bound = sign * r.bound;
            root.binaries = r.binaries;
            res.log.push_back({root.id, root.id, 0, root.bound, root.bound});
            try_complete(root.fixed, root.binaries);
            open.push(std::move(root));
        }
        res.nodes = 1;
    }

    double global = kInf;
    bool exhausted = false;
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (prunable(node.bound))
            continue;
        global = node.bound;
        if (std::isfinite(incumbent) && relative_gap(incumbent, global) <= opts.tol_gap) {
            open.push(std::move(node));
            break;
        }
        if (res.nodes >= opts.max_nodes) {
            open.push(std::move(node));
            exhausted = true;
            break;
        }
        // Most fractional free binary; first free one if none is fractional.
        std::size_t pick = nb, first_free = nb;
        double best = kInf;
        for (std::size_t i = 0; i < nb; ++i) {
            if (node.fixed[i] >= 0)
                continue;
            if (first_free == nb)
                first_free = i;
            const double v = node.binaries[i];
            if (std::min(v, 1.0 - v) > 1e-9 && std::abs(v - 0.5) < best) {
                best = std::abs(v - 0.5);
                pick = i;
            }
        }
        if (pick == nb)
            pick = first_free;
        if (pick == nb) {
            try_complete(node.fixed, node.binaries);
            continue;
        }
        for (int value : {1, 0}) {
            Node child;
            child.id = next_id++;
            child.depth = node.depth + 1;
            child.fixed = node.fixed;
            child.fixed[pick] = value;
            ++res.nodes;
            const BnbRelaxation r = relaxer.relax(child.fixed);
            if (!r.feasible)
                continue;
            const double raw = sign * r.bound;
            child.bound = std::max(raw, node.bound);
            child.binaries = r.binaries;
            res.log.push_back({child.id, node.id, child.depth, raw, child.bound});
            try_complete(child.fixed, child.binaries);
            if (!prunable(child.bound))
                open.push(std::move(child));
        }
    }

    if (open.empty())
        global = incumbent;
    else
        global = std::min(global, open.top().bound);
    Solution &sol = res.solution;
    sol.iterations = res.nodes;
    if (!std::isfinite(incumbent)) {
        sol.status = exhausted ? SolveStatus::IterationLimit : SolveStatus::Infeasible;
        sol.objective = sign * kInf;
        res.global_bound = sign * global;
        return res;
    }
    sol.x = best_x;
    sol.objective = sign * incumbent;
    sol.max_residual = check_feasibility(inst, best_x, opts.tol_feas).max_residual;
    const double gap = relative_gap(incumbent, std::min(global, incumbent));
    sol.gap = gap;
    sol.status = exhausted && gap > opts.tol_gap ? SolveStatus::Feasible : SolveStatus::Optimal;
    res.global_bound = sign * std::min(global, incumbent);
    return res;
}

// ---- OFDMA relaxation -----------------------------------------------------

namespace {

struct OfdmaShape {
    std::size_t k = 0, m = 0, ds = 0;
    std::vector<std::size_t> owner; // stream -> user
    std::vector<std::size_t> offset;
    std::vector<std::size_t> streams;
};

OfdmaShape ofdma_shape(const OfdmaPowerMinData &d) {
    OfdmaShape s;
    s.k = d.h.rows();
    s.m = d.h.cols();
    s.streams = d.streams.empty() ? std::vector<std::size_t>(s.k, 1) : d.streams;
    for (std::size_t u = 0; u < s.k; ++u) {
        s.offset.push_back(s.ds);
        for (std::size_t j = 0; j < s.streams[u]; ++j)
            s.owner.push_back(u);
        s.ds += s.streams[u];
    }
    return s;
}

// Closes the fixings under "one subcarrier per stream, one stream per
// subcarrier". False when they contradict.
bool propagate(const OfdmaShape &s, std::vector<int> &fixed) {
    auto at = [&](std::size_t c, std::size_t j) -> int & { return fixed[c * s.ds + j]; };
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t c = 0; c < s.m; ++c)
            for (std::size_t j = 0; j < s.ds; ++j) {
                if (at(c, j) != 1)
                    continue;
                for (std::size_t c2 = 0; c2 < s.m; ++c2)
                    if (c2 != c) {
                        if (at(c2, j) == 1)
                            return false;
                        if (at(c2, j) != 0)
                            changed = true;
                        at(c2, j) = 0;
                    }
                for (std::size_t j2 = 0; j2 < s.ds; ++j2)
                    if (j2 != j) {
                        if (at(c, j2) == 1)
                            return false;
                        if (at(c, j2) != 0)
                            changed = true;
                        at(c, j2) = 0;
                    }
            }
        for (std::size_t j = 0; j < s.ds; ++j) {
            std::size_t alive = 0, last = 0;
            bool one = false;
            for (std::size_t c = 0; c < s.m; ++c) {
                if (at(c, j) != 0) {
                    ++alive;
                    last = c;
                }
                one = one || at(c, j) == 1;
            }
            if (alive == 0)
                return false;
            if (alive == 1 && !one) {
                at(last, j) = 1;
                changed = true;
            }
        }
    }
    return true;
}

// Closed-form minimum power of a complete assignment; empty if over budget.
std::optional<rvec> ofdma_assignment_powers(const OfdmaPowerMinData &d, const OfdmaShape &s,
                                            const std::vector<int> &assignment) {
    std::vector<std::size_t> carrier(s.ds, s.m);
    std::vector<int> used(s.m, 0);
    for (std::size_t c = 0; c < s.m; ++c)
        for (std::size_t j = 0; j < s.ds; ++j)
            if (assignment[c * s.ds + j] == 1) {
                if (carrier[j] != s.m || used[c])
                    return std::nullopt;
                carrier[j] = c;
                used[c] = 1;
            }
    rvec p(s.ds, 0.0);
    for (std::size_t u = 0; u < s.k; ++u) {
        rvec gains;
        for (std::size_t j = 0; j < s.streams[u]; ++j) {
            const std::size_t c = carrier[s.offset[u] + j];
            if (c == s.m)
                return std::nullopt;
            gains.push_back(std::norm(d.h(u, c)) / d.sigma2[u]);
        }
        const rvec pu = ofdma_min_powers(gains, d.r_min[u]);
        double tot = 0.0;
        for (std::size_t j = 0; j < pu.size(); ++j) {
            p[s.offset[u] + j] = pu[j];
            tot += pu[j];
        }
        if (tot > d.p_max[u] * (1.0 + 1e-12))
            return std::nullopt;
    }
    return p;
}

} // namespace

Relaxer ofdma_relaxer(const ProblemInstance &inst, const SolverOptions &opts) {
    const auto *dp = std::get_if<OfdmaPowerMinData>(&inst.kind);
    if (!dp)
        throw std::invalid_argument("ofdma_relaxer: needs an OfdmaPowerMin instance");
    const OfdmaPowerMinData d = *dp;
    const OfdmaShape s = ofdma_shape(d);
    const std::size_t nb = s.m * s.ds;

    // Per-user power unit: the least power reaching r_min on the best carrier.
    rvec unit(s.k, 1.0);
    for (std::size_t u = 0; u < s.k; ++u) {
        double g = 0.0;
        for (std::size_t c = 0; c < s.m; ++c)
            g = std::max(g, std::norm(d.h(u, c)) / d.sigma2[u]);
        const double need = (std::exp2(d.r_min[u] / static_cast<double>(s.streams[u])) - 1.0) / std::max(g, 1e-300);
        if (need > 0.0 && std::isfinite(need))
            unit[u] = need;
    }

    Relaxer r;
    r.n_binary = nb;
    r.complete = [inst, d, s](const std::vector<int> &a) -> std::optional<std::pair<double, rvec>> {
        const auto p = ofdma_assignment_powers(d, s, a);
        if (!p)
            return std::nullopt;
        rvec x = inst.layout.zeros();
        inst.layout.set(x, "p", *p);
        rvec pi(a.size());
        for (std::size_t i = 0; i < a.size(); ++i)
            pi[i] = a[i];
        inst.layout.set(x, "pi", pi);
        if (!check_feasibility(inst, x, 1e-9).feasible)
            return std::nullopt;
        return std::make_pair(evaluate_objective(inst, x), x);
    };
    r.relax = [d, s, nb, unit, opts](const std::vector<int> &fixed_in) {
        BnbRelaxation out;
        std::vector<int> fixed = fixed_in;
        if (!propagate(s, fixed))
            return out;
        out.binaries.assign(nb, 0.0);
        bool leaf = true;
        for (std::size_t i = 0; i < nb; ++i) {
            if (fixed[i] == 1)
                out.binaries[i] = 1.0;
            leaf = leaf && fixed[i] >= 0;
        }
        if (leaf) {
            const auto p = ofdma_assignment_powers(d, s, fixed);
            if (!p)
                return out;
            out.feasible = true;
            out.bound = 0.0;
            for (double v : *p)
                out.bound += v;
            return out;
        }

        // Variables: w for every live pair, then pi for every free pair.
        std::vector<std::size_t> live, free_pairs;
        std::vector<std::size_t> w_index(nb, nb), pi_index(nb, nb);
        for (std::size_t i = 0; i < nb; ++i)
            if (fixed[i] != 0) {
                w_index[i] = live.size();
                live.push_back(i);
            }
        for (std::size_t i = 0; i < nb; ++i)
            if (fixed[i] == -1) {
                pi_index[i] = live.size() + free_pairs.size();
                free_pairs.push_back(i);
            }
        const std::size_t nv = live.size() + free_pairs.size();

        ConvexProblem prob;
        prob.n = nv;
        prob.lower.assign(nv, 0.0);
        prob.upper.assign(nv, kInf);
        rvec cost(nv, 0.0);
        for (std::size_t v = 0; v < live.size(); ++v)
            cost[v] = unit[s.owner[live[v] % s.ds]];
        for (std::size_t v = live.size(); v < nv; ++v)
            prob.upper[v] = 1.0;
        prob.objective = linear_fn(cost);

        // Stream equalities over free pairs.
        std::vector<rvec> rows;
        rvec rhs;
        for (std::size_t j = 0; j < s.ds; ++j) {
            bool has_one = false;
            rvec row(nv, 0.0);
            bool any = false;
            for (std::size_t c = 0; c < s.m; ++c) {
                const std::size_t i = c * s.ds + j;
                has_one = has_one || fixed[i] == 1;
                if (fixed[i] == -1) {
                    row[pi_index[i]] = 1.0;
                    any = true;
                }
            }
            if (!has_one && any) {
                rows.push_back(row);
                rhs.push_back(1.0);
            }
        }
        if (!rows.empty()) {
            prob.a_eq = RMatrix(rows.size(), nv);
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = 0; b < nv; ++b)
                    prob.a_eq(a, b) = rows[a][b];
            prob.b_eq = rhs;
        }
        // Subcarrier capacity (only free pairs can overfill a carrier).
        for (std::size_t c = 0; c < s.m; ++c) {
            rvec row(nv, 0.0);
            std::size_t cnt = 0;
            for (std::size_t j = 0; j < s.ds; ++j)
                if (fixed[c * s.ds + j] == -1) {
                    row[pi_index[c * s.ds + j]] = 1.0;
                    ++cnt;
                }
            if (cnt > 1)
                prob.inequalities.push_back(linear_fn(row, -1.0));
        }
        // Per-user budget and rate.
        for (std::size_t u = 0; u < s.k; ++u) {
            rvec row(nv, 0.0);
            std::vector<std::size_t> mine;
            for (std::size_t v = 0; v < live.size(); ++v)
                if (s.owner[live[v] % s.ds] == u) {
                    row[v] = 1.0;
                    mine.push_back(live[v]);
                }
            prob.inequalities.push_back(linear_fn(row, -d.p_max[u] / unit[u]));
            const double r_min = d.r_min[u];
            if (r_min <= 0.0)
                continue;
            rvec gain(nb, 0.0);
            for (std::size_t i : mine)
                gain[i] = std::norm(d.h(u, i / s.ds)) / d.sigma2[u] * unit[u];
            prob.inequalities.push_back([=, &fixed](const rvec &x, rvec *g, RMatrix *h) {
                double rate = 0.0;
                if (g)
                    g->assign(nv, 0.0);
                if (h)
                    *h = RMatrix(nv, nv);
                for (std::size_t i : mine) {
                    const double pi = fixed[i] == 1 ? 1.0 : x[pi_index[i]];
                    const double w = x[w_index[i]];
                    if (pi <= 0.0)
                        return kInf;
                    const double t = gain[i] * w / pi;
                    if (t <= -1.0)
                        return kInf;
                    rate += pi * std::log1p(t) / std::numbers::ln2;
                    // d/dw = g / ((1+t) ln2), d/dpi = (log(1+t) - t/(1+t)) / ln2
                    const double dw = gain[i] / ((1.0 + t) * std::numbers::ln2);
                    if (g) {
                        (*g)[w_index[i]] -= dw;
                        if (fixed[i] != 1)
                            (*g)[pi_index[i]] -= (std::log1p(t) - t / (1.0 + t)) / std::numbers::ln2;
                    }
                    if (h) {
                        // Hessian of -pi log(1 + g w / pi): c v v^T, v = (1, -w/pi).
                        const double c = gain[i] * gain[i] / (std::numbers::ln2 * pi * (1.0 + t) * (1.0 + t));
                        const std::size_t a = w_index[i];
                        (*h)(a, a) += c;
                        if (fixed[i] != 1) {
                            const std::size_t b = pi_index[i];
                            const double q = -w / pi;
                            (*h)(a, b) += c * q;
                            (*h)(b, a) += c * q;
                            (*h)(b, b) += c * q * q;
                        }
                    }
                }
                return r_min - rate;
            });
        }
        // McCormick: w <= p_max pi on free pairs.
        for (std::size_t i : free_pairs) {
            rvec row(nv, 0.0);
            const std::size_t u = s.owner[i % s.ds];
            row[w_index[i]] = 1.0;
            row[pi_index[i]] = -d.p_max[u] / unit[u];
            prob.inequalities.push_back(linear_fn(row));
        }
        for (std::size_t i : live)
            if (fixed[i] == 1)
                prob.upper[w_index[i]] = d.p_max[s.owner[i % s.ds]] / unit[s.owner[i % s.ds]];

        // Start: spread each stream over its free carriers, modest powers.
        rvec x0(nv, 0.0);
        for (std::size_t j = 0; j < s.ds; ++j) {
            std::size_t cnt = 0;
            for (std::size_t c = 0; c < s.m; ++c)
                cnt += fixed[c * s.ds + j] == -1;
            for (std::size_t c = 0; c < s.m; ++c)
                if (fixed[c * s.ds + j] == -1)
                    x0[pi_index[c * s.ds + j]] = 1.0 / static_cast<double>(cnt);
        }
        for (std::size_t v = 0; v < live.size(); ++v) {
            const std::size_t i = live[v];
            const double pi = fixed[i] == 1 ? 1.0 : x0[pi_index[i]];
            x0[v] = 0.5 * pi * d.p_max[s.owner[i % s.ds]] / unit[s.owner[i % s.ds]];
        }
        SolverOptions inner = opts;
        inner.tol_gap = std::min(opts.tol_gap, 1e-9);
        const ConvexResult cr = solve_convex(prob, x0, inner);
        if (cr.status == SolveStatus::Infeasible)
            return out;
        out.feasible = true;
        out.bound = cr.objective - cr.duality_gap;
        for (std::size_t i : free_pairs)
            out.binaries[i] = std::clamp(cr.x[pi_index[i]], 0.0, 1.0);
        return out;
    };
    return r;
}

GridSpec ofdma_closed_form(const ProblemInstance &inst) {
    const auto *dp = std::get_if<OfdmaPowerMinData>(&inst.kind);
    if (!dp)
        throw std::invalid_argument("ofdma_closed_form: needs an OfdmaPowerMin instance");
    const OfdmaPowerMinData d = *dp;
    const OfdmaShape s = ofdma_shape(d);
    const Layout layout = inst.layout;
    GridSpec g;
    g.inner = [d, s, layout](const rvec &x) -> std::optional<rvec> {
        const rvec pi = layout.get(x, "pi");
        std::vector<int> a(pi.size());
        for (std::size_t i = 0; i < pi.size(); ++i)
            a[i] = pi[i] >= 0.5 ? 1 : 0;
        const auto p = ofdma_assignment_powers(d, s, a);
        if (!p)
            return std::nullopt;
        rvec out = x;
        layout.set(out, "p", *p);
        return out;
    };
    return g;
}

} // namespace ngma
