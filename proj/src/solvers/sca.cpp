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

double gradient_check(const std::function<double(const rvec &)> &f, const std::function<rvec(const rvec &)> &grad,
                      const rvec &x, double step) {
    const rvec g = grad(x);
    if (g.size() != x.size())
        throw std::invalid_argument("gradient_check: gradient has wrong length");
    rvec fd(x.size());
    rvec y = x;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = step * std::max(1.0, std::abs(x[i]));
        y[i] = x[i] + h;
        const double up = f(y);
        y[i] = x[i] - h;
        const double down = f(y);
        y[i] = x[i];
        fd[i] = (up - down) / (2.0 * h);
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        diff = std::max(diff, std::abs(fd[i] - g[i]));
    return diff / std::max(norm_inf(g), 1e-300);
}

double kkt_residual(const rvec &grad_f, const rvec &constraint_values, const std::vector<rvec> &constraint_grads,
                    double active_tol) {
    const std::size_t n = grad_f.size();
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < constraint_values.size(); ++i)
        if (constraint_values[i] >= -active_tol)
            active.push_back(i);
    if (active.size() > 16)
        throw std::invalid_argument("kkt_residual: too many active constraints to enumerate");
    const double scale = std::max(1.0, norm(grad_f));
    double best = norm(grad_f);
    // Nonnegative least squares by enumerating supports.
    for (std::size_t mask = 1; mask < (std::size_t{1} << active.size()); ++mask) {
        std::vector<std::size_t> sup;
        for (std::size_t b = 0; b < active.size(); ++b)
            if (mask >> b & 1u)
                sup.push_back(active[b]);
        const std::size_t m = sup.size();
        RMatrix gram(m, m);
        rvec rhs(m);
        for (std::size_t a = 0; a < m; ++a) {
            rhs[a] = dot(constraint_grads[sup[a]], grad_f);
            for (std::size_t b = 0; b < m; ++b)
                gram(a, b) = dot(constraint_grads[sup[a]], constraint_grads[sup[b]]);
        }
        rvec lam;
        try {
            lam = solve_linear(gram, rhs);
        } catch (const std::runtime_error &) {
            continue;
        }
        if (std::any_of(lam.begin(), lam.end(), [](double v) { return v < 0.0; }))
            continue;
        rvec r = grad_f;
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t i = 0; i < n; ++i)
                r[i] -= lam[a] * constraint_grads[sup[a]][i];
        best = std::min(best, norm(r));
    }
    return best / scale;
}

ScaResult solve_sca(const ScaModel &model, const rvec &x0, const SolverOptions &opts) {
    validate(opts);
    if (x0.size() != model.n)
        throw std::invalid_argument("solve_sca: x0 has wrong length");
    ScaResult res;
    rvec x = x0;
    double f = model.objective(x);
    res.history.push_back(f);
    SolverOptions inner = opts;
    inner.tol_gap = std::min(opts.tol_gap, 1e-10);
    const std::size_t cap = std::min<std::size_t>(opts.max_iter, 200);
    bool converged = false;
    std::size_t it = 0;
    for (; it < cap; ++it) {
        const ConvexResult r = solve_convex(model.surrogate(x), x, inner);
        if (r.status == SolveStatus::Infeasible)
            throw std::runtime_error("solve_sca: surrogate subproblem infeasible at a feasible iterate");
        const double fn = model.objective(r.x);
        if (!(fn > f)) {
            converged = true;
            break;
        }
        const double rel = (fn - f) / std::max(1.0, std::abs(f));
        x = r.x;
        f = fn;
        res.history.push_back(f);
        if (rel <= opts.tol_gap) {
            converged = true;
            break;
        }
    }
    res.solution.x = x;
    res.solution.objective = f;
    res.solution.iterations = it;
    res.solution.status = converged ? SolveStatus::Feasible : SolveStatus::IterationLimit;
    if (model.gradient && model.constraints && model.constraint_gradients)
        res.kkt_residual = kkt_residual(model.gradient(x), model.constraints(x), model.constraint_gradients(x), 1e-6);
    return res;
}

// ---- ISAC model -----------------------------------------------------------

namespace {

// Real rows of a complex linear map acting on interleaved (re, im) pairs.
struct RealMap {
    RMatrix a;
    rvec b;
};

void put(RMatrix &a, std::size_t row, std::size_t var, cd c) {
    a(row, 2 * var) += c.real();
    a(row, 2 * var + 1) -= c.imag();
    a(row + 1, 2 * var) += c.imag();
    a(row + 1, 2 * var + 1) += c.real();
}

double sq_residual(const RealMap &m, const rvec &x, rvec *r) {
    rvec v = m.a * x;
    for (std::size_t i = 0; i < v.size(); ++i)
        v[i] -= m.b[i];
    const double s = dot(v, v);
    if (r)
        *r = std::move(v);
    return s;
}

rvec grad_sq(const RealMap &m, const rvec &r, double scale) {
    rvec g(m.a.cols(), 0.0);
    for (std::size_t i = 0; i < m.a.rows(); ++i)
        for (std::size_t j = 0; j < m.a.cols(); ++j)
            g[j] += 2.0 * scale * m.a(i, j) * r[i];
    return g;
}

} // namespace

ScaModel isac_sca_model(const ProblemInstance &inst) {
    const auto *dp = std::get_if<IsacCommCentricData>(&inst.kind);
    if (!dp)
        throw std::invalid_argument("isac_sca_model: needs an IsacCommCentric instance");
    const IsacCommCentricData d = *dp;
    const std::size_t k = d.h_c.rows(), n = d.h_c.cols(), l = d.s.cols();
    const std::size_t nx = inst.layout.size();
    const double inv_l = 1.0 / static_cast<double>(l);
    const std::size_t off = inst.layout.block("P").offset;

    // e_u = (1/L) ||A_u x - b_u||^2 with y(u, t) = sum_{n,k} h(u, n) s(k, t) P(n, k).
    std::vector<RealMap> user(k);
    rvec signal(k, 0.0);
    for (std::size_t u = 0; u < k; ++u) {
        user[u].a = RMatrix(2 * l, nx);
        user[u].b.assign(2 * l, 0.0);
        for (std::size_t t = 0; t < l; ++t) {
            user[u].b[2 * t] = d.s(u, t).real();
            user[u].b[2 * t + 1] = d.s(u, t).imag();
            signal[u] += std::norm(d.s(u, t)) * inv_l;
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t c = 0; c < k; ++c)
                    put(user[u].a, 2 * t, off / 2 + a * k + c, d.h_c(u, a) * d.s(c, t));
        }
    }
    // (P S)(n, t) rows shared by the power and beampattern constraints.
    RealMap beam;
    beam.a = RMatrix(2 * n * l, nx);
    beam.b.assign(2 * n * l, 0.0);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t t = 0; t < l; ++t) {
            const std::size_t row = 2 * (a * l + t);
            beam.b[row] = d.x0(a, t).real();
            beam.b[row + 1] = d.x0(a, t).imag();
            for (std::size_t c = 0; c < k; ++c)
                put(beam.a, row, off / 2 + a * k + c, d.s(c, t));
        }
    const bool sensing = std::isfinite(d.delta);
    RealMap power{beam.a, rvec(beam.b.size(), 0.0)};

    auto rate_slope = [d, signal](std::size_t u, double e) {
        const double s = e + d.sigma2[u];
        return -signal[u] / (s * (s + signal[u]) * std::numbers::ln2);
    };

    ScaModel m;
    m.n = nx;
    m.objective = [inst](const rvec &x) { return evaluate_objective(inst, x); };
    m.gradient = [user, inv_l, rate_slope, nx](const rvec &x) {
        rvec g(nx, 0.0);
        for (std::size_t u = 0; u < user.size(); ++u) {
            rvec r;
            const double e = sq_residual(user[u], x, &r) * inv_l;
            const rvec ge = grad_sq(user[u], r, inv_l);
            const double w = rate_slope(u, e);
            for (std::size_t i = 0; i < nx; ++i)
                g[i] += w * ge[i];
        }
        return g;
    };
    // Constraints normalized by their limits.
    m.constraints = [power, beam, inv_l, d, sensing](const rvec &x) {
        rvec c{sq_residual(power, x, nullptr) * inv_l / d.p_max - 1.0};
        if (sensing)
            c.push_back(sq_residual(beam, x, nullptr) * inv_l / std::max(d.delta, 1e-300) - 1.0);
        return c;
    };
    m.constraint_gradients = [power, beam, inv_l, d, sensing](const rvec &x) {
        rvec r;
        sq_residual(power, x, &r);
        std::vector<rvec> g{grad_sq(power, r, inv_l / d.p_max)};
        if (sensing) {
            sq_residual(beam, x, &r);
            g.push_back(grad_sq(beam, r, inv_l / std::max(d.delta, 1e-300)));
        }
        return g;
    };
    m.surrogate = [user, power, beam, inv_l, rate_slope, d, sensing, nx](const rvec &xj) {
        // Minimize sum |g'(e_u(xj))| e_u(x): the linearized rate loss.
        std::size_t rows = 0;
        for (const auto &u : user)
            rows += u.a.rows();
        RMatrix a(rows, nx);
        rvec b(rows);
        std::size_t r0 = 0;
        for (std::size_t u = 0; u < user.size(); ++u) {
            const double e = sq_residual(user[u], xj, nullptr) * inv_l;
            const double w = std::sqrt(-rate_slope(u, e) * inv_l);
            for (std::size_t i = 0; i < user[u].a.rows(); ++i) {
                for (std::size_t j = 0; j < nx; ++j)
                    a(r0 + i, j) = w * user[u].a(i, j);
                b[r0 + i] = w * user[u].b[i];
            }
            r0 += user[u].a.rows();
        }
        ConvexProblem p;
        p.n = nx;
        p.objective = quadratic_fn(a, b, 1.0);
        p.inequalities.push_back(quadratic_fn(power.a, power.b, inv_l / d.p_max, -1.0));
        if (sensing)
            p.inequalities.push_back(quadratic_fn(beam.a, beam.b, inv_l / std::max(d.delta, 1e-300), -1.0));
        return p;
    };
    return m;
}

ScaResult solve_sca(const ProblemInstance &inst, const rvec &x0, const SolverOptions &opts) {
    const ScaModel m = isac_sca_model(inst);
    if (!check_feasibility(inst, x0, opts.tol_feas).feasible)
        throw std::invalid_argument("solve_sca: x0 is not feasible");
    ScaResult r = solve_sca(m, x0, opts);
    r.solution.max_residual = check_feasibility(inst, r.solution.x, opts.tol_feas).max_residual;
    return r;
}

} // namespace ngma
