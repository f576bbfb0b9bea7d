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
#include <string>

namespace ngma {

void validate(const SolverOptions &opts) {
    if (!(opts.tol_gap > 0.0) || !(opts.tol_feas > 0.0))
        throw std::invalid_argument("SolverOptions: tolerances must be positive");
    if (opts.max_iter == 0)
        throw std::invalid_argument("SolverOptions: max_iter must be positive");
}

SmoothFn quadratic_fn(RMatrix a, rvec b, double scale, double offset) {
    if (a.rows() != b.size())
        throw std::invalid_argument("quadratic_fn: shape mismatch");
    RMatrix hess_c = a.transpose() * a;
    for (std::size_t i = 0; i < hess_c.rows(); ++i)
        for (std::size_t j = 0; j < hess_c.cols(); ++j)
            hess_c(i, j) *= 2.0 * scale;
    return [a = std::move(a), b = std::move(b), scale, offset, hess_c](const rvec &x, rvec *g, RMatrix *h) {
        rvec r = a * x;
        for (std::size_t i = 0; i < r.size(); ++i)
            r[i] -= b[i];
        if (g) {
            g->assign(x.size(), 0.0);
            for (std::size_t i = 0; i < a.rows(); ++i)
                for (std::size_t j = 0; j < a.cols(); ++j)
                    (*g)[j] += 2.0 * scale * a(i, j) * r[i];
        }
        if (h)
            *h = hess_c;
        return scale * dot(r, r) + offset;
    };
}

SmoothFn linear_fn(rvec c, double offset) {
    return [c = std::move(c), offset](const rvec &x, rvec *g, RMatrix *h) {
        if (g)
            *g = c;
        if (h)
            *h = RMatrix(x.size(), x.size());
        return dot(c, x) + offset;
    };
}

namespace {

// Constraint in the reduced variable z: either a general smooth function of
// x = base + Z z (with an optional slack coordinate), or a bound on one x_i.
struct Barrier {
    std::size_t nz = 0;          // reduced dimension (plus slack if phase I)
    bool slack = false;          // last coordinate of z is the phase-I slack
    const RMatrix *zbasis = nullptr; // n x r, null means identity
    rvec base;

    std::vector<const SmoothFn *> smooth;
    struct Bound {
        std::size_t index;
        double sign; // +1: x_i - v <= 0, -1: v - x_i <= 0
        double value;
        bool hard = false; // phase I leaves it unrelaxed
    };
    std::vector<Bound> bounds;

    std::size_t count() const { return smooth.size() + bounds.size() + (slack ? 1 : 0); }

    rvec to_x(const rvec &z) const {
        const std::size_t r = slack ? nz - 1 : nz;
        if (!zbasis) {
            return rvec(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(r));
        }
        rvec x = base;
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < r; ++j)
                x[i] += (*zbasis)(i, j) * z[j];
        return x;
    }

    // Lift x-space gradient/Hessian into z-space.
    void lift(const rvec &gx, const RMatrix &hx, rvec &gz, RMatrix &hz, bool want_h) const {
        const std::size_t r = slack ? nz - 1 : nz;
        gz.assign(nz, 0.0);
        if (want_h)
            hz = RMatrix(nz, nz);
        if (!zbasis) {
            for (std::size_t i = 0; i < r; ++i)
                gz[i] = gx[i];
            if (want_h)
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = 0; j < r; ++j)
                        hz(i, j) = hx(i, j);
            return;
        }
        const RMatrix &zb = *zbasis;
        for (std::size_t j = 0; j < r; ++j)
            for (std::size_t i = 0; i < gx.size(); ++i)
                gz[j] += zb(i, j) * gx[i];
        if (want_h) {
            RMatrix tmp(hx.rows(), r);
            for (std::size_t i = 0; i < hx.rows(); ++i)
                for (std::size_t k = 0; k < hx.cols(); ++k) {
                    const double v = hx(i, k);
                    if (v == 0.0)
                        continue;
                    for (std::size_t j = 0; j < r; ++j)
                        tmp(i, j) += v * zb(k, j);
                }
            for (std::size_t a = 0; a < r; ++a)
                for (std::size_t i = 0; i < zb.rows(); ++i) {
                    const double v = zb(i, a);
                    if (v == 0.0)
                        continue;
                    for (std::size_t b = 0; b < r; ++b)
                        hz(a, b) += v * tmp(i, b);
                }
        }
    }

    // Constraint values g_i(x) (minus slack in phase I).
    bool values(const rvec &z, rvec &out) const {
        const rvec x = to_x(z);
        const double s = slack ? z.back() : 0.0;
        out.clear();
        for (const auto *f : smooth) {
            const double v = (*f)(x, nullptr, nullptr) - s;
            if (!std::isfinite(v))
                return false;
            out.push_back(v);
        }
        for (const auto &b : bounds)
            out.push_back(b.sign * (x[b.index] - b.value) - (b.hard ? 0.0 : s));
        if (slack)
            out.push_back(-1.0 - s); // keeps phase I bounded: s >= -1
        return true;
    }
};

struct Objective {
    const SmoothFn *f = nullptr; // null in phase I (objective is the slack)
};

double eval_objective(const Barrier &bar, const Objective &obj, const rvec &z, rvec *gz, RMatrix *hz) {
    if (!obj.f) {
        if (gz) {
            gz->assign(bar.nz, 0.0);
            gz->back() = 1.0;
        }
        if (hz)
            *hz = RMatrix(bar.nz, bar.nz);
        return z.back();
    }
    const rvec x = bar.to_x(z);
    if (!gz)
        return (*obj.f)(x, nullptr, nullptr);
    rvec gx;
    RMatrix hx;
    const double v = (*obj.f)(x, &gx, hz ? &hx : nullptr);
    bar.lift(gx, hx, *gz, *hz, hz != nullptr);
    return v;
}

// Barrier function value t f(z) - sum log(-g(z)); +inf outside the domain.
double phi(const Barrier &bar, const Objective &obj, double t, const rvec &z) {
    rvec g;
    if (!bar.values(z, g))
        return kInf;
    double s = 0.0;
    for (double v : g) {
        if (!(v < 0.0))
            return kInf;
        s -= std::log(-v);
    }
    const double f = eval_objective(bar, obj, z, nullptr, nullptr);
    if (!std::isfinite(f))
        return kInf;
    return t * f + s;
}

void barrier_derivatives(const Barrier &bar, const Objective &obj, double t, const rvec &z, rvec &grad,
                         RMatrix &hess) {
    const std::size_t nz = bar.nz;
    rvec gf;
    RMatrix hf;
    eval_objective(bar, obj, z, &gf, &hf);
    grad.assign(nz, 0.0);
    hess = RMatrix(nz, nz);
    for (std::size_t i = 0; i < nz; ++i) {
        grad[i] = t * gf[i];
        for (std::size_t j = 0; j < nz; ++j)
            hess(i, j) = t * hf(i, j);
    }
    const rvec x = bar.to_x(z);
    const double s = bar.slack ? z.back() : 0.0;
    auto add_term = [&](double gval, const rvec &gg, const RMatrix *hg) {
        const double inv = 1.0 / (-gval);
        for (std::size_t i = 0; i < nz; ++i) {
            grad[i] += inv * gg[i];
            for (std::size_t j = 0; j < nz; ++j)
                hess(i, j) += inv * inv * gg[i] * gg[j] + (hg ? inv * (*hg)(i, j) : 0.0);
        }
    };
    for (const auto *f : bar.smooth) {
        rvec gx;
        RMatrix hx;
        const double v = (*f)(x, &gx, &hx) - s;
        rvec gz;
        RMatrix hz;
        bar.lift(gx, hx, gz, hz, true);
        if (bar.slack)
            gz.back() = -1.0;
        add_term(v, gz, &hz);
    }
    for (const auto &b : bar.bounds) {
        rvec gx(x.size(), 0.0);
        gx[b.index] = b.sign;
        rvec gz;
        RMatrix hz;
        bar.lift(gx, RMatrix(), gz, hz, false);
        if (bar.slack)
            gz.back() = b.hard ? 0.0 : -1.0;
        add_term(b.sign * (x[b.index] - b.value) - (b.hard ? 0.0 : s), gz, nullptr);
    }
    if (bar.slack) {
        rvec gz(nz, 0.0);
        gz.back() = -1.0;
        add_term(-1.0 - s, gz, nullptr);
    }
}

rvec newton_direction(RMatrix h, const rvec &g) {
    rvec rhs(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        rhs[i] = -g[i];
    double diag = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        diag = std::max(diag, std::abs(h(i, i)));
    double reg = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
        try {
            RMatrix hr = h;
            for (std::size_t i = 0; i < g.size(); ++i)
                hr(i, i) += reg;
            return solve_linear(hr, rhs);
        } catch (const std::runtime_error &) {
            reg = reg == 0.0 ? 1e-12 * std::max(1.0, diag) : reg * 100.0;
        }
    }
    throw std::runtime_error("solve_convex: singular Newton system");
}

struct CenterStats {
    std::size_t steps = 0;
    bool stalled = false;
};

// Damped Newton centering on phi(t, .). stop() may end early (phase I).
CenterStats center(const Barrier &bar, const Objective &obj, double t, rvec &z, std::size_t max_steps,
                   const std::function<bool(const rvec &)> &stop) {
    CenterStats st;
    double cur = phi(bar, obj, t, z);
    double prev_dec = kInf;
    for (; st.steps < max_steps; ++st.steps) {
        if (stop && stop(z))
            return st;
        rvec g;
        RMatrix h;
        barrier_derivatives(bar, obj, t, z, g, h);
        const rvec dz = newton_direction(h, g);
        const double dec = -dot(g, dz);
        if (!(dec > 1e-18))
            return st;
        // Roundoff floor: the decrement stopped shrinking.
        if (dec < 1e-10 && dec >= 0.5 * prev_dec)
            return st;
        prev_dec = dec;
        double step = 1.0;
        rvec trial(z.size());
        bool moved = false;
        // Inside the quadratic region the full step is taken whenever it stays
        // in the domain; the Armijo test is unreliable there once t f dwarfs
        // the decrement.
        const bool quadratic = dec < 0.25;
        for (int ls = 0; ls < 80; ++ls) {
            for (std::size_t i = 0; i < z.size(); ++i)
                trial[i] = z[i] + step * dz[i];
            const double v = phi(bar, obj, t, trial);
            if ((quadratic && std::isfinite(v)) || v <= cur - 0.25 * step * dec) {
                z = trial;
                cur = v;
                moved = true;
                break;
            }
            step *= 0.5;
        }
        if (!moved) {
            st.stalled = true;
            return st;
        }
        if (dec * 0.5 <= 1e-18)
            return st;
    }
    return st;
}

} // namespace

ConvexResult solve_convex(const ConvexProblem &prob, const rvec &x0, const SolverOptions &opts) {
    validate(opts);
    const std::size_t n = prob.n;
    if (x0.size() != n)
        throw std::invalid_argument("solve_convex: x0 has wrong length");
    if (!prob.objective)
        throw std::invalid_argument("solve_convex: objective missing");
    if ((!prob.lower.empty() && prob.lower.size() != n) || (!prob.upper.empty() && prob.upper.size() != n))
        throw std::invalid_argument("solve_convex: bound vectors have wrong length");

    ConvexResult res;
    Barrier bar;
    for (const auto &f : prob.inequalities)
        bar.smooth.push_back(&f);
    for (std::size_t i = 0; i < n; ++i) {
        if (!prob.upper.empty() && std::isfinite(prob.upper[i]))
            bar.bounds.push_back({i, 1.0, prob.upper[i]});
        if (!prob.lower.empty() && std::isfinite(prob.lower[i]))
            bar.bounds.push_back({i, -1.0, prob.lower[i]});
    }

    // Equality elimination: x = base + Z y.
    RMatrix zb;
    rvec base = x0;
    std::size_t r = n;
    if (prob.a_eq.rows() > 0) {
        const RMatrix &a = prob.a_eq;
        if (a.cols() != n || prob.b_eq.size() != a.rows())
            throw std::invalid_argument("solve_convex: equality shape mismatch");
        rvec resid = a * x0;
        for (std::size_t i = 0; i < resid.size(); ++i)
            resid[i] -= prob.b_eq[i];
        const RMatrix aat = a * a.transpose();
        rvec w;
        try {
            w = solve_linear(aat, resid);
        } catch (const std::runtime_error &) {
            throw std::invalid_argument("solve_convex: equality rows are linearly dependent");
        }
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < a.rows(); ++i)
                base[j] -= a(i, j) * w[i];
        zb = nullspace(a);
        r = zb.cols();
        bar.zbasis = &zb;
    }
    bar.base = base;
    bar.nz = r;

    const std::size_t m = bar.count();
    const std::size_t max_steps = opts.max_iter;
    Objective obj{&prob.objective};

    rvec z(r, 0.0);
    if (!bar.zbasis)
        z = x0;

    rvec gv;
    bool strict = bar.values(z, gv) && std::all_of(gv.begin(), gv.end(), [](double v) { return v < 0.0; });
    if (strict && !std::isfinite(eval_objective(bar, obj, z, nullptr, nullptr)))
        strict = false;

    if (!strict) {
        // Phase I: min s s.t. g_i(x) <= s.
        if (!bar.values(z, gv))
            throw std::invalid_argument("solve_convex: constraints not finite at x0");
        double smax = -kInf;
        for (double v : gv)
            smax = std::max(smax, v);
        Barrier p1 = bar;
        p1.slack = true;
        // Bounds already strict at the start stay hard, so x never leaves the
        // domain of constraints that are only defined inside them.
        {
            const rvec xs = bar.to_x(z);
            for (auto &b : p1.bounds)
                b.hard = b.sign * (xs[b.index] - b.value) < 0.0;
        }
        p1.nz = r + 1;
        rvec zs = z;
        zs.push_back(std::max(smax, 0.0) + 1.0);
        Objective obj1{nullptr};
        auto feasible_now = [&](const rvec &zz) {
            rvec v;
            if (!bar.values(rvec(zz.begin(), zz.end() - 1), v))
                return false;
            return std::all_of(v.begin(), v.end(), [](double q) { return q < 0.0; }) &&
                   std::isfinite(eval_objective(bar, obj, rvec(zz.begin(), zz.end() - 1), nullptr, nullptr));
        };
        double t = 1.0;
        bool found = false;
        for (int outer = 0; outer < 60; ++outer) {
            const CenterStats st = center(p1, obj1, t, zs, max_steps, feasible_now);
            res.iterations += st.steps;
            if (feasible_now(zs)) {
                found = true;
                break;
            }
            if (static_cast<double>(m + 1) / t < 1e-13)
                break;
            t *= 20.0;
        }
        if (!found) {
            res.status = SolveStatus::Infeasible;
            res.x = bar.to_x(rvec(zs.begin(), zs.end() - 1));
            res.objective = kInf;
            return res;
        }
        z.assign(zs.begin(), zs.end() - 1);
    }

    double f0 = std::abs(eval_objective(bar, obj, z, nullptr, nullptr));
    double t = m > 0 ? std::max(1.0, static_cast<double>(m) / std::max(f0, 1e-12)) * 1e-3 : 1.0;
    t = std::max(t, 1e-6);
    res.status = SolveStatus::IterationLimit;
    std::size_t total_steps = 0;
    for (int outer = 0; outer < 80; ++outer) {
        const CenterStats st = center(bar, obj, t, z, max_steps, nullptr);
        total_steps += st.steps;
        if (m == 0) {
            res.status = st.steps < max_steps ? SolveStatus::Optimal : SolveStatus::IterationLimit;
            break;
        }
        const double f = eval_objective(bar, obj, z, nullptr, nullptr);
        const double gap = static_cast<double>(m) / t;
        if (gap <= opts.tol_gap * std::max(1.0, std::abs(f))) {
            res.status = SolveStatus::Optimal;
            break;
        }
        if (total_steps > 50 * max_steps)
            break;
        t *= 20.0;
    }
    res.iterations += total_steps;
    res.x = bar.to_x(z);
    res.objective = (*obj.f)(res.x, nullptr, nullptr);
    res.duality_gap = m > 0 ? static_cast<double>(m) / t : 0.0;

    // Multipliers and stationarity residual in the reduced space.
    rvec g;
    bar.values(z, g);
    res.multipliers.assign(prob.inequalities.size(), 0.0);
    rvec gf;
    RMatrix hf;
    rvec gz;
    eval_objective(bar, obj, z, &gz, nullptr);
    const double gnorm = std::max(1.0, norm_inf(gz));
    const rvec x = res.x;
    for (std::size_t i = 0; i < bar.smooth.size(); ++i) {
        const double lam = 1.0 / (-t * g[i]);
        res.multipliers[i] = lam;
        rvec gx;
        (*bar.smooth[i])(x, &gx, nullptr);
        rvec gi;
        RMatrix dummy;
        bar.lift(gx, RMatrix(), gi, dummy, false);
        for (std::size_t j = 0; j < gz.size(); ++j)
            gz[j] += lam * gi[j];
    }
    for (std::size_t i = 0; i < bar.bounds.size(); ++i) {
        const auto &b = bar.bounds[i];
        const double lam = 1.0 / (-t * g[bar.smooth.size() + i]);
        rvec gx(n, 0.0);
        gx[b.index] = b.sign;
        rvec gi;
        RMatrix dummy;
        bar.lift(gx, RMatrix(), gi, dummy, false);
        for (std::size_t j = 0; j < gz.size(); ++j)
            gz[j] += lam * gi[j];
    }
    res.kkt_residual = norm_inf(gz) / gnorm;
    return res;
}

} // namespace ngma
