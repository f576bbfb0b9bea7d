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

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ngma {

namespace {

constexpr std::size_t kAdmmMaxIter = 20000;
constexpr std::size_t kRandomizations = 200;

// Hermitian N x N <-> R^{N^2}, isometric for the Frobenius inner product:
// diagonal, then sqrt(2) (Re, Im) of each upper entry.
void hvec(const CMatrix &a, rvec &out, std::size_t offset) {
    const std::size_t n = a.rows();
    std::size_t t = offset;
    for (std::size_t i = 0; i < n; ++i)
        out[t++] = a(i, i).real();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            out[t++] = std::sqrt(2.0) * a(i, j).real();
            out[t++] = std::sqrt(2.0) * a(i, j).imag();
        }
}

CMatrix hunvec(const rvec &v, std::size_t offset, std::size_t n) {
    CMatrix a(n, n);
    std::size_t t = offset;
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) = v[t++];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const cd e(v[t] / std::sqrt(2.0), v[t + 1] / std::sqrt(2.0));
            t += 2;
            a(i, j) = e;
            a(j, i) = std::conj(e);
        }
    return a;
}

std::vector<std::vector<std::size_t>> interferers(const SinrPowerProblem &prob) {
    const std::size_t k = prob.h.size();
    std::vector<std::vector<std::size_t>> out(k);
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t r = 0; r < k; ++r)
            if (r != u && prob.order.alpha(u, r) == 1)
                out[u].push_back(r);
    return out;
}

// Minimum powers meeting every SINR target with the beam directions fixed;
// empty when the targets are out of reach or an antenna limit breaks.
std::optional<std::vector<cvec>> restore_power(const SinrPowerProblem &prob,
                                               const std::vector<std::vector<std::size_t>> &interf,
                                               const std::vector<cvec> &dirs) {
    const std::size_t k = prob.h.size(), n = prob.h[0].size();
    RMatrix a(k, k);
    rvec b(k);
    for (std::size_t u = 0; u < k; ++u) {
        a(u, u) = std::norm(dot(prob.h[u], dirs[u]));
        for (auto r : interf[u])
            a(u, r) = -prob.gamma[u] * std::norm(dot(prob.h[u], dirs[r]));
        b[u] = prob.gamma[u] * prob.sigma2[u];
    }
    rvec q;
    try {
        q = solve_linear(a, b);
    } catch (const std::runtime_error &) {
        return std::nullopt;
    }
    std::vector<cvec> beams(k);
    for (std::size_t u = 0; u < k; ++u) {
        if (!std::isfinite(q[u]) || q[u] < -1e-12 * std::max(1.0, std::abs(q[u])))
            return std::nullopt;
        beams[u] = scaled(dirs[u], std::sqrt(std::max(0.0, q[u])));
    }
    const rvec sinr = miso_sinr(prob.h, beams, prob.order, prob.sigma2);
    for (std::size_t u = 0; u < k; ++u)
        if (sinr[u] < prob.gamma[u] * (1.0 - 1e-9))
            return std::nullopt;
    for (std::size_t i = 0; i < prob.antenna_power.size() && i < n; ++i) {
        double s = 0.0;
        for (const auto &p : beams)
            s += std::norm(p[i]);
        if (s > prob.antenna_power[i] * (1.0 + 1e-9))
            return std::nullopt;
    }
    return beams;
}

double total_power(const std::vector<cvec> &beams) {
    double s = 0.0;
    for (const auto &p : beams)
        s += norm2(p);
    return s;
}

} // namespace

SdrResult solve_sdr(const SinrPowerProblem &prob, const SolverOptions &opts) {
    validate(opts);
    const std::size_t k = prob.h.size();
    if (k == 0)
        throw std::invalid_argument("solve_sdr: no users");
    const std::size_t n = prob.h[0].size();
    if (prob.gamma.size() != k || prob.sigma2.size() != k || prob.order.size() != k)
        throw std::invalid_argument("solve_sdr: per-user vectors must have K entries");
    if (!prob.antenna_power.empty() && prob.antenna_power.size() != n)
        throw std::invalid_argument("solve_sdr: one power limit per antenna");
    for (std::size_t u = 0; u < k; ++u)
        if (prob.h[u].size() != n || prob.gamma[u] < 0.0 || !(prob.sigma2[u] > 0.0))
            throw std::invalid_argument("solve_sdr: bad channel, target or noise for user " + std::to_string(u));
    const auto interf = interferers(prob);

    // Power unit: the largest interference-free single-user requirement.
    double unit = 0.0;
    for (std::size_t u = 0; u < k; ++u)
        unit = std::max(unit, prob.gamma[u] * prob.sigma2[u] / std::max(norm2(prob.h[u]), 1e-300));
    if (unit == 0.0)
        unit = 1.0;

    const std::size_t nn = n * n, na = prob.antenna_power.size(), m = k + na, dim = k * nn + m;
    RMatrix a(m, dim);
    rvec b(m), c(dim, 0.0);
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t i = 0; i < n; ++i)
            c[u * nn + i] = 1.0;
    rvec hv(nn);
    for (std::size_t u = 0; u < k; ++u) {
        hvec(CMatrix::outer(prob.h[u], prob.h[u]), hv, 0);
        const double g = unit / prob.sigma2[u];
        for (std::size_t t = 0; t < nn; ++t) {
            a(u, u * nn + t) = g * hv[t];
            for (auto r : interf[u])
                a(u, r * nn + t) = -prob.gamma[u] * g * hv[t];
        }
        a(u, k * nn + u) = -1.0;
        b[u] = prob.gamma[u];
    }
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t u = 0; u < k; ++u)
            a(k + i, u * nn + i) = -1.0;
        a(k + i, k * nn + k + i) = -1.0;
        b[k + i] = -prob.antenna_power[i] / unit;
    }
    for (std::size_t r = 0; r < m; ++r) {
        double s = 0.0;
        for (std::size_t t = 0; t < dim; ++t)
            s += a(r, t) * a(r, t);
        s = std::sqrt(s);
        for (std::size_t t = 0; t < dim; ++t)
            a(r, t) /= s;
        b[r] /= s;
    }
    const RMatrix at = a.transpose();
    RMatrix gram = a * at, gram_inv(m, m);
    for (std::size_t j = 0; j < m; ++j) {
        rvec e(m, 0.0);
        e[j] = 1.0;
        const rvec col = solve_linear(gram, e);
        for (std::size_t i = 0; i < m; ++i)
            gram_inv(i, j) = col[i];
    }
    auto project_affine = [&](rvec v) {
        rvec r = a * v;
        for (std::size_t i = 0; i < m; ++i)
            r[i] -= b[i];
        const rvec w = at * (gram_inv * r);
        for (std::size_t t = 0; t < dim; ++t)
            v[t] -= w[t];
        return v;
    };
    auto project_cone = [&](rvec v) {
        for (std::size_t u = 0; u < k; ++u)
            hvec(psd_project(hunvec(v, u * nn, n)), v, u * nn);
        for (std::size_t t = k * nn; t < dim; ++t)
            v[t] = std::max(0.0, v[t]);
        return v;
    };

    SdrResult res;
    const double eps = std::min(opts.tol_gap, 1e-9), relax = 1.6;
    double rho = 1.0;
    rvec x(dim, 0.0), z(dim, 0.0), u(dim, 0.0), du(dim, 0.0);
    bool converged = false;
    for (std::size_t it = 0; it < kAdmmMaxIter; ++it) {
        rvec v(dim);
        for (std::size_t t = 0; t < dim; ++t)
            v[t] = z[t] - u[t] - c[t] / rho;
        x = project_affine(std::move(v));
        rvec xr(dim), w(dim);
        for (std::size_t t = 0; t < dim; ++t) {
            xr[t] = relax * x[t] + (1.0 - relax) * z[t];
            w[t] = xr[t] + u[t];
        }
        const rvec z_prev = z;
        z = project_cone(std::move(w));
        double r2 = 0.0, s2 = 0.0, xn = 0.0, zn = 0.0, un = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
            du[t] = xr[t] - z[t];
            u[t] += du[t];
            r2 += (x[t] - z[t]) * (x[t] - z[t]);
            s2 += (z[t] - z_prev[t]) * (z[t] - z_prev[t]);
            xn += x[t] * x[t];
            zn += z[t] * z[t];
            un += u[t] * u[t];
        }
        const double r = std::sqrt(r2), s = rho * std::sqrt(s2);
        res.iterations = it + 1;
        res.primal_residual = r;
        const double scale = std::sqrt(static_cast<double>(dim));
        if (it > 0 && r <= eps * (scale + std::sqrt(std::max(xn, zn))) &&
            s <= eps * (scale + rho * std::sqrt(un))) {
            converged = true;
            break;
        }
        if ((it + 1) % 25 == 0) {
            double f = 1.0;
            if (r > 10.0 * s)
                f = 2.0;
            else if (s > 10.0 * r)
                f = 0.5;
            if (f != 1.0) {
                rho *= f;
                for (auto &e : u)
                    e /= f;
            }
        }
    }

    if (!converged) {
        // Farkas test on the last dual increment: lambda >= 0 with
        // sum_r lambda_r A_r <= 0 on every block and b^T lambda > 0.
        for (double sign : {1.0, -1.0}) {
            rvec lambda(m);
            for (std::size_t r = 0; r < m; ++r)
                lambda[r] = std::max(0.0, sign * du[k * nn + r]);
            if (dot(lambda, b) <= 0.0)
                continue;
            const rvec y = at * lambda;
            bool ok = true;
            for (std::size_t q = 0; q < k && ok; ++q)
                ok = eig_hermitian(hunvec(y, q * nn, n)).values.back() <= 1e-9 * norm(lambda);
            if (ok) {
                res.status = SolveStatus::Infeasible;
                return res;
            }
        }
    }

    res.lifted.resize(k);
    std::vector<cvec> dirs(k);
    for (std::size_t q = 0; q < k; ++q) {
        CMatrix pk = hunvec(z, q * nn, n);
        pk *= unit;
        const HermitianEig e = eig_hermitian(pk);
        const double top = e.values.back();
        res.lifted_power += pk.trace().real();
        if (n > 1 && top > 0.0)
            res.rank_defect = std::max(res.rank_defect, std::max(0.0, e.values[n - 2]) / top);
        dirs[q] = e.vectors.col(n - 1);
        res.lifted[q] = std::move(pk);
    }

    auto beams = restore_power(prob, interf, dirs);
    if (!beams) {
        Rng rng(opts.seed);
        std::vector<HermitianEig> eigs;
        for (const auto &pk : res.lifted)
            eigs.push_back(eig_hermitian(pk));
        double best = kInf;
        for (std::size_t t = 0; t < kRandomizations; ++t) {
            std::vector<cvec> cand(k);
            for (std::size_t q = 0; q < k; ++q) {
                cvec v(n, 0.0);
                for (std::size_t j = 0; j < n; ++j) {
                    const double lj = std::max(0.0, eigs[q].values[j]);
                    v = axpy(std::sqrt(lj) * rng.cnormal(), eigs[q].vectors.col(j), v);
                }
                const double len = norm(v);
                cand[q] = len > 0.0 ? scaled(v, 1.0 / len) : dirs[q];
            }
            auto restored = restore_power(prob, interf, cand);
            if (restored && total_power(*restored) < best) {
                best = total_power(*restored);
                beams = std::move(restored);
            }
        }
        res.randomized = true;
    }
    if (!beams) {
        res.status = SolveStatus::IterationLimit;
        return res;
    }
    res.beams = std::move(*beams);
    res.power = total_power(res.beams);
    const bool tight = res.power <= res.lifted_power * (1.0 + std::max(opts.tol_gap, 1e-6)) + 1e-300;
    res.status = converged && !res.randomized && tight ? SolveStatus::Optimal : SolveStatus::Feasible;
    return res;
}

Solution solve_sdr_beamforming(const ProblemInstance &inst, const rvec &x, const SolverOptions &opts,
                               SdrResult *detail) {
    const auto *d = std::get_if<UavPowerMinData>(&inst.kind);
    if (!d)
        throw std::invalid_argument("solve_sdr_beamforming needs a UavPowerMin instance");
    const std::size_t k = d->users.size(), n = d->nx * d->ny;
    const rvec r0 = inst.layout.get(x, "r0");
    Geometry g;
    g.user_positions = d->users;
    g.uav_position = {r0[0], r0[1], d->altitude};
    SinrPowerProblem prob;
    for (std::size_t u = 0; u < k; ++u)
        prob.h.push_back(uav_user_channel(g, u, d->fc_hz, d->nx, d->ny, d->spacing_m));
    prob.gamma = d->gamma_req;
    prob.sigma2 = d->sigma2;
    prob.order = SicOrder::gating(alpha_of(inst, x));
    prob.antenna_power = d->antenna_power;
    SdrResult r = solve_sdr(prob, opts);

    Solution s;
    s.x = x;
    s.status = r.status;
    s.iterations = r.iterations;
    if (!r.beams.empty()) {
        cvec flat;
        for (const auto &p : r.beams)
            flat.insert(flat.end(), p.begin(), p.end());
        inst.layout.set_complex(s.x, "p", flat);
    } else {
        inst.layout.set_complex(s.x, "p", cvec(k * n, 0.0));
    }
    s.objective = evaluate_objective(inst, s.x);
    s.max_residual = check_feasibility(inst, s.x, opts.tol_feas).max_residual;
    if (detail)
        *detail = std::move(r);
    return s;
}

} // namespace ngma
