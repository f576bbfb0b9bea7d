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

#include "ngma/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace ngma {

namespace {

constexpr double kBinaryTol = 1e-9;

void need(bool ok, const char *what) {
    if (!ok)
        throw std::invalid_argument(std::string("build_problem: ") + what);
}

void push(std::vector<Residual> &out, const char *name, std::size_t index, double value, double limit = -1.0) {
    out.push_back(Residual{name, index, value, limit});
}

void push_binary(std::vector<Residual> &out, const char *name, const rvec &v) {
    for (std::size_t i = 0; i < v.size(); ++i)
        push(out, name, i, std::min(std::abs(v[i]), std::abs(v[i] - 1.0)), kBinaryTol);
}

std::size_t total(const std::vector<std::size_t> &v) { return std::accumulate(v.begin(), v.end(), std::size_t{0}); }

std::vector<cvec> split_vectors(const cvec &flat, std::size_t count, std::size_t len) {
    std::vector<cvec> out(count, cvec(len));
    for (std::size_t k = 0; k < count; ++k)
        for (std::size_t n = 0; n < len; ++n)
            out[k][n] = flat[k * len + n];
    return out;
}

CMatrix as_matrix(const cvec &flat, std::size_t rows, std::size_t cols) { return CMatrix(rows, cols, flat); }

std::vector<std::vector<int>> read_alpha(const rvec &a, std::size_t k) {
    std::vector<std::vector<int>> out(k, std::vector<int>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            out[i][j] = i != j && a[i * k + j] >= 0.5 ? 1 : 0;
    return out;
}

void alpha_residuals(std::vector<Residual> &out, const char *c_bin, const char *c_pair, const rvec &a,
                     std::size_t k) {
    rvec off;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            if (i != j)
                off.push_back(a[i * k + j]);
    push_binary(out, c_bin, off);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            push(out, c_pair, idx++, std::abs(a[i * k + j] + a[j * k + i] - 1.0), 0.0);
}

// SINR constraint Gamma >= req stored as (req (I + s2) - S) / s2 <= 0.
double sinr_residual(double signal, double interference, double sigma2, double req) {
    return (req * (interference + sigma2) - signal) / sigma2;
}

// ---- NomaSumRate ----------------------------------------------------------

void build(const NomaSumRateData &d, ProblemInstance &inst) {
    const std::size_t k = d.h.rows(), m = d.h.cols();
    need(k > 0 && m > 0, "NomaSumRate needs users and subcarriers");
    need(d.sigma2.size() == k && d.r_min.size() == k, "NomaSumRate per-user vectors must have K entries");
    need(d.p_max >= 0.0, "NomaSumRate P_max must be non-negative");
    inst.sense = Sense::Maximize;
    inst.layout.add("p", k, false, false, 0.0, d.p_max);
    inst.layout.add("pi", m * k, false, true, 0.0, 1.0);
    inst.flags.has_binaries = true;
    inst.flags.monotone_in = {"p"};
    inst.constraint_names = {"C1", "C2", "C3", "C4"};
}

double objective(const NomaSumRateData &d, const Layout &l, const rvec &x) {
    const rvec r = noma_user_rates(d, l.get(x, "p"), l.get(x, "pi"));
    return std::accumulate(r.begin(), r.end(), 0.0);
}

void residuals(const NomaSumRateData &d, const Layout &l, const rvec &x, std::vector<Residual> &out) {
    const std::size_t k = d.h.rows(), m = d.h.cols();
    const rvec p = l.get(x, "p"), pi = l.get(x, "pi");
    push(out, "C1", 0, std::accumulate(p.begin(), p.end(), 0.0) - d.p_max);
    for (std::size_t u = 0; u < k; ++u) {
        double s = 0.0;
        for (std::size_t c = 0; c < m; ++c)
            s += pi[c * k + u];
        push(out, "C2", u, std::abs(s - 1.0));
    }
    const rvec r = noma_user_rates(d, p, pi);
    for (std::size_t u = 0; u < k; ++u)
        push(out, "C3", u, d.r_min[u] - r[u]);
    push_binary(out, "C4", pi);
}

// ---- OfdmaPowerMin --------------------------------------------------------

std::vector<std::size_t> ofdma_streams(const OfdmaPowerMinData &d) {
    return d.streams.empty() ? std::vector<std::size_t>(d.h.rows(), 1) : d.streams;
}

void build(const OfdmaPowerMinData &d, ProblemInstance &inst) {
    const std::size_t k = d.h.rows(), m = d.h.cols();
    need(k > 0 && m > 0, "OfdmaPowerMin needs users and subcarriers");
    need(d.p_max.size() == k && d.r_min.size() == k && d.sigma2.size() == k,
         "OfdmaPowerMin per-user vectors must have K entries");
    const auto streams = ofdma_streams(d);
    need(streams.size() == k, "OfdmaPowerMin stream counts must have K entries");
    rvec lo, hi;
    for (std::size_t u = 0; u < k; ++u)
        for (std::size_t s = 0; s < streams[u]; ++s) {
            lo.push_back(0.0);
            hi.push_back(d.p_max[u]);
        }
    inst.sense = Sense::Minimize;
    inst.layout.add("p", lo, hi);
    inst.layout.add("pi", m * total(streams), false, true, 0.0, 1.0);
    inst.flags.has_binaries = true;
    inst.flags.convex_when_fixed = {"p"};
    inst.constraint_names = {"C1", "C2", "C3", "C4", "D"};
}

double objective(const OfdmaPowerMinData &, const Layout &l, const rvec &x) {
    const rvec p = l.get(x, "p");
    return std::accumulate(p.begin(), p.end(), 0.0);
}

void residuals(const OfdmaPowerMinData &d, const Layout &l, const rvec &x, std::vector<Residual> &out) {
    const std::size_t k = d.h.rows(), m = d.h.cols();
    const auto streams = ofdma_streams(d);
    const std::size_t ds = total(streams);
    const rvec p = l.get(x, "p"), pi = l.get(x, "pi");
    std::size_t off = 0;
    for (std::size_t u = 0; u < k; ++u) {
        double s = 0.0;
        for (std::size_t j = 0; j < streams[u]; ++j)
            s += p[off + j];
        push(out, "C1", u, s - d.p_max[u]);
        off += streams[u];
    }
    for (std::size_t c = 0; c < m; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < ds; ++j)
            s += pi[c * ds + j];
        push(out, "C2", c, s - 1.0);
    }
    off = 0;
    for (std::size_t u = 0; u < k; ++u) {
        RMatrix sched(m, streams[u]);
        rvec pu(streams[u]);
        for (std::size_t j = 0; j < streams[u]; ++j) {
            pu[j] = std::max(0.0, p[off + j]);
            for (std::size_t c = 0; c < m; ++c)
                sched(c, j) = pi[c * ds + off + j];
        }
        const double r = ofdma_rate_unchecked(d.h.row(u), sched, pu, d.sigma2[u]);
        push(out, "C3", u, d.r_min[u] - r);
        off += streams[u];
    }
    push_binary(out, "C4", pi);
    // Rate model domain: each stream sits on exactly one subcarrier.
    for (std::size_t j = 0; j < ds; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < m; ++c)
            s += pi[c * ds + j];
        push(out, "D", j, std::abs(s - 1.0));
    }
}

// ---- RsmaRobust -----------------------------------------------------------

void build(const RsmaRobustData &d, ProblemInstance &inst) {
    const std::size_t k = d.h_hat.size();
    need(k > 0, "RsmaRobust needs users");
    const std::size_t n = d.h_hat[0].size();
    for (const auto &h : d.h_hat)
        need(h.size() == n, "RsmaRobust channel lengths differ");
    need(d.delta.size() == k && d.sigma2.size() == k && d.r_min.size() == k,
         "RsmaRobust per-user vectors must have K entries");
    for (double v : d.delta)
        need(v >= 0.0, "RsmaRobust radii must be non-negative");
    inst.sense = Sense::Maximize;
    inst.layout.add("pc", n, true, false, -kInf, kInf);
    inst.layout.add("pp", k * n, true, false, -kInf, kInf);
    inst.layout.add("c", k, false, false, 0.0, kInf);
    inst.flags.convex_when_fixed = {"c"};
    inst.constraint_names = {"C1", "C2", "C3", "C4"};
}

RsmaAlloc rsma_alloc(const RsmaRobustData &d, const Layout &l, const rvec &x) {
    const std::size_t k = d.h_hat.size(), n = d.h_hat[0].size();
    RsmaAlloc a;
    a.p_common = l.get_complex(x, "pc");
    a.p_private = split_vectors(l.get_complex(x, "pp"), k, n);
    a.common_share = l.get(x, "c");
    return a;
}

double objective(const RsmaRobustData &d, const Layout &l, const rvec &x) {
    const RsmaRates r = worst_case_rsma_rates(d.h_hat, d.delta, rsma_alloc(d, l, x), d.sigma2);
    return std::accumulate(r.total.begin(), r.total.end(), 0.0);
}

void residuals(const RsmaRobustData &d, const Layout &l, const rvec &x, std::vector<Residual> &out) {
    const RsmaAlloc a = rsma_alloc(d, l, x);
    const RsmaRates r = worst_case_rsma_rates(d.h_hat, d.delta, a, d.sigma2);
    push(out, "C1", 0, -r.budget_residual);
    double pw = norm2(a.p_common);
    for (const auto &p : a.p_private)
        pw += norm2(p);
    push(out, "C2", 0, pw - d.p_max);
    for (std::size_t u = 0; u < d.h_hat.size(); ++u)
        push(out, "C3", u, d.r_min[u] - (r.private_per_user[u] + r.common_per_user[u]));
    for (std::size_t u = 0; u < d.h_hat.size(); ++u)
        push(out, "C4", u, -a.common_share[u]);
}

// ---- IrsSumRate -----------------------------------------------------------

void build(const IrsSumRateData &d, ProblemInstance &inst) {
    const std::size_t k = d.h_direct.size();
    need(k > 0, "IrsSumRate needs users");
    const std::size_t n = d.h_direct[0].size(), m = d.f.cols();
    need(d.f.rows() == n, "IrsSumRate F must have N rows");
    need(d.h_reflect.size() == k && d.sigma2.size() == k, "IrsSumRate per-user data must have K entries");
    for (std::size_t u = 0; u < k; ++u)
        need(d.h_direct[u].size() == n && d.h_reflect[u].size() == m, "IrsSumRate channel lengths differ");
    need(d.phase_bits >= 0 && d.phase_bits <= 16, "IrsSumRate phase bits out of range");
    inst.sense = Sense::Maximize;
    inst.layout.add("p", k * n, true, false, -kInf, kInf);
    inst.layout.add("psi", m, false, false, 0.0, 1.0);
    inst.layout.add("alpha", k * k, false, true, 0.0, 1.0);
    inst.flags.has_binaries = true;
    inst.constraint_names = {"C1", "C2", "C3", "C4"};
}

double objective(const IrsSumRateData &d, const Layout &l, const rvec &x) {
    const std::size_t k = d.h_direct.size(), n = d.h_direct[0].size();
    const auto p = split_vectors(l.get_complex(x, "p"), k, n);
    const auto order = SicOrder::gating(read_alpha(l.get(x, "alpha"), k));
    return sum_rate(irs_sinr(d.h_direct, d.f, l.get(x, "psi"), d.h_reflect, p, order, d.sigma2));
}

void residuals(const IrsSumRateData &d, const Layout &l, const rvec &x, std::vector<Residual> &out) {
    const std::size_t k = d.h_direct.size();
    const cvec p = l.get_complex(x, "p");
    push(out, "C1", 0, norm2(p) - d.p_max);
    const rvec psi = l.get(x, "psi");
    for (std::size_t i = 0; i < psi.size(); ++i) {
        double r = std::abs(std::abs(std::polar(1.0, 2.0 * std::numbers::pi * psi[i])) - 1.0);
        if (d.phase_bits > 0) {
            const double levels = std::ldexp(1.0, d.phase_bits);
            const double t = psi[i] * levels;
            double dist = std::abs(t - std::round(t)) / levels;
            r += dist;
        }
        push(out, "C2", i, r);
    }
    alpha_residuals(out, "C3", "C4", l.get(x, "alpha"), k);
}

// ---- UavPowerMin ----------------------------------------------------------

void build(const UavPowerMinData &d, ProblemInstance &inst) {
    const std::size_t k = d.users.size(), n = d.nx * d.ny;
    need(k > 0 && n > 0, "UavPowerMin needs users and antennas");
    need(d.altitude > 0.0, "UavPowerMin altitude must be positive");
    for (const auto &u : d.users)
        need(u[2] == 0.0, "UavPowerMin users must be on the ground plane");
    need(d.antenna_power.size() == n, "UavPowerMin needs one power limit per antenna");
    need(d.gamma_req.size() == k && d.sigma2.size() == k, "UavPowerMin per-user vectors must have K entries");
    need(d.slot_s > 0.0 && d.a_max >= 0.0, "UavPowerMin slot length and acceleration must be valid");
    inst.sense = Sense::Minimize;
    inst.layout.add("p", k * n, true, false, -kInf, kInf);
    inst.layout.add("r0", 2, false, false, -kInf, kInf);
    inst.layout.add("v", 2, false, false, -kInf, kInf);
    inst.layout.add("alpha", k * k, false, true, 0.0, 1.0);
    inst.flags.has_binaries = true;
    inst.flags.sinr_constrained = true;
    inst.flags.convex_when_fixed = {"p"};
    inst.constraint_names = {"C1", "C2", "C3", "C4", "C5", "C6"};
}

Geometry uav_geometry(const UavPowerMinData &d, const rvec &r0) {
    Geometry g;
    g.user_positions = d.users;
    g.uav_position = {r0[0], r0[1], d.altitude};
    return g;
}

double objective(const UavPowerMinData &d, const Layout &l, const rvec &x) {
    const rvec v = l.get(x, "v");
    return norm2(l.get_complex(x, "p")) + uav_aero_power(std::hypot(v[0], v[1]), d.aero) +
           d.circuit_count * d.aero.p_circ;
}

void residuals(const UavPowerMinData &d, const Layout &l, const rvec &x, std::vector<Residual> &out) {
    const std::size_t k = d.users.size(), n = d.nx * d.ny;
    const auto p = split_vectors(l.get_complex(x, "p"), k, n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (const auto &pk : p)
            s += std::norm(pk[i]);
        push(out, "C1", i, s - d.antenna_power[i]);
    }
    const rvec r0 = l.get(x, "r0"), v = l.get(x, "v");
    const Geometry g = uav_geometry(d, r0);
    const auto alpha = read_alpha(l.get(x, "alpha"), k);
    for (std::size_t u = 0; u < k; ++u) {
        const cvec h = uav_user_channel(g, u, d.fc_hz, d.nx, d.ny, d.spacing_m);
        double interf = 0.0;
        for (std::size_t r = 0; r < k; ++r)
            if (r != u && alpha[u][r])
                interf += std::norm(dot(h, p[r]));
        push(out, "C2", u, sinr_residual(std::norm(dot(h, p[u])), interf, d.sigma2[u], d.gamma_req[u]));
    }
    push(out, "C3", 0,
         std::hypot(v[0] - d.prev_velocity[0], v[1] - d.prev_velocity[1]) - d.a_max * d.slot_s);
    push(out, "C4", 0,
         std::abs(std::hypot(v[0], v[1]) * d.slot_s -
                  std::hypot(r0[0] - d.prev_position[0], r0[1] - d.prev_position[1])));
    alpha_residuals(out, "C5", "C6", l.get(x, "alpha"), k);
}

// ---- MfaPowerMin ----------------------------------------------------------

std::size_t mfa_rows(const MfaPowerMinData &d) {
    std::size_t s = 0;
    for (const auto &c : d.candidates)
        s += c.positions.size();
    return s;
}

void build(const MfaPowerMinData &d, ProblemInstance &inst) {
    const std::size_t n = d.candidates.size();
    need(n > 0, "MfaPowerMin needs elements");
    const std::size_t k = d.candidates[0].bank.rows();
    need(k > 0, "MfaPowerMin needs users");
    for (const auto &c : d.candidates)
        need(c.bank.rows() == k && c.bank.cols() == c.positions.size() && !c.positions.empty(),
             "MfaPowerMin bank shape does not match positions");
    need(d.gamma_req.size() == k && d.sigma2.size() == k, "MfaPowerMin per-user vectors must have K entries");
    const std::size_t nq = mfa_rows(d);
    inst.sense = Sense::Minimize;
    inst.layout.add("P", n * k, true, false, -kInf, kInf);
    inst.layout.add("T", nq, false, true, 0.0, 1.0);
    inst.layout.add("U", nq * k, true, false, -kInf, kInf);
    inst.flags.has_binaries = true;
    inst.flags.sinr_constrained = true;
    inst.flags.convex_when_fixed = {"P", "U"};
    inst.constraint_names = {"C1", "C2", "C3", "C4"};
}

double objective(const MfaPowerMinData &, const Layout &l, const rvec &x) { return norm2(l.get_complex(x, "P")); }

void residuals(const MfaPowerMinData &d, const Layout &l, const rvec &x, std::vector<Residual> &out) {
    const std::size_t n = d.candidates.size(), k = d.candidates[0].bank.rows(), nq = mfa_rows(d);
    const cvec pf = l.get_complex(x, "P"), uf = l.get_complex(x, "U");
    const rvec t = l.get(x, "T");
    const CMatrix pm = as_matrix(pf, n, k), um = as_matrix(uf, nq, k);
    std::vector<cvec> h_hat(k, cvec(nq)), u(k);
    std::size_t off = 0;
    for (const auto &c : d.candidates) {
        for (std::size_t q = 0; q < c.positions.size(); ++q)
            for (std::size_t a = 0; a < k; ++a)
                h_hat[a][off + q] = std::conj(c.bank(a, q));
        off += c.positions.size();
    }
    for (std::size_t a = 0; a < k; ++a)
        u[a] = um.col(a);
    for (std::size_t a = 0; a < k; ++a) {
        double interf = 0.0;
        for (std::size_t r = 0; r < k; ++r)
            if (r != a)
                interf += std::norm(dot(h_hat[a], u[r]));
        push(out, "C1", a, sinr_residual(std::norm(dot(h_hat[a], u[a])), interf, d.sigma2[a], d.gamma_req[a]));
    }
    push_binary(out, "C2", t);
    off = 0;
    std::vector<std::optional<std::array<double, 2>>> chosen(n);
    for (std::size_t e = 0; e < n; ++e) {
        const auto &c = d.candidates[e];
        double s = 0.0;
        for (std::size_t q = 0; q < c.positions.size(); ++q) {
            s += t[off + q];
            if (t[off + q] >= 0.5)
                chosen[e] = c.positions[q];
        }
        double dup = 0.0;
        for (std::size_t f = 0; f < e && chosen[e]; ++f)
            if (chosen[f] && std::abs((*chosen[f])[0] - (*chosen[e])[0]) <= 1e-12 &&
                std::abs((*chosen[f])[1] - (*chosen[e])[1]) <= 1e-12)
                dup = 1.0;
        push(out, "C3", e, std::abs(s - 1.0) + dup);
        off += c.positions.size();
    }
    // U = T P with T block-diagonal in the one-hot columns t_n.
    off = 0;
    std::size_t idx = 0;
    for (std::size_t e = 0; e < n; ++e) {
        for (std::size_t q = 0; q < d.candidates[e].positions.size(); ++q)
            for (std::size_t a = 0; a < k; ++a)
                push(out, "C4", idx++, std::abs(um(off + q, a) - t[off + q] * pm(e, a)));
        off += d.candidates[e].positions.size();
    }
}

// ---- IsacCommCentric ------------------------------------------------------

void build(const IsacCommCentricData &d, ProblemInstance &inst) {
    const std::size_t k = d.h_c.rows(), n = d.h_c.cols(), l = d.s.cols();
    need(k > 0 && n > 0 && l > 0, "IsacCommCentric needs users, antennas and symbols");
    need(d.s.rows() == k && d.x0.rows() == n && d.x0.cols() == l && d.sigma2.size() == k,
         "IsacCommCentric dimension mismatch");
    need(d.delta >= 0.0, "IsacCommCentric delta must be non-negative");
    inst.sense = Sense::Maximize;
    inst.layout.add("P", n * k, true, false, -kInf, kInf);
    inst.constraint_names = {"C1", "C2"};
}

double objective(const IsacCommCentricData &d, const Layout &l, const rvec &x) {
    const CMatrix p = as_matrix(l.get_complex(x, "P"), d.h_c.cols(), d.h_c.rows());
    const IsacMetrics m = isac_metrics(d.h_c, p, d.s, d.x0, d.sigma2);
    return std::accumulate(m.rate.begin(), m.rate.end(), 0.0);
}

void residuals(const IsacCommCentricData &d, const Layout &l, const rvec &x, std::vector<Residual> &out) {
    const CMatrix p = as_matrix(l.get_complex(x, "P"), d.h_c.cols(), d.h_c.rows());
    const double inv_l = 1.0 / static_cast<double>(d.s.cols());
    push(out, "C1", 0, std::pow((p * d.s).frobenius_norm(), 2) * inv_l - d.p_max);
    const IsacMetrics m = isac_metrics(d.h_c, p, d.s, d.x0, d.sigma2);
    push(out, "C2", 0, m.mse - d.delta);
}

// ---- JcacEnergyMin --------------------------------------------------------

void build(const JcacEnergyMinData &d, ProblemInstance &inst) {
    const std::size_t k = d.h.rows(), m = d.h.cols();
    need(k > 0 && m > 0, "JcacEnergyMin needs users and subcarriers");
    need(d.d_comm.size() == k && d.d_mec.size() == k && d.params.size() == k && d.r_min.size() == k &&
             d.sigma2.size() == k,
         "JcacEnergyMin per-user vectors must have K entries");
    rvec lo(k, 0.0), hi(k);
    for (std::size_t u = 0; u < k; ++u) {
        const auto &q = d.params[u];
        need(q.task_bits >= 0.0 && q.latency > 0.0 && q.symbol_time > 0.0, "JcacEnergyMin parameters invalid");
        hi[u] = q.task_bits;
    }
    const std::size_t ds = total(d.d_comm) + total(d.d_mec);
    inst.sense = Sense::Minimize;
    inst.layout.add("p", ds, false, false, 0.0, kInf);
    inst.layout.add("pi", m * ds, false, true, 0.0, 1.0);
    inst.layout.add("L", lo, hi);
    inst.flags.has_binaries = true;
    inst.flags.convex_when_fixed = {"p", "L"};
    inst.constraint_names = {"C1", "C2", "C3", "C4", "C5", "C6"};
}

std::vector<rvec> jcac_powers(const JcacEnergyMinData &d, const rvec &p) {
    std::vector<rvec> out;
    std::size_t off = 0;
    for (std::size_t u = 0; u < d.h.rows(); ++u) {
        const std::size_t n = d.d_comm[u] + d.d_mec[u];
        out.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(off),
                         p.begin() + static_cast<std::ptrdiff_t>(off + n));
        off += n;
    }
    return out;
}

double objective(const JcacEnergyMinData &d, const Layout &l, const rvec &x) {
    auto params = d.params;
    const rvec bits = l.get(x, "L");
    for (std::size_t u = 0; u < params.size(); ++u)
        params[u].local_bits = bits[u];
    return jcac_energy(params, jcac_powers(d, l.get(x, "p")));
}

void residuals(const JcacEnergyMinData &d, const Layout &l, const rvec &x, std::vector<Residual> &out) {
    const std::size_t k = d.h.rows(), m = d.h.cols();
    const std::size_t ds = total(d.d_comm) + total(d.d_mec);
    const rvec p = l.get(x, "p"), pi = l.get(x, "pi"), bits = l.get(x, "L");
    rvec rc(k), rm(k);
    std::size_t off = 0;
    for (std::size_t u = 0; u < k; ++u) {
        const std::size_t dc = d.d_comm[u], dm = d.d_mec[u];
        RMatrix sc(m, dc), sm(m, dm);
        rvec pc(dc), pm(dm);
        for (std::size_t j = 0; j < dc + dm; ++j) {
            const double pj = std::max(0.0, p[off + j]);
            for (std::size_t c = 0; c < m; ++c)
                (j < dc ? sc(c, j) : sm(c, j - dc)) = pi[c * ds + off + j];
            (j < dc ? pc[j] : pm[j - dc]) = pj;
        }
        const cvec hu = d.h.row(u);
        rc[u] = ofdma_rate_unchecked(hu, sc, pc, d.sigma2[u]);
        rm[u] = ofdma_rate_unchecked(hu, sm, pm, d.sigma2[u]);
        off += dc + dm;
    }
    for (std::size_t u = 0; u < k; ++u)
        push(out, "C1", u, d.r_min[u] - rc[u]);
    for (std::size_t u = 0; u < k; ++u)
        push(out, "C2", u, d.params[u].task_bits - bits[u] - rm[u]);
    for (std::size_t j = 0; j < ds; ++j)
        push(out, "C3", j, -p[j]);
    for (std::size_t u = 0; u < k; ++u)
        push(out, "C4", u, std::max(-bits[u], bits[u] - d.params[u].task_bits));
    push_binary(out, "C5", pi);
    for (std::size_t c = 0; c < m; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < ds; ++j)
            s += pi[c * ds + j];
        push(out, "C6", c, s - 1.0);
    }
}

} // namespace

std::string_view kind_name(const ProblemKind &kind) {
    static constexpr std::string_view names[] = {"NomaSumRate",     "OfdmaPowerMin", "RsmaRobust",
                                                  "IrsSumRate",      "UavPowerMin",   "MfaPowerMin",
                                                  "IsacCommCentric", "JcacEnergyMin"};
    return names[kind.index()];
}

ProblemInstance build_problem(ProblemKind kind) {
    ProblemInstance inst;
    std::visit([&](const auto &d) { build(d, inst); }, kind);
    inst.kind = std::move(kind);
    return inst;
}

double evaluate_objective(const ProblemInstance &inst, const rvec &x) {
    if (x.size() != inst.layout.size())
        throw std::invalid_argument("evaluate_objective: x has " + std::to_string(x.size()) + " entries, layout has " +
                                    std::to_string(inst.layout.size()));
    const double v = std::visit([&](const auto &d) { return objective(d, inst.layout, x); }, inst.kind);
    if (!std::isfinite(v))
        throw std::domain_error("evaluate_objective: non-finite objective");
    return v;
}

Feasibility check_feasibility(const ProblemInstance &inst, const rvec &x, double tol) {
    if (x.size() != inst.layout.size())
        throw std::invalid_argument("check_feasibility: x has " + std::to_string(x.size()) + " entries, layout has " +
                                    std::to_string(inst.layout.size()));
    Feasibility f;
    std::visit([&](const auto &d) { residuals(d, inst.layout, x, f.residuals); }, inst.kind);
    for (const auto &r : f.residuals) {
        const double lim = r.limit < 0.0 ? tol : r.limit;
        if (!(r.value <= lim))
            f.feasible = false;
        f.max_residual = std::max(f.max_residual, r.value);
    }
    return f;
}

rvec noma_user_rates(const NomaSumRateData &d, const rvec &p, const rvec &pi) {
    const std::size_t k = d.h.rows(), m = d.h.cols();
    if (p.size() != k || pi.size() != m * k)
        throw std::invalid_argument("noma_user_rates: dimension mismatch");
    rvec r(k, 0.0);
    for (std::size_t c = 0; c < m; ++c) {
        std::vector<std::size_t> users;
        for (std::size_t u = 0; u < k; ++u)
            if (pi[c * k + u] > 0.0)
                users.push_back(u);
        if (users.empty())
            continue;
        rvec g, pw, s2;
        for (auto u : users) {
            g.push_back(std::norm(d.h(u, c)));
            pw.push_back(std::max(0.0, p[u]));
            s2.push_back(d.sigma2[u]);
        }
        const rvec rc = noma_subcarrier_rates(g, pw, s2, SicOrder::by_gain(g));
        for (std::size_t i = 0; i < users.size(); ++i)
            r[users[i]] += pi[c * k + users[i]] * rc[i];
    }
    return r;
}

rvec ofdma_min_powers(const rvec &gains, double r_min) {
    const std::size_t n = gains.size();
    if (n == 0)
        throw std::invalid_argument("ofdma_min_powers: no subcarriers");
    for (double g : gains)
        if (!(g > 0.0))
            throw std::invalid_argument("ofdma_min_powers: gains must be positive");
    rvec p(n, 0.0);
    if (r_min <= 0.0)
        return p;
    if (n == 1) {
        p[0] = (std::exp2(r_min) - 1.0) / gains[0];
        return p;
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return gains[a] > gains[b]; });
    // Water level nu with sum over active log2(g nu) = r_min.
    for (std::size_t act = n; act >= 1; --act) {
        double log_sum = 0.0;
        for (std::size_t i = 0; i < act; ++i)
            log_sum += std::log2(gains[idx[i]]);
        const double log_nu = (r_min - log_sum) / static_cast<double>(act);
        if (log_nu + std::log2(gains[idx[act - 1]]) >= 0.0) {
            const double nu = std::exp2(log_nu);
            for (std::size_t i = 0; i < act; ++i)
                p[idx[i]] = nu - 1.0 / gains[idx[i]];
            return p;
        }
    }
    return p;
}

std::optional<MonotoneForm> noma_monotone_form(const ProblemInstance &inst) {
    const auto *d = std::get_if<NomaSumRateData>(&inst.kind);
    if (!d || d->h.cols() != 1)
        return std::nullopt;
    const std::size_t k = d->h.rows();
    rvec g(k);
    for (std::size_t u = 0; u < k; ++u)
        g[u] = std::norm(d->h(u, 0));
    for (double v : g)
        if (!(v > 0.0))
            return std::nullopt;
    const auto order = *SicOrder::by_gain(g).permutation();
    MonotoneForm f;
    f.lower.resize(k);
    f.upper.resize(k);
    for (std::size_t u = 0; u < k; ++u) {
        f.lower[u] = std::exp2(std::max(0.0, d->r_min[u]));
        f.upper[u] = 1.0 + g[u] * d->p_max / d->sigma2[u];
    }
    const NomaSumRateData data = *d;
    f.powers = [data, g, order](const rvec &zeta) {
        const std::size_t n = g.size();
        rvec p(n, 0.0);
        double stronger = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            const std::size_t u = order[i];
            p[u] = std::max(0.0, zeta[u] - 1.0) * (g[u] * stronger + data.sigma2[u]) / g[u];
            stronger += p[u];
        }
        return p;
    };
    const Layout layout = inst.layout;
    f.point = [layout](const rvec &p) {
        rvec x = layout.zeros();
        layout.set(x, "p", p);
        layout.set(x, "pi", rvec(p.size(), 1.0));
        return x;
    };
    return f;
}

std::vector<std::vector<int>> alpha_of(const ProblemInstance &inst, const rvec &x) {
    const auto &b = inst.layout.block("alpha");
    const std::size_t k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(b.count))));
    return read_alpha(inst.layout.get(x, "alpha"), k);
}

void set_alpha(const ProblemInstance &inst, rvec &x, const SicOrder &order) {
    const std::size_t k = order.size();
    rvec a(k * k, 0.0);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j)
            a[i * k + j] = order.alpha(i, j);
    inst.layout.set(x, "alpha", a);
}

} // namespace ngma
