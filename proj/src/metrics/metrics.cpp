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

#include "ngma/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace ngma {

SicOrder SicOrder::from_permutation(const std::vector<std::size_t> &decode_order) {
    const std::size_t k = decode_order.size();
    std::vector<int> seen(k, 0);
    for (auto u : decode_order) {
        if (u >= k || seen[u])
            throw std::invalid_argument("SicOrder: not a permutation");
        seen[u] = 1;
    }
    SicOrder o;
    o.alpha_.assign(k, std::vector<int>(k, 0));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            o.alpha_[decode_order[i]][decode_order[j]] = 1;
    return o;
}

SicOrder SicOrder::from_pairwise(std::vector<std::vector<int>> alpha) {
    const std::size_t k = alpha.size();
    for (std::size_t a = 0; a < k; ++a) {
        if (alpha[a].size() != k)
            throw std::invalid_argument("SicOrder: alpha must be square");
        alpha[a][a] = 0;
    }
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b) {
            if (a == b)
                continue;
            if ((alpha[a][b] != 0 && alpha[a][b] != 1) || alpha[a][b] + alpha[b][a] != 1)
                throw std::invalid_argument("SicOrder: alpha(" + std::to_string(a) + "," + std::to_string(b) +
                                            ") violates alpha_kr + alpha_rk = 1");
        }
    SicOrder o;
    o.alpha_ = std::move(alpha);
    return o;
}

SicOrder SicOrder::gating(std::vector<std::vector<int>> alpha) {
    for (std::size_t a = 0; a < alpha.size(); ++a) {
        if (alpha[a].size() != alpha.size())
            throw std::invalid_argument("SicOrder: alpha must be square");
        alpha[a][a] = 0;
    }
    SicOrder o;
    o.alpha_ = std::move(alpha);
    return o;
}

SicOrder SicOrder::by_gain(const rvec &gains) {
    std::vector<std::size_t> idx(gains.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (gains[a] != gains[b])
            return gains[a] < gains[b];
        return a > b;
    });
    return from_permutation(idx);
}

std::optional<std::vector<std::size_t>> SicOrder::permutation() const {
    const std::size_t k = alpha_.size();
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<int> count(k, 0);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = 0; b < k; ++b)
            count[a] += alpha_[a][b];
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return count[a] > count[b]; });
    if (from_permutation(idx).alpha_ != alpha_)
        return std::nullopt;
    return idx;
}

std::vector<std::vector<std::size_t>> all_permutations(std::size_t k) {
    std::vector<std::size_t> p(k);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<std::size_t>> out;
    do {
        out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

double ofdma_rate_unchecked(const cvec &h_diag, const RMatrix &schedule, const rvec &powers, double sigma2) {
    double r = 0.0;
    for (std::size_t d = 0; d < schedule.cols(); ++d)
        for (std::size_t m = 0; m < schedule.rows(); ++m) {
            const double pi = schedule(m, d);
            if (pi == 0.0)
                continue;
            r += pi * std::log2(1.0 + std::norm(h_diag[m]) * powers[d] / sigma2);
        }
    return r;
}

double ofdma_rate(const cvec &h_diag, const RMatrix &schedule, const rvec &powers, double sigma2) {
    if (schedule.rows() != h_diag.size() || schedule.cols() != powers.size())
        throw std::invalid_argument("ofdma_rate: dimension mismatch");
    if (!(sigma2 > 0.0))
        throw std::invalid_argument("ofdma_rate: noise power must be positive");
    for (std::size_t d = 0; d < schedule.cols(); ++d) {
        if (powers[d] < 0.0)
            throw std::invalid_argument("ofdma_rate: negative power on stream " + std::to_string(d));
        double col = 0.0;
        for (std::size_t m = 0; m < schedule.rows(); ++m) {
            const double v = schedule(m, d);
            if (v != 0.0 && v != 1.0)
                throw std::invalid_argument("ofdma_rate: schedule entries must be binary");
            col += v;
        }
        if (col != 1.0)
            throw std::invalid_argument("ofdma_rate: stream " + std::to_string(d) + " is not on exactly one subcarrier");
    }
    return ofdma_rate_unchecked(h_diag, schedule, powers, sigma2);
}

rvec noma_subcarrier_rates(const rvec &gains, const rvec &powers, const rvec &sigma2, const SicOrder &order) {
    const std::size_t k = gains.size();
    if (k == 0)
        throw std::invalid_argument("noma_subcarrier_rates: empty user set");
    if (powers.size() != k || sigma2.size() != k || order.size() != k)
        throw std::invalid_argument("noma_subcarrier_rates: dimension mismatch");
    rvec r(k);
    for (std::size_t u = 0; u < k; ++u) {
        if (powers[u] < 0.0)
            throw std::invalid_argument("noma_subcarrier_rates: negative power");
        double interf = 0.0;
        for (std::size_t v = 0; v < k; ++v)
            if (v != u && order.alpha(u, v))
                interf += gains[u] * powers[v];
        r[u] = std::log2(1.0 + gains[u] * powers[u] / (interf + sigma2[u]));
    }
    return r;
}

double ddma_received_power(const CMatrix &h, const CMatrix &indicator, double power) {
    return power * std::pow((h * indicator).frobenius_norm(), 2);
}

double ddma_rate(const std::vector<CMatrix> &h, const std::vector<CMatrix> &indicators, const rvec &powers,
                 double sigma2, const std::vector<std::size_t> &order, std::size_t user) {
    const std::size_t k = h.size();
    if (indicators.size() != k || powers.size() != k || order.size() != k || user >= k)
        throw std::invalid_argument("ddma_rate: dimension mismatch");
    rvec rx(k);
    for (std::size_t u = 0; u < k; ++u) {
        if (h[u].cols() != indicators[u].rows())
            throw std::invalid_argument("ddma_rate: channel and indicator shapes disagree");
        rx[u] = ddma_received_power(h[u], indicators[u], powers[u]);
    }
    for (std::size_t i = 0; i + 1 < k; ++i)
        if (rx[order[i]] < rx[order[i + 1]] * (1.0 - 1e-12))
            throw std::invalid_argument("ddma_rate: users are not sorted by received power");
    const std::size_t pos = static_cast<std::size_t>(std::find(order.begin(), order.end(), user) - order.begin());
    if (pos == k)
        throw std::invalid_argument("ddma_rate: user missing from order");
    const double n_doppler = static_cast<double>(indicators[user].cols());
    double interf = 0.0;
    for (std::size_t i = pos + 1; i < k; ++i)
        interf += rx[order[i]];
    interf /= n_doppler;
    const CMatrix b = h[user] * indicators[user];
    const CMatrix gram = b.adjoint() * b;
    const HermitianEig e = eig_hermitian(gram);
    const double c = powers[user] / (interf + sigma2);
    double r = 0.0;
    for (double lam : e.values)
        r += std::log2(1.0 + c * std::max(0.0, lam));
    return r;
}

namespace {

void check_rsma(const std::vector<cvec> &h, const RsmaAlloc &alloc, const rvec &sigma2) {
    const std::size_t k = h.size();
    if (alloc.p_private.size() != k || sigma2.size() != k || alloc.common_share.size() != k)
        throw std::invalid_argument("rsma_rates: dimension mismatch");
    for (std::size_t u = 0; u < k; ++u)
        if (h[u].size() != alloc.p_common.size() || alloc.p_private[u].size() != alloc.p_common.size())
            throw std::invalid_argument("rsma_rates: dimension mismatch");
}

// Signal lower bound and interference upper bound over the delta ball.
double signal_low(const cvec &h, double delta, const cvec &p) {
    const double v = std::max(0.0, std::abs(dot(h, p)) - delta * norm(p));
    return v * v;
}

double interference_high(const cvec &h, double delta, const cvec &p) {
    const double v = std::abs(dot(h, p)) + delta * norm(p);
    return v * v;
}

RsmaRates rsma_core(const std::vector<cvec> &h, const rvec &delta, const RsmaAlloc &alloc, const rvec &sigma2) {
    check_rsma(h, alloc, sigma2);
    const std::size_t k = h.size();
    RsmaRates out;
    out.common_per_user.resize(k);
    out.private_per_user.resize(k);
    out.total.resize(k);
    for (std::size_t u = 0; u < k; ++u) {
        if (delta[u] < 0.0)
            throw std::invalid_argument("worst_case_rsma_rates: negative radius");
        rvec interf(k);
        for (std::size_t j = 0; j < k; ++j)
            interf[j] = interference_high(h[u], delta[u], alloc.p_private[j]);
        double all = 0.0, others = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            all += interf[j];
            if (j != u)
                others += interf[j];
        }
        out.common_per_user[u] = std::log2(1.0 + signal_low(h[u], delta[u], alloc.p_common) / (all + sigma2[u]));
        out.private_per_user[u] =
            std::log2(1.0 + signal_low(h[u], delta[u], alloc.p_private[u]) / (others + sigma2[u]));
    }
    out.common = k ? *std::min_element(out.common_per_user.begin(), out.common_per_user.end()) : 0.0;
    double shares = 0.0;
    for (std::size_t u = 0; u < k; ++u) {
        out.total[u] = out.private_per_user[u] + alloc.common_share[u];
        shares += alloc.common_share[u];
    }
    out.budget_residual = out.common - shares;
    return out;
}

} // namespace

RsmaRates rsma_rates(const std::vector<cvec> &h, const RsmaAlloc &alloc, const rvec &sigma2) {
    return rsma_core(h, rvec(h.size(), 0.0), alloc, sigma2);
}

RsmaRates worst_case_rsma_rates(const std::vector<cvec> &h_hat, const rvec &delta, const RsmaAlloc &alloc,
                                const rvec &sigma2) {
    if (delta.size() != h_hat.size())
        throw std::invalid_argument("worst_case_rsma_rates: one radius per user required");
    return rsma_core(h_hat, delta, alloc, sigma2);
}

rvec miso_sinr(const std::vector<cvec> &h, const std::vector<cvec> &p, const SicOrder &order, const rvec &sigma2) {
    return worst_case_miso_sinr(h, rvec(h.size(), 0.0), p, order, sigma2);
}

rvec worst_case_miso_sinr(const std::vector<cvec> &h_hat, const rvec &delta, const std::vector<cvec> &p,
                          const SicOrder &order, const rvec &sigma2) {
    const std::size_t k = h_hat.size();
    if (p.size() != k || sigma2.size() != k || order.size() != k || delta.size() != k)
        throw std::invalid_argument("miso_sinr: dimension mismatch");
    rvec g(k);
    for (std::size_t u = 0; u < k; ++u) {
        if (delta[u] < 0.0)
            throw std::invalid_argument("worst_case_miso_sinr: negative radius");
        double interf = 0.0;
        for (std::size_t r = 0; r < k; ++r)
            if (r != u && order.alpha(u, r))
                interf += delta[u] == 0.0 ? std::norm(dot(h_hat[u], p[r])) : interference_high(h_hat[u], delta[u], p[r]);
        const double sig = delta[u] == 0.0 ? std::norm(dot(h_hat[u], p[u])) : signal_low(h_hat[u], delta[u], p[u]);
        g[u] = sig / (interf + sigma2[u]);
    }
    return g;
}

double sum_rate(const rvec &sinr) {
    double s = 0.0;
    for (double g : sinr)
        s += std::log2(1.0 + g);
    return s;
}

rvec uav_sinr(const Geometry &geom, const std::vector<cvec> &steering, const std::vector<cvec> &p,
              const SicOrder &order, const rvec &sigma2, double fc_hz) {
    const std::size_t k = steering.size();
    if (geom.user_positions.size() != k)
        throw std::invalid_argument("uav_sinr: one steering vector per user required");
    const double rho = std::pow(kSpeedOfLight / (4.0 * std::acos(-1.0) * fc_hz), 2.0);
    std::vector<cvec> h(k);
    for (std::size_t u = 0; u < k; ++u) {
        const double d = distance(geom.uav_position, geom.user_positions[u]);
        if (!(d > 0.0))
            throw std::invalid_argument("uav_sinr: UAV and user coincide");
        h[u] = scaled(steering[u], std::sqrt(rho) / d);
    }
    return miso_sinr(h, p, order, sigma2);
}

rvec irs_sinr(const std::vector<cvec> &h_direct, const CMatrix &f, const rvec &psi,
              const std::vector<cvec> &h_reflect, const std::vector<cvec> &p, const SicOrder &order,
              const rvec &sigma2) {
    if (h_reflect.size() != h_direct.size())
        throw std::invalid_argument("irs_sinr: dimension mismatch");
    std::vector<cvec> h(h_direct.size());
    for (std::size_t u = 0; u < h.size(); ++u)
        h[u] = irs_effective_channel(h_direct[u], f, psi, h_reflect[u]);
    return miso_sinr(h, p, order, sigma2);
}

rvec mfa_sinr(const std::vector<cvec> &h_hat, const std::vector<cvec> &u, const rvec &sigma2) {
    const std::size_t k = h_hat.size();
    if (u.size() != k || sigma2.size() != k)
        throw std::invalid_argument("mfa_sinr: dimension mismatch");
    rvec g(k);
    for (std::size_t a = 0; a < k; ++a) {
        if (h_hat[a].size() != u[a].size())
            throw std::invalid_argument("mfa_sinr: dimension mismatch");
        double interf = 0.0;
        for (std::size_t r = 0; r < k; ++r)
            if (r != a)
                interf += std::norm(dot(h_hat[a], u[r]));
        g[a] = std::norm(dot(h_hat[a], u[a])) / (interf + sigma2[a]);
    }
    return g;
}

IsacMetrics isac_metrics(const CMatrix &h_c, const CMatrix &p, const CMatrix &s, const CMatrix &x0,
                         const rvec &sigma2) {
    const std::size_t k = h_c.rows();
    const std::size_t n = h_c.cols();
    const std::size_t l = s.cols();
    if (l == 0 || p.rows() != n || p.cols() != k || s.rows() != k || x0.rows() != n || x0.cols() != l ||
        sigma2.size() != k)
        throw std::invalid_argument("isac_metrics: dimension mismatch");
    const CMatrix ps = p * s;
    const CMatrix y = h_c * ps;
    const double inv_l = 1.0 / static_cast<double>(l);
    IsacMetrics out;
    out.sinr.resize(k);
    out.rate.resize(k);
    for (std::size_t u = 0; u < k; ++u) {
        double sig = 0.0, err = 0.0;
        for (std::size_t t = 0; t < l; ++t) {
            sig += std::norm(s(u, t));
            err += std::norm(y(u, t) - s(u, t));
        }
        out.sinr[u] = (sig * inv_l) / (err * inv_l + sigma2[u]);
        out.rate[u] = std::log2(1.0 + out.sinr[u]);
    }
    out.mse = std::pow((ps - x0).frobenius_norm(), 2) * inv_l;
    return out;
}

JcacRates jcac_rates(const cvec &h_diag, const RMatrix &schedule, const rvec &powers, std::size_t d_comm,
                     double sigma2) {
    if (schedule.rows() != h_diag.size() || schedule.cols() != powers.size() || d_comm > powers.size())
        throw std::invalid_argument("jcac_rates: dimension mismatch");
    for (std::size_t m = 0; m < schedule.rows(); ++m) {
        bool comm = false, task = false;
        for (std::size_t d = 0; d < schedule.cols(); ++d)
            if (schedule(m, d) != 0.0)
                (d < d_comm ? comm : task) = true;
        if (comm && task)
            throw std::invalid_argument("jcac_rates: subcarrier " + std::to_string(m) +
                                        " carries both communication and task symbols");
    }
    JcacRates r;
    for (std::size_t d = 0; d < schedule.cols(); ++d)
        for (std::size_t m = 0; m < schedule.rows(); ++m) {
            const double pi = schedule(m, d);
            if (pi == 0.0)
                continue;
            const double v = pi * std::log2(1.0 + std::norm(h_diag[m]) * powers[d] / sigma2);
            (d < d_comm ? r.comm : r.mec) += v;
        }
    return r;
}

double jcac_energy(const std::vector<JcacParams> &params, const std::vector<rvec> &powers) {
    if (params.size() != powers.size())
        throw std::invalid_argument("jcac_energy: dimension mismatch");
    double e = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        const auto &q = params[k];
        if (q.local_bits < 0.0 || q.local_bits > q.task_bits)
            throw std::invalid_argument("jcac_energy: local bits of user " + std::to_string(k) + " out of range");
        if (!(q.latency > 0.0) || !(q.symbol_time > 0.0))
            throw std::invalid_argument("jcac_energy: latency and symbol time must be positive");
        const double cl = q.cycles_per_bit * q.local_bits;
        e += q.capacitance * cl * cl * cl / (q.latency * q.latency);
        for (double p : powers[k])
            e += p * q.symbol_time;
    }
    return e;
}

double uav_aero_power(double v, const UavPowerParams &q) {
    if (q.w_u < 0.0 || q.c1 < 0.0 || q.c2 < 0.0 || q.c3 < 0.0 || q.c4 < 0.0 || !(q.tip_speed > 0.0) || q.p_circ < 0.0)
        throw std::invalid_argument("uav_aero_power: invalid parameters");
    const double c1sq = q.c1 * q.c1;
    const double v2 = v * v;
    double induced = 0.0;
    if (q.c1 > 0.0)
        induced = std::sqrt(2.0) * q.w_u * c1sq / std::sqrt(v2 + std::sqrt(v2 * v2 + 4.0 * c1sq * c1sq));
    const double ratio = v / q.tip_speed;
    const double profile = q.c2 * std::pow(q.tip_speed, 3) * (1.0 + q.c3 * ratio * ratio);
    return induced + profile + q.c4 * v2 * v;
}

double uav_aero_power(const Vec3 &velocity, const UavPowerParams &params) {
    return uav_aero_power(std::sqrt(velocity[0] * velocity[0] + velocity[1] * velocity[1] + velocity[2] * velocity[2]),
                          params);
}

} // namespace ngma
