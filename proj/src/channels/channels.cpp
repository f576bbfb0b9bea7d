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

#include <cmath>
#include <numbers>
#include <string>

namespace ngma {

namespace {
constexpr double kPi = std::numbers::pi;
}

double distance(const Vec3 &a, const Vec3 &b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    const double dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

void Geometry::validate_uav() const {
    if (!(uav_position[2] > 0.0))
        throw std::invalid_argument("Geometry: UAV altitude must be positive");
    for (std::size_t k = 0; k < user_positions.size(); ++k)
        if (user_positions[k][2] != 0.0)
            throw std::invalid_argument("Geometry: user " + std::to_string(k) + " is not on the ground plane");
}

double pathloss(const RicianParams &params, double distance_m) {
    if (!(distance_m > 0.0))
        throw std::invalid_argument("pathloss: distance must be positive");
    if (!(params.pathloss_exponent > 0.0) || params.kappa < 0.0)
        throw std::invalid_argument("pathloss: invalid Rician parameters");
    return db_to_linear(params.reference_gain_db) * std::pow(distance_m, -params.pathloss_exponent);
}

CMatrix gen_rician(std::size_t rows, std::size_t cols, const RicianParams &params, double distance_m,
                   const std::optional<cvec> &los_direction, Rng &rng) {
    const double pl = pathloss(params, distance_m);
    if (los_direction && los_direction->size() != rows)
        throw std::invalid_argument("gen_rician: LoS direction length must equal rows");
    const double w_los = std::sqrt(params.kappa / (1.0 + params.kappa));
    const double w_nlos = std::sqrt(1.0 / (1.0 + params.kappa));
    const double amp = std::sqrt(pl);
    CMatrix h(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const cd los = los_direction ? (*los_direction)[i] : cd(1.0, 0.0);
            h(i, j) = amp * (w_los * los + w_nlos * rng.cnormal());
        }
    return h;
}

cvec upa_steering(double theta, double phi, std::size_t nx, std::size_t ny, double spacing_m, double fc_hz) {
    if (nx == 0 || ny == 0)
        throw std::invalid_argument("upa_steering: array dimensions must be positive");
    if (!(fc_hz > 0.0) || !(spacing_m >= 0.0))
        throw std::invalid_argument("upa_steering: invalid carrier or spacing");
    const double k0 = 2.0 * kPi * spacing_m * fc_hz / kSpeedOfLight * std::sin(theta);
    cvec ax(nx), ay(ny);
    for (std::size_t n = 0; n < nx; ++n)
        ax[n] = std::polar(1.0, -k0 * static_cast<double>(n) * std::cos(phi));
    for (std::size_t n = 0; n < ny; ++n)
        ay[n] = std::polar(1.0, -k0 * static_cast<double>(n) * std::sin(phi));
    return kron(ax, ay);
}

UavAngles uav_angles(const Geometry &geom, std::size_t user) {
    if (user >= geom.user_positions.size())
        throw std::out_of_range("uav_angles: user index");
    const Vec3 &r0 = geom.uav_position;
    const Vec3 &rk = geom.user_positions[user];
    UavAngles a;
    a.distance = distance(r0, rk);
    if (!(a.distance > 0.0))
        throw std::invalid_argument("uav_angles: UAV and user coincide");
    const double dx = rk[0] - r0[0];
    const double dy = rk[1] - r0[1];
    const double horiz = std::hypot(dx, dy);
    const double height = r0[2] - rk[2];
    a.theta = std::atan2(horiz, height);
    a.phi = std::atan2(dy, dx);
    return a;
}

cvec uav_user_channel(const Geometry &geom, std::size_t user, double fc_hz, std::size_t nx, std::size_t ny,
                      double spacing_m) {
    const UavAngles a = uav_angles(geom, user);
    const double rho = std::pow(kSpeedOfLight / (4.0 * kPi * fc_hz), 2.0);
    return scaled(upa_steering(a.theta, a.phi, nx, ny, spacing_m, fc_hz), std::sqrt(rho) / a.distance);
}

cvec irs_effective_channel(const cvec &h_direct, const CMatrix &f, const rvec &psi, const cvec &h_reflect) {
    if (f.rows() != h_direct.size() || f.cols() != psi.size() || psi.size() != h_reflect.size())
        throw std::invalid_argument("irs_effective_channel: dimension mismatch");
    cvec out(h_direct);
    for (std::size_t m = 0; m < psi.size(); ++m) {
        const cd w = std::polar(1.0, 2.0 * kPi * psi[m]) * h_reflect[m];
        if (w == cd(0.0, 0.0))
            continue;
        for (std::size_t n = 0; n < out.size(); ++n)
            out[n] += f(n, m) * w;
    }
    return out;
}

CMatrix mfa_channel(const std::vector<MfaCandidateSet> &candidates, const std::vector<std::size_t> &selection) {
    if (candidates.size() != selection.size())
        throw std::invalid_argument("mfa_channel: one selection per element required");
    if (candidates.empty())
        return CMatrix();
    const std::size_t k_users = candidates[0].bank.rows();
    CMatrix h(k_users, candidates.size());
    for (std::size_t n = 0; n < candidates.size(); ++n) {
        const auto &set = candidates[n];
        if (set.bank.rows() != k_users || set.bank.cols() != set.positions.size())
            throw std::invalid_argument("mfa_channel: bank shape does not match positions");
        if (selection[n] >= set.positions.size())
            throw std::invalid_argument("mfa_channel: selection out of range for element " + std::to_string(n));
        for (std::size_t k = 0; k < k_users; ++k)
            h(k, n) = set.bank(k, selection[n]);
    }
    for (std::size_t a = 0; a < candidates.size(); ++a)
        for (std::size_t b = a + 1; b < candidates.size(); ++b) {
            const auto &pa = candidates[a].positions[selection[a]];
            const auto &pb = candidates[b].positions[selection[b]];
            if (std::abs(pa[0] - pb[0]) <= 1e-12 && std::abs(pa[1] - pb[1]) <= 1e-12)
                throw std::invalid_argument("mfa_channel: elements " + std::to_string(a) + " and " +
                                            std::to_string(b) + " share a position");
        }
    return h;
}

CMatrix mfa_channel(const std::vector<MfaCandidateSet> &candidates, const CMatrix &t) {
    const std::size_t n_el = candidates.size();
    if (t.cols() != n_el)
        throw std::invalid_argument("mfa_channel: T must have one column per element");
    std::size_t total = 0;
    for (const auto &c : candidates)
        total += c.positions.size();
    if (t.rows() != total)
        throw std::invalid_argument("mfa_channel: T row count must equal the number of candidates");
    std::vector<std::size_t> selection(n_el);
    std::size_t offset = 0;
    for (std::size_t n = 0; n < n_el; ++n) {
        const std::size_t q_count = candidates[n].positions.size();
        int ones = 0;
        for (std::size_t r = 0; r < total; ++r) {
            const cd v = t(r, n);
            const bool in_block = r >= offset && r < offset + q_count;
            if (v == cd(1.0, 0.0) && in_block) {
                ++ones;
                selection[n] = r - offset;
            } else if (v != cd(0.0, 0.0)) {
                throw std::invalid_argument("mfa_channel: column " + std::to_string(n) + " is not one-hot");
            }
        }
        if (ones != 1)
            throw std::invalid_argument("mfa_channel: column " + std::to_string(n) + " is not one-hot");
        offset += q_count;
    }
    return mfa_channel(candidates, selection);
}

CMatrix dd_channel(const std::vector<DdPath> &paths, std::size_t m_delay, std::size_t n_doppler) {
    const std::size_t mn = m_delay * n_doppler;
    if (mn == 0)
        throw std::invalid_argument("dd_channel: empty grid");
    CMatrix h(mn, mn);
    for (const auto &p : paths) {
        if (p.delay < 0 || static_cast<std::size_t>(p.delay) >= m_delay)
            throw std::invalid_argument("dd_channel: delay index out of range");
        if (2 * static_cast<std::size_t>(std::abs(p.doppler)) >= n_doppler && p.doppler != 0)
            throw std::invalid_argument("dd_channel: Doppler index out of range");
        // (Delta^k Pi^l)(i, j) = exp(j 2 pi k i / MN) when i = (j + l) mod MN.
        for (std::size_t j = 0; j < mn; ++j) {
            const std::size_t i = (j + static_cast<std::size_t>(p.delay)) % mn;
            const double ang = 2.0 * kPi * p.doppler * static_cast<double>(i) / static_cast<double>(mn);
            h(i, j) += p.gain * std::polar(1.0, ang);
        }
    }
    return h;
}

CMatrix ddma_indicator(std::size_t user, std::size_t m_delay, std::size_t n_doppler) {
    if (user >= m_delay)
        throw std::invalid_argument("ddma_indicator: user index must be below the delay dimension");
    CMatrix pi(m_delay * n_doppler, n_doppler);
    for (std::size_t j = 0; j < n_doppler; ++j)
        pi(j * m_delay + user, j) = 1.0;
    return pi;
}

cvec perturb_csi(const cvec &h_hat, const UncertaintyModel &model, Rng &rng) {
    const std::size_t n = h_hat.size();
    if (model.kind == UncertaintyModel::Kind::Bounded) {
        if (model.delta < 0.0)
            throw std::invalid_argument("perturb_csi: negative radius");
        if (model.delta == 0.0 || n == 0)
            return h_hat;
        cvec dir(n);
        for (auto &z : dir)
            z = rng.cnormal();
        const double nd = norm(dir);
        // Uniform in the ball of R^{2n}: radius ~ delta * U^{1/(2n)}.
        const double r = model.delta * std::pow(rng.uniform(), 1.0 / (2.0 * static_cast<double>(n)));
        cvec out(h_hat);
        for (std::size_t i = 0; i < n; ++i)
            out[i] += dir[i] * (r / nd);
        return out;
    }
    if (model.covariance.rows() != n || model.covariance.cols() != n)
        throw std::invalid_argument("perturb_csi: covariance shape mismatch");
    const HermitianEig e = eig_hermitian(model.covariance);
    const double scale = std::max(1e-300, std::abs(e.values.back()));
    if (e.values.front() < -1e-10 * scale)
        throw std::invalid_argument("perturb_csi: covariance is not PSD");
    cvec z(n);
    for (auto &v : z)
        v = rng.cnormal();
    cvec out(h_hat);
    for (std::size_t k = 0; k < n; ++k) {
        const double lam = std::max(0.0, e.values[k]);
        if (lam == 0.0)
            continue;
        const cd c = std::sqrt(lam) * z[k];
        for (std::size_t i = 0; i < n; ++i)
            out[i] += e.vectors(i, k) * c;
    }
    return out;
}

} // namespace ngma
