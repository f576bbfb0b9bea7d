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

#pragma once

#include "ngma/numerics.hpp"

#include <array>
#include <optional>
#include <vector>

namespace ngma {

inline constexpr double kSpeedOfLight = 299792458.0;

using Vec3 = std::array<double, 3>;

double distance(const Vec3 &a, const Vec3 &b);

enum class ChannelDomain { Frequency, Spatial, DelayDoppler, Cascaded };

struct Channel {
    CMatrix h;
    ChannelDomain domain = ChannelDomain::Spatial;
};

struct Geometry {
    Vec3 bs_position{0.0, 0.0, 0.0};
    Vec3 irs_position{0.0, 0.0, 0.0};
    std::vector<Vec3> user_positions;
    Vec3 uav_position{0.0, 0.0, 0.0}; // z is the fixed altitude H0
    Vec3 uav_velocity{0.0, 0.0, 0.0};

    // Throws when the UAV altitude is not positive or a user is off the ground plane.
    void validate_uav() const;
};

struct RicianParams {
    double kappa = 1.0;
    double pathloss_exponent = 3.0;
    double reference_gain_db = -30.0;
};

double pathloss(const RicianParams &params, double distance_m);

// entries = sqrt(PL) * (sqrt(k/(1+k)) LoS + sqrt(1/(1+k)) CN(0,1)).
// LoS is the all-ones matrix when no direction is given, otherwise the
// rank-one outer product los_direction * 1^T (one column per transmit antenna
// of the remote end).
CMatrix gen_rician(std::size_t rows, std::size_t cols, const RicianParams &params, double distance_m,
                   const std::optional<cvec> &los_direction, Rng &rng);

// Kronecker product of the x and y phase progressions, x outer.
cvec upa_steering(double theta, double phi, std::size_t nx, std::size_t ny, double spacing_m, double fc_hz);

// theta from horizontal distance over altitude, phi from the horizontal bearing.
struct UavAngles {
    double theta = 0.0;
    double phi = 0.0;
    double distance = 0.0;
};
UavAngles uav_angles(const Geometry &geom, std::size_t user);

cvec uav_user_channel(const Geometry &geom, std::size_t user, double fc_hz, std::size_t nx, std::size_t ny,
                      double spacing_m);

// h = hD + F diag(exp(j 2 pi psi)) hR
cvec irs_effective_channel(const cvec &h_direct, const CMatrix &f, const rvec &psi, const cvec &h_reflect);

struct MfaCandidateSet {
    std::vector<std::array<double, 2>> positions; // Q positions
    CMatrix bank;                                 // K x Q, column q is position q
};

// One candidate set per element; selection[n] is the chosen position index of
// element n (the one-hot column t_n).
CMatrix mfa_channel(const std::vector<MfaCandidateSet> &candidates, const std::vector<std::size_t> &selection);

// Same, from an explicit NQ x N selection matrix of one-hot columns.
CMatrix mfa_channel(const std::vector<MfaCandidateSet> &candidates, const CMatrix &t);

struct DdPath {
    int delay = 0;   // l_i, 0 <= l < M~
    int doppler = 0; // k_i, |k| < N~/2
    cd gain = 1.0;
};

// H = sum_i g_i Delta^{k_i} Pi^{l_i} on the M~N~ grid.
CMatrix dd_channel(const std::vector<DdPath> &paths, std::size_t m_delay, std::size_t n_doppler);

// Doppler-major flattening: grid (delay row k, Doppler bin j) -> j * M~ + k.
CMatrix ddma_indicator(std::size_t user, std::size_t m_delay, std::size_t n_doppler);

struct UncertaintyModel {
    enum class Kind { Bounded, Gaussian };
    Kind kind = Kind::Bounded;
    double delta = 0.0;
    CMatrix covariance;
};

cvec perturb_csi(const cvec &h_hat, const UncertaintyModel &model, Rng &rng);

} // namespace ngma
