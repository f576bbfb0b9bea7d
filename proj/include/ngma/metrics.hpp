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

#include "ngma/channels.hpp"
#include "ngma/numerics.hpp"

#include <optional>
#include <vector>

namespace ngma {

// alpha[k][r] == 1 means user k treats user r as noise.
class SicOrder {
  public:
    SicOrder() = default;

    // decode_order[0] is decoded first (weakest); it sees every later user.
    static SicOrder from_permutation(const std::vector<std::size_t> &decode_order);
    static SicOrder from_pairwise(std::vector<std::vector<int>> alpha);
    // No consistency check; used to evaluate points that may violate it.
    static SicOrder gating(std::vector<std::vector<int>> alpha);
    // Ascending gain; on ties the lower index counts as stronger.
    static SicOrder by_gain(const rvec &gains);

    std::size_t size() const { return alpha_.size(); }
    int alpha(std::size_t k, std::size_t r) const { return alpha_[k][r]; }
    const std::vector<std::vector<int>> &pairwise() const { return alpha_; }
    // Empty when the pairwise relation is not a total order.
    std::optional<std::vector<std::size_t>> permutation() const;

  private:
    std::vector<std::vector<int>> alpha_;
};

// Every permutation of 0..k-1 in lexicographic order.
std::vector<std::vector<std::size_t>> all_permutations(std::size_t k);

// R_k = sum_{d,m} Pi(m,d) log2(1 + |H_mm|^2 p_d / sigma2). Each stream must
// sit on exactly one subcarrier.
double ofdma_rate(const cvec &h_diag, const RMatrix &schedule, const rvec &powers, double sigma2);
// Same sum without the schedule validity check (used by relaxed iterates).
double ofdma_rate_unchecked(const cvec &h_diag, const RMatrix &schedule, const rvec &powers, double sigma2);

rvec noma_subcarrier_rates(const rvec &gains, const rvec &powers, const rvec &sigma2, const SicOrder &order);

// order lists users by received power, descending; user k is interfered by
// everyone after it.
double ddma_rate(const std::vector<CMatrix> &h, const std::vector<CMatrix> &indicators, const rvec &powers,
                 double sigma2, const std::vector<std::size_t> &order, std::size_t user);
double ddma_received_power(const CMatrix &h, const CMatrix &indicator, double power);

struct RsmaAlloc {
    cvec p_common;
    std::vector<cvec> p_private;
    rvec common_share; // C_k
};

struct RsmaRates {
    rvec common_per_user;  // R_c,k
    rvec private_per_user; // R_p,k
    double common = 0.0;   // min_k R_c,k
    rvec total;            // R_p,k + C_k
    double budget_residual = 0.0; // R_c - sum C_k
};

RsmaRates rsma_rates(const std::vector<cvec> &h, const RsmaAlloc &alloc, const rvec &sigma2);

// Norm-bound lower bounds of the RSMA rates over ||dh_k|| <= delta_k.
RsmaRates worst_case_rsma_rates(const std::vector<cvec> &h_hat, const rvec &delta, const RsmaAlloc &alloc,
                                const rvec &sigma2);

// Generic MISO SINR with pairwise SIC gating: |h_k^H p_k|^2 over gated interference.
rvec miso_sinr(const std::vector<cvec> &h, const std::vector<cvec> &p, const SicOrder &order, const rvec &sigma2);
// Norm-bound lower bound of miso_sinr over ||dh_k|| <= delta_k.
rvec worst_case_miso_sinr(const std::vector<cvec> &h_hat, const rvec &delta, const std::vector<cvec> &p,
                          const SicOrder &order, const rvec &sigma2);
double sum_rate(const rvec &sinr);

rvec uav_sinr(const Geometry &geom, const std::vector<cvec> &steering, const std::vector<cvec> &p,
              const SicOrder &order, const rvec &sigma2, double fc_hz);

rvec irs_sinr(const std::vector<cvec> &h_direct, const CMatrix &f, const rvec &psi,
              const std::vector<cvec> &h_reflect, const std::vector<cvec> &p, const SicOrder &order,
              const rvec &sigma2);

rvec mfa_sinr(const std::vector<cvec> &h_hat, const std::vector<cvec> &u, const rvec &sigma2);

struct IsacMetrics {
    rvec sinr;
    rvec rate;
    double mse = 0.0;
};

// H_C is K x N, P is N x K, S is K x L, X0 is N x L.
IsacMetrics isac_metrics(const CMatrix &h_c, const CMatrix &p, const CMatrix &s, const CMatrix &x0,
                         const rvec &sigma2);

struct JcacRates {
    double comm = 0.0; // R_C,k
    double mec = 0.0;  // R_MEC,k
};

// Columns [0, d_comm) carry communication symbols, the rest task symbols.
JcacRates jcac_rates(const cvec &h_diag, const RMatrix &schedule, const rvec &powers, std::size_t d_comm,
                     double sigma2);

struct JcacParams {
    double capacitance = 0.0;    // varsigma_k
    double cycles_per_bit = 0.0; // C_k
    double task_bits = 0.0;      // L~_k
    double local_bits = 0.0;     // L_k
    double latency = 1.0;        // T~
    double symbol_time = 1.0;    // T
};

double jcac_energy(const std::vector<JcacParams> &params, const std::vector<rvec> &powers);

struct UavPowerParams {
    double w_u = 0.0;
    double c1 = 0.0;
    double c2 = 0.0;
    double c3 = 0.0;
    double c4 = 0.0;
    double tip_speed = 1.0; // V_T
    double p_circ = 0.0;
};

double uav_aero_power(const Vec3 &velocity, const UavPowerParams &params);
double uav_aero_power(double speed, const UavPowerParams &params);

} // namespace ngma
