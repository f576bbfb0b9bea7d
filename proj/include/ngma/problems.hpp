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
#include "ngma/metrics.hpp"
#include "ngma/numerics.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ngma {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Downlink NOMA over M subcarriers; users sharing a subcarrier decode by gain.
struct NomaSumRateData {
    CMatrix h;     // K x M, {H_k}_mm
    rvec sigma2;   // K
    double p_max = 1.0;
    rvec r_min;    // K
};

// Uplink OFDMA. Stream d of user k is global stream offset(k) + d.
struct OfdmaPowerMinData {
    CMatrix h;                        // K x M
    std::vector<std::size_t> streams; // D_k, empty means one stream per user
    rvec p_max;                       // K
    rvec r_min;                       // K
    rvec sigma2;                      // K
};

struct RsmaRobustData {
    std::vector<cvec> h_hat; // K vectors of length N
    rvec delta;              // K
    rvec sigma2;             // K
    double p_max = 1.0;
    rvec r_min;              // K
};

struct IrsSumRateData {
    std::vector<cvec> h_direct;  // K x N
    CMatrix f;                   // N x M_ps
    std::vector<cvec> h_reflect; // K x M_ps
    rvec sigma2;                 // K
    double p_max = 1.0;
    int phase_bits = 0;          // 0 means continuous phases
};

// Single slot; the previous slot's position and velocity are data.
struct UavPowerMinData {
    std::vector<Vec3> users;
    double altitude = 100.0;
    std::array<double, 2> prev_position{0.0, 0.0};
    std::array<double, 2> prev_velocity{0.0, 0.0};
    double slot_s = 1.0;   // delta_T
    double a_max = 1.0;
    double fc_hz = 2e9;
    std::size_t nx = 1;
    std::size_t ny = 1;
    double spacing_m = 0.075;
    rvec antenna_power;    // P_i, length nx * ny
    rvec gamma_req;        // K
    rvec sigma2;           // K
    UavPowerParams aero;
    double circuit_count = 1.0; // M in M * P_circ
};

struct MfaPowerMinData {
    std::vector<MfaCandidateSet> candidates; // one per element, bank K x Q_n
    rvec gamma_req;                          // K
    rvec sigma2;                             // K
};

struct IsacCommCentricData {
    CMatrix h_c; // K x N
    CMatrix s;   // K x L
    CMatrix x0;  // N x L
    rvec sigma2; // K
    double p_max = 1.0;
    double delta = kInf;
};

struct JcacEnergyMinData {
    CMatrix h;                       // K x M
    std::vector<std::size_t> d_comm; // D_C,k
    std::vector<std::size_t> d_mec;  // D_MEC,k
    std::vector<JcacParams> params;  // local_bits is ignored (it is a variable)
    rvec r_min;                      // K
    rvec sigma2;                     // K
};

using ProblemKind = std::variant<NomaSumRateData, OfdmaPowerMinData, RsmaRobustData, IrsSumRateData, UavPowerMinData,
                                 MfaPowerMinData, IsacCommCentricData, JcacEnergyMinData>;

std::string_view kind_name(const ProblemKind &kind);

enum class Sense { Minimize, Maximize };

// Complex entries occupy (re, im) pairs in x.
struct VarBlock {
    std::string name;
    std::size_t offset = 0;
    std::size_t count = 0;
    bool is_complex = false;
    bool binary = false;
    rvec lower; // per stored real, may be -inf
    rvec upper;

    std::size_t width() const { return is_complex ? 2 * count : count; }
};

class Layout {
  public:
    void add(std::string name, std::size_t count, bool is_complex, bool binary, double lo, double hi);
    void add(std::string name, rvec lower, rvec upper); // real block with per-entry bounds

    std::size_t size() const { return size_; }
    const std::vector<VarBlock> &blocks() const { return blocks_; }
    bool has(std::string_view name) const;
    const VarBlock &block(std::string_view name) const;

    rvec get(const rvec &x, std::string_view name) const;
    cvec get_complex(const rvec &x, std::string_view name) const;
    void set(rvec &x, std::string_view name, const rvec &v) const;
    void set_complex(rvec &x, std::string_view name, const cvec &v) const;

    rvec zeros() const { return rvec(size_, 0.0); }

  private:
    std::vector<VarBlock> blocks_;
    std::size_t size_ = 0;
};

struct StructureFlags {
    bool has_binaries = false;
    std::vector<std::string> monotone_in;
    std::vector<std::string> convex_when_fixed;
    bool sinr_constrained = false;
};

// Signed residual; feasible when value <= limit (limit < 0 means "use tol").
struct Residual {
    std::string constraint;
    std::size_t index = 0;
    double value = 0.0;
    double limit = -1.0;
};

struct Feasibility {
    bool feasible = true;
    double max_residual = -kInf;
    std::vector<Residual> residuals;
};

struct ProblemInstance {
    ProblemKind kind;
    Sense sense = Sense::Maximize;
    Layout layout;
    StructureFlags flags;
    std::vector<std::string> constraint_names; // declaration order
};

enum class SolveStatus { Optimal, Feasible, Infeasible, IterationLimit };

std::string_view status_name(SolveStatus s);

struct Solution {
    rvec x;
    double objective = 0.0;
    double max_residual = 0.0;
    SolveStatus status = SolveStatus::Feasible;
    std::optional<double> gap; // relative; empty when not certified
    std::size_t iterations = 0;
    double runtime_ms = 0.0;
};

ProblemInstance build_problem(ProblemKind kind);

double evaluate_objective(const ProblemInstance &inst, const rvec &x);

Feasibility check_feasibility(const ProblemInstance &inst, const rvec &x, double tol);

// Per-user rates R_k of a NomaSumRate point.
rvec noma_user_rates(const NomaSumRateData &d, const rvec &p, const rvec &pi);

// Min total power of one user's streams on fixed subcarriers reaching r_min.
// gains are |H_mm|^2 / sigma2 of the chosen subcarriers. Water-filling.
rvec ofdma_min_powers(const rvec &gains, double r_min);

// Monotone reformulation of a single-subcarrier NomaSumRate instance:
// maximize sum log2(zeta) over the zeta reachable within the power budget.
struct MonotoneForm {
    rvec lower; // 2^{R_min,k}
    rvec upper; // 1 + |h_k|^2 P_max / sigma_k^2
    // Least-power allocation reaching zeta (triangular SINR inversion).
    std::function<rvec(const rvec &zeta)> powers;
    // Full variable vector for a power allocation.
    std::function<rvec(const rvec &p)> point;
};

std::optional<MonotoneForm> noma_monotone_form(const ProblemInstance &inst);

// Pairwise SIC indicators of an IrsSumRate / UavPowerMin point (rounded).
std::vector<std::vector<int>> alpha_of(const ProblemInstance &inst, const rvec &x);
void set_alpha(const ProblemInstance &inst, rvec &x, const SicOrder &order);

} // namespace ngma
