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

#include "ngma/problems.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ngma {

struct SolverOptions {
    double tol_gap = 1e-6;  // relative
    double tol_feas = 1e-7; // absolute
    std::size_t max_iter = 200;
    std::size_t max_nodes = 200000;
    std::size_t max_vertices = 200000;
    std::uint64_t seed = 1;
};

// Throws when a tolerance is not positive.
void validate(const SolverOptions &opts);

// ---- convex kernel --------------------------------------------------------

// Value, and optionally gradient and Hessian, of a smooth function. Returns
// +inf (or NaN) outside its domain.
using SmoothFn = std::function<double(const rvec &x, rvec *grad, RMatrix *hess)>;

struct ConvexProblem {
    std::size_t n = 0;
    SmoothFn objective;                 // convex, minimized
    std::vector<SmoothFn> inequalities; // convex, g(x) <= 0
    RMatrix a_eq;                       // rows x n, may be empty
    rvec b_eq;
    rvec lower; // empty, or n entries (may be -inf)
    rvec upper;
};

struct ConvexResult {
    rvec x;
    double objective = 0.0;
    double duality_gap = 0.0; // certified: objective - gap is a lower bound
    double kkt_residual = 0.0;
    rvec multipliers; // one per inequality
    SolveStatus status = SolveStatus::IterationLimit;
    std::size_t iterations = 0; // Newton steps
};

// Log-barrier method with damped Newton centering. Equalities are eliminated
// through a nullspace basis; a phase-I problem finds a strictly feasible start
// when x0 is not one.
ConvexResult solve_convex(const ConvexProblem &prob, const rvec &x0, const SolverOptions &opts);

// Quadratic helper: scale * ||A x - b||^2 + offset.
SmoothFn quadratic_fn(RMatrix a, rvec b, double scale, double offset = 0.0);
SmoothFn linear_fn(rvec c, double offset = 0.0);

// ---- SDR beamforming ------------------------------------------------------

// min sum ||p_k||^2 s.t. SINR_k >= gamma_k under SIC gating and per-antenna
// power limits (empty means none).
struct SinrPowerProblem {
    std::vector<cvec> h; // K channels, length N
    rvec gamma;
    rvec sigma2;
    SicOrder order;
    rvec antenna_power;
};

struct SdrResult {
    std::vector<CMatrix> lifted; // P_k
    std::vector<cvec> beams;     // extracted p_k
    double lifted_power = 0.0;   // sum Tr(P_k)
    double power = 0.0;          // sum ||p_k||^2
    double rank_defect = 0.0;    // max_k lambda_2 / lambda_1
    bool randomized = false;
    SolveStatus status = SolveStatus::IterationLimit;
    std::size_t iterations = 0;
    double primal_residual = 0.0;
};

SdrResult solve_sdr(const SinrPowerProblem &prob, const SolverOptions &opts);

// UavPowerMin beam block with position, velocity and order taken from x.
Solution solve_sdr_beamforming(const ProblemInstance &inst, const rvec &x, const SolverOptions &opts,
                               SdrResult *detail = nullptr);

// ---- branch and bound -----------------------------------------------------

struct BnbRelaxation {
    bool feasible = false;
    double bound = 0.0; // in the instance's sense (lower for min, upper for max)
    rvec binaries;      // relaxed values of every binary
};

struct Relaxer {
    std::size_t n_binary = 0;
    // fixed[i] is -1 (free), 0 or 1.
    std::function<BnbRelaxation(const std::vector<int> &fixed)> relax;
    // Objective and full point of a complete assignment, empty if infeasible.
    std::function<std::optional<std::pair<double, rvec>>(const std::vector<int> &assignment)> complete;
};

struct BnbNodeRecord {
    std::size_t id = 0;
    std::size_t parent = 0;
    std::size_t depth = 0;
    double raw_bound = 0.0; // relaxation value at the node
    double bound = 0.0;     // tightened with the parent's bound
};

struct BnbResult {
    Solution solution;
    double global_bound = 0.0;
    std::size_t nodes = 0;
    std::vector<BnbNodeRecord> log;
};

// Best-bound-first, most-fractional branching.
BnbResult solve_bnb(const ProblemInstance &inst, const Relaxer &relaxer, const SolverOptions &opts);

// Perspective/McCormick relaxation of OfdmaPowerMin.
Relaxer ofdma_relaxer(const ProblemInstance &inst, const SolverOptions &opts);

// ---- polyblock ------------------------------------------------------------

struct PolyblockResult {
    Solution solution;
    std::vector<double> upper_history;
    std::vector<double> lower_history;
    std::size_t peak_vertices = 0;
};

PolyblockResult solve_polyblock(const ProblemInstance &inst, const SolverOptions &opts);

// ---- SCA ------------------------------------------------------------------

struct ScaModel {
    std::size_t n = 0;
    std::function<double(const rvec &)> objective; // maximized
    std::function<rvec(const rvec &)> gradient;
    // Convex minimization whose optimum maximizes the surrogate built at xj.
    std::function<ConvexProblem(const rvec &xj)> surrogate;
    // Constraint values c_i(x) <= 0 and their gradients, for KKT checks.
    std::function<rvec(const rvec &)> constraints;
    std::function<std::vector<rvec>(const rvec &)> constraint_gradients;
};

ScaModel isac_sca_model(const ProblemInstance &inst);

struct ScaResult {
    Solution solution;
    std::vector<double> history; // objective per accepted iterate, starting at x0
    double kkt_residual = 0.0;
};

ScaResult solve_sca(const ScaModel &model, const rvec &x0, const SolverOptions &opts);
ScaResult solve_sca(const ProblemInstance &inst, const rvec &x0, const SolverOptions &opts);

// Relative error between an analytic gradient and central differences.
double gradient_check(const std::function<double(const rvec &)> &f, const std::function<rvec(const rvec &)> &grad,
                      const rvec &x, double step = 1e-6);

// KKT residual of max f s.t. c(x) <= 0: min over lambda >= 0 on the active set
// of ||grad f - sum lambda grad c|| / max(1, ||grad f||).
double kkt_residual(const rvec &grad_f, const rvec &constraint_values, const std::vector<rvec> &constraint_grads,
                    double active_tol);

// ---- BCD ------------------------------------------------------------------

struct BcdBlock {
    std::string name;
    std::function<rvec(const rvec &x)> update;
};

struct BcdUpdate {
    std::size_t cycle = 0;
    std::string block;
    double before = 0.0;
    double after = 0.0;
    bool accepted = false;
};

struct BcdResult {
    Solution solution;
    std::vector<BcdUpdate> history;
    std::size_t cycles = 0;
};

BcdResult solve_bcd(const std::function<double(const rvec &)> &objective, Sense sense, const rvec &x0,
                    const std::vector<BcdBlock> &blocks, const SolverOptions &opts);
// Instance form: objective from evaluate_objective, feasibility checked after
// every accepted update (a violation throws naming the constraint).
BcdResult solve_bcd(const ProblemInstance &inst, const rvec &x0, const std::vector<BcdBlock> &blocks,
                    const SolverOptions &opts);

// ---- exhaustive -----------------------------------------------------------

struct GridSpec {
    std::size_t points_per_dim = 0;
    // Completes the continuous part for fixed binaries; empty if infeasible.
    std::function<std::optional<rvec>(const rvec &x)> inner;
};

inline constexpr std::size_t kMaxExhaustiveBinaries = 20;
inline constexpr std::size_t kMaxExhaustiveGridDims = 3;

// Refuses (throws) when the declared enumeration exceeds the budget.
Solution solve_exhaustive(const ProblemInstance &inst, const GridSpec &grid, const SolverOptions &opts);

// Closed-form power completion for OfdmaPowerMin.
GridSpec ofdma_closed_form(const ProblemInstance &inst);

// Enumeration over an abstract binary vector; payoff is empty when the
// assignment is infeasible. Solution.x holds the best assignment.
Solution solve_exhaustive(std::size_t n_binary,
                          const std::function<std::optional<double>(const std::vector<int> &)> &payoff, Sense sense);

// ---- IRS beam/phase machinery ---------------------------------------------

// Sum capacity of the dual uplink, max_q log2 det(I + sum q_k g_k g_k^H) over
// sum q <= P_max, with g_k = h_k / sigma_k. Solved with solve_convex.
struct MacSolution {
    rvec q;
    double sum_rate = 0.0;
    std::size_t iterations = 0;
};

MacSolution mac_sum_capacity(const std::vector<cvec> &h, const rvec &sigma2, double p_max,
                             const SolverOptions &opts);

// Downlink beams achieving the uplink rates for a SIC decode order.
std::vector<cvec> mac_to_bc_beams(const std::vector<cvec> &h, const rvec &sigma2, const rvec &q,
                                  const std::vector<std::size_t> &decode_order);

// Upper bound on the sum capacity when ||g_k|| <= norm_bound[k]:
// max over the power simplex of sum log2(1 + q_k norm_bound_k^2).
double mac_norm_bound(const rvec &norm_bound, double p_max);

// Effective channels of an IrsSumRate instance at phases psi.
std::vector<cvec> irs_channels(const IrsSumRateData &d, const rvec &psi);

// Codebook phases (psi values) of a discrete IRS; 256 levels when continuous.
rvec irs_phase_levels(int phase_bits);

// Beam and phase blocks for solve_bcd on IrsSumRate.
std::vector<BcdBlock> irs_bcd_blocks(const ProblemInstance &inst, const SolverOptions &opts);

// One-hot phase relaxer for solve_bnb on IrsSumRate at a fixed decode order.
// cache maps a phase configuration to its sum capacity across calls.
struct IrsCapacityCache;
Relaxer irs_phase_relaxer(const ProblemInstance &inst, const std::vector<std::size_t> &decode_order,
                          std::shared_ptr<IrsCapacityCache> cache, const SolverOptions &opts);
std::shared_ptr<IrsCapacityCache> make_irs_cache();

// All pairwise-valid SIC orders of K users.
std::vector<SicOrder> all_sic_orders(std::size_t k);

} // namespace ngma
