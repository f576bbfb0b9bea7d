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

#include "ngma/bench.hpp"

#include "ngma/channels.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <stdexcept>

namespace ngma {

namespace {

constexpr std::uint64_t kChannelStream = 0x6368616e;
constexpr std::uint64_t kErrorStream = 0x65727221;
constexpr std::uint64_t kSchemeStream = 0x73636865;

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t stream, std::size_t trial) {
    return hash_combine(hash_combine(seed, stream), trial);
}

double dbm_to_watt(double dbm) { return db_to_linear(dbm - 30.0); }

cvec column(const CMatrix &m) { return m.col(0); }

double spectral_norm(const CMatrix &f) {
    if (f.cols() == 0)
        return 0.0;
    return std::sqrt(std::max(0.0, dominant_eigvec(f * f.adjoint()).value));
}

} // namespace

std::string_view scheme_name(Scheme s) {
    switch (s) {
    case Scheme::Optimal:
        return "optimal";
    case Scheme::Suboptimal:
        return "suboptimal";
    case Scheme::Baseline1:
        return "baseline1";
    case Scheme::Baseline2:
        return "baseline2";
    case Scheme::Baseline3:
        return "baseline3";
    }
    return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
    for (Scheme s : all_schemes())
        if (scheme_name(s) == name)
            return s;
    return std::nullopt;
}

std::vector<Scheme> all_schemes() {
    return {Scheme::Optimal, Scheme::Suboptimal, Scheme::Baseline1, Scheme::Baseline2, Scheme::Baseline3};
}

void validate(const ScenarioConfig &cfg) {
    auto need = [](bool ok, const char *field, const char *what) {
        if (!ok)
            throw std::invalid_argument(std::string(field) + ": " + what);
    };
    need(cfg.n_antennas >= 1, "n_antennas", "must be at least 1");
    need(cfg.k_users >= 1 && cfg.k_users <= 6, "k_users", "must be in [1, 6]");
    need(cfg.m_irs >= 1, "m_irs", "must be at least 1");
    need(cfg.cell_radius_m > kInnerRadiusM, "cell_radius_m", "must exceed the 5 m inner radius");
    need(cfg.bs_irs_dist_m > 0.0, "bs_irs_dist_m", "must be positive");
    need(cfg.phase_bits >= 1 && cfg.phase_bits <= 8, "phase_bits", "must be in [1, 8]");
    need(cfg.pathloss_exp > 0.0, "pathloss_exp", "must be positive");
    need(cfg.rician_k >= 0.0, "rician_k", "must be non-negative");
    need(std::isfinite(cfg.noise_dbm), "noise_dbm", "must be finite");
    need(!cfg.p_max_dbm_list.empty(), "p_max_dbm_list", "must not be empty");
    for (double p : cfg.p_max_dbm_list)
        need(std::isfinite(p), "p_max_dbm_list", "entries must be finite");
    need(cfg.trials >= 1, "trials", "must be at least 1");
    need(cfg.uncertainty_pct >= 0.0 && cfg.uncertainty_pct < 100.0, "uncertainty_pct", "must be in [0, 100)");
    need(!cfg.schemes.empty(), "schemes", "must not be empty");
    need(cfg.carrier_hz > 0.0, "carrier_hz", "must be positive");
    need(std::isfinite(cfg.ref_gain_db), "ref_gain_db", "must be finite");
    if (std::find(cfg.schemes.begin(), cfg.schemes.end(), Scheme::Optimal) != cfg.schemes.end()) {
        const double configs = std::pow(2.0, static_cast<double>(cfg.phase_bits * cfg.m_irs));
        need(configs <= static_cast<double>(kMaxOptimalConfigs), "schemes",
             "optimal needs (2^phase_bits)^m_irs <= 65536 phase configurations");
    }
}

std::vector<std::string> preset_names() { return {"fig10-full", "fig10-desk", "robust-desk"}; }

std::optional<ScenarioConfig> preset(std::string_view name) {
    ScenarioConfig c;
    if (name == "fig10-full") {
        c.schemes = {Scheme::Suboptimal, Scheme::Baseline1, Scheme::Baseline2, Scheme::Baseline3};
        return c;
    }
    c.k_users = 3;
    c.m_irs = 6;
    if (name == "fig10-desk")
        return c;
    if (name == "robust-desk") {
        c.uncertainty_pct = 10.0;
        return c;
    }
    return std::nullopt;
}

ChannelDraw draw_channels(const ScenarioConfig &cfg, std::size_t trial) {
    validate(cfg);
    Rng rng(trial_seed(cfg.seed, kChannelStream, trial));
    const RicianParams rp{cfg.rician_k, cfg.pathloss_exp, cfg.ref_gain_db};
    const Vec3 bs{0.0, 0.0, 0.0}, irs{cfg.bs_irs_dist_m, 0.0, 0.0};
    const std::size_t k = cfg.k_users, n = cfg.n_antennas, m = cfg.m_irs;

    ChannelDraw out;
    IrsSumRateData &d = out.truth;
    d.f = gen_rician(n, m, rp, cfg.bs_irs_dist_m, std::nullopt, rng);
    for (std::size_t u = 0; u < k; ++u) {
        // Uniform over the sector annulus: sqrt-uniform radius.
        const double r2 = rng.uniform(kInnerRadiusM * kInnerRadiusM, cfg.cell_radius_m * cfg.cell_radius_m);
        const double ang = rng.uniform(-0.5 * kSectorWidthRad, 0.5 * kSectorWidthRad);
        const Vec3 pos{std::sqrt(r2) * std::cos(ang), std::sqrt(r2) * std::sin(ang), 0.0};
        d.h_direct.push_back(column(gen_rician(n, 1, rp, distance(bs, pos), std::nullopt, rng)));
        // Users can stand next to the IRS; the far-field model is held at 1 m.
        const double d_irs = std::max(1.0, distance(irs, pos));
        d.h_reflect.push_back(column(gen_rician(m, 1, rp, d_irs, std::nullopt, rng)));
    }
    d.sigma2.assign(k, dbm_to_watt(cfg.noise_dbm));
    d.phase_bits = cfg.phase_bits;
    const rvec levels = irs_phase_levels(cfg.phase_bits);
    for (std::size_t e = 0; e < m; ++e)
        out.random_psi.push_back(levels[rng.uniform_index(levels.size())]);

    out.estimate = d;
    out.delta.assign(k, 0.0);
    out.delta_direct.assign(k, 0.0);
    if (cfg.uncertainty_pct > 0.0) {
        // The estimate sits within v ||h|| / (1 + v) of the truth, so the
        // truth lies inside the v ||h_hat|| ball the design assumes.
        Rng err(trial_seed(cfg.seed, kErrorStream, trial));
        const double v = std::sqrt(cfg.uncertainty_pct / 100.0), rho = v / (1.0 + v);
        const double f_norm = spectral_norm(d.f);
        for (std::size_t u = 0; u < k; ++u) {
            UncertaintyModel md{UncertaintyModel::Kind::Bounded, rho * norm(d.h_direct[u]), {}};
            UncertaintyModel mr{UncertaintyModel::Kind::Bounded, rho * norm(d.h_reflect[u]), {}};
            out.estimate.h_direct[u] = perturb_csi(d.h_direct[u], md, err);
            out.estimate.h_reflect[u] = perturb_csi(d.h_reflect[u], mr, err);
            out.delta_direct[u] = v * norm(out.estimate.h_direct[u]);
            out.delta[u] = out.delta_direct[u] + f_norm * v * norm(out.estimate.h_reflect[u]);
        }
    }
    return out;
}

namespace {

struct Design {
    double value = 0.0; // objective on the design channel
    rvec psi;
    std::vector<std::size_t> order;
    bool use_irs = true;
    SolveStatus status = SolveStatus::Feasible;
    std::size_t iterations = 0;
    std::optional<double> gap;
};

std::vector<std::size_t> identity_order(std::size_t k) {
    std::vector<std::size_t> o(k);
    for (std::size_t i = 0; i < k; ++i)
        o[i] = i;
    return o;
}

std::vector<cvec> design_channels(const IrsSumRateData &d, const Design &ds) {
    return ds.use_irs ? irs_channels(d, ds.psi) : d.h_direct;
}

SolverOptions inner_options() {
    SolverOptions o;
    o.tol_gap = 1e-9;
    return o;
}

Design design_optimal(const IrsSumRateData &d) {
    const SolverOptions o = inner_options();
    const ProblemInstance inst = build_problem(d);
    auto cache = make_irs_cache();
    Design best;
    best.value = -kInf;
    double bound = -kInf;
    bool all_optimal = true;
    for (const auto &order : all_sic_orders(d.h_direct.size())) {
        const auto perm = *order.permutation();
        const BnbResult r = solve_bnb(inst, irs_phase_relaxer(inst, perm, cache, o), o);
        best.iterations += r.nodes;
        bound = std::max(bound, r.global_bound);
        all_optimal = all_optimal && r.solution.status == SolveStatus::Optimal;
        if (r.solution.objective > best.value) {
            best.value = r.solution.objective;
            best.psi = inst.layout.get(r.solution.x, "psi");
            best.order = perm;
        }
    }
    best.gap = std::max(0.0, bound - best.value) / std::max(std::abs(best.value), 1e-12);
    best.status = all_optimal && *best.gap <= o.tol_gap ? SolveStatus::Optimal : SolveStatus::Feasible;
    return best;
}

Design design_bcd(const IrsSumRateData &d, const rvec &psi0, const std::vector<std::size_t> &order) {
    const SolverOptions o = inner_options();
    const ProblemInstance inst = build_problem(d);
    rvec x0 = inst.layout.zeros();
    inst.layout.set(x0, "psi", psi0);
    set_alpha(inst, x0, SicOrder::from_permutation(order));
    const BcdResult r = solve_bcd(inst, x0, irs_bcd_blocks(inst, o), o);
    Design ds;
    ds.value = r.solution.objective;
    ds.psi = inst.layout.get(r.solution.x, "psi");
    ds.order = order;
    ds.iterations = r.cycles;
    ds.status = r.solution.status == SolveStatus::IterationLimit ? SolveStatus::IterationLimit : SolveStatus::Feasible;
    return ds;
}

Design design_suboptimal(const IrsSumRateData &d, const rvec &psi0) {
    Design best;
    best.value = -kInf;
    std::size_t iterations = 0;
    for (const auto &order : all_sic_orders(d.h_direct.size())) {
        Design ds = design_bcd(d, psi0, *order.permutation());
        iterations += ds.iterations;
        if (ds.value > best.value)
            best = std::move(ds);
    }
    best.iterations = iterations;
    return best;
}

Design design_fixed_phases(const IrsSumRateData &d, const rvec &psi, bool use_irs) {
    Design ds;
    ds.psi = psi;
    ds.use_irs = use_irs;
    ds.order = identity_order(d.h_direct.size());
    const MacSolution mac = mac_sum_capacity(design_channels(d, ds), d.sigma2, d.p_max, inner_options());
    ds.value = mac.sum_rate;
    ds.iterations = mac.iterations;
    return ds;
}

Design design(Scheme scheme, const IrsSumRateData &d, const ChannelDraw &draw, Rng &scheme_rng) {
    switch (scheme) {
    case Scheme::Optimal:
        return design_optimal(d);
    case Scheme::Suboptimal:
        return design_suboptimal(d, draw.random_psi);
    case Scheme::Baseline1: {
        const auto orders = all_sic_orders(d.h_direct.size());
        return design_bcd(d, draw.random_psi, *orders[scheme_rng.uniform_index(orders.size())].permutation());
    }
    case Scheme::Baseline2:
        return design_fixed_phases(d, draw.random_psi, true);
    case Scheme::Baseline3:
        return design_fixed_phases(d, rvec(d.f.cols(), 0.0), false);
    }
    throw std::logic_error("unknown scheme");
}

// Picks the decode order and beams with the best worst-case sum rate for the
// designed phases; reports that bound and the rate realized on the truth.
void robust_evaluate(const ChannelDraw &draw, const Design &ds, bool order_fixed, SchemeOutcome &out) {
    const IrsSumRateData &est = draw.estimate;
    const std::vector<cvec> h_hat = design_channels(est, ds), h_true = design_channels(draw.truth, ds);
    const rvec &delta = ds.use_irs ? draw.delta : draw.delta_direct;
    const std::size_t k = h_hat.size();
    std::vector<std::vector<std::size_t>> orders;
    if (order_fixed)
        orders.push_back(ds.order);
    else
        for (const auto &o : all_sic_orders(k))
            orders.push_back(*o.permutation());
    const SolverOptions o = inner_options();
    std::vector<rvec> noise_sets{est.sigma2, est.sigma2};
    for (std::size_t u = 0; u < k; ++u)
        noise_sets[1][u] += delta[u] * delta[u] * est.p_max;
    double best = -kInf;
    for (const auto &noise : noise_sets) {
        const MacSolution mac = mac_sum_capacity(h_hat, noise, est.p_max, o);
        for (const auto &perm : orders) {
            const auto beams = mac_to_bc_beams(h_hat, noise, mac.q, perm);
            const SicOrder order = SicOrder::from_permutation(perm);
            const double bound = sum_rate(worst_case_miso_sinr(h_hat, delta, beams, order, est.sigma2));
            if (bound > best) {
                best = bound;
                out.worst_case_bound = bound;
                out.sum_rate = sum_rate(miso_sinr(h_true, beams, order, draw.truth.sigma2));
                out.decode_order = perm;
            }
        }
    }
}

} // namespace

SchemeOutcome run_scheme(const ScenarioConfig &cfg, Scheme scheme, std::size_t p_index, std::size_t trial,
                         const ChannelDraw &draw) {
    if (p_index >= cfg.p_max_dbm_list.size())
        throw std::out_of_range("run_scheme: power index out of range");
    ChannelDraw local = draw;
    const double p_max = dbm_to_watt(cfg.p_max_dbm_list[p_index]);
    local.truth.p_max = p_max;
    local.estimate.p_max = p_max;
    Rng scheme_rng(hash_combine(
        hash_combine(trial_seed(cfg.seed, kSchemeStream, trial), static_cast<std::uint64_t>(scheme)), p_index));

    const bool robust = cfg.uncertainty_pct > 0.0;
    const Design ds = design(scheme, robust ? local.estimate : local.truth, local, scheme_rng);
    SchemeOutcome out;
    out.status = ds.status;
    out.iterations = ds.iterations;
    out.gap = ds.gap;
    out.psi = ds.psi;
    out.decode_order = ds.order;
    if (!robust) {
        out.sum_rate = ds.value;
        return out;
    }
    out.gap.reset();
    if (out.status == SolveStatus::Optimal)
        out.status = SolveStatus::Feasible;
    robust_evaluate(local, ds, scheme == Scheme::Baseline1, out);
    return out;
}

SchemeOutcome run_scheme(const ScenarioConfig &cfg, Scheme scheme, std::size_t p_index, std::size_t trial) {
    return run_scheme(cfg, scheme, p_index, trial, draw_channels(cfg, trial));
}

namespace {

struct TrialCell {
    SweepRow row;
    bool failed = false;
};

void run_trial(const ScenarioConfig &cfg, std::size_t trial, bool record_runtime, std::vector<TrialCell> &cells) {
    const std::size_t np = cfg.p_max_dbm_list.size(), nt = cfg.trials;
    std::optional<ChannelDraw> draw;
    std::string draw_error;
    try {
        draw = draw_channels(cfg, trial);
    } catch (const std::exception &e) {
        draw_error = e.what();
    }
    for (std::size_t s = 0; s < cfg.schemes.size(); ++s)
        for (std::size_t p = 0; p < np; ++p) {
            TrialCell &c = cells[(s * np + p) * nt + trial];
            c.row.scheme = cfg.schemes[s];
            c.row.p_max_dbm = cfg.p_max_dbm_list[p];
            c.row.trial = trial;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                if (!draw)
                    throw std::runtime_error(draw_error);
                const SchemeOutcome o = run_scheme(cfg, cfg.schemes[s], p, trial, *draw);
                c.row.sum_rate = o.sum_rate;
                c.row.status = o.status;
                c.row.iterations = o.iterations;
                c.row.gap = o.gap;
                c.row.worst_case_bound = o.worst_case_bound;
            } catch (const std::exception &) {
                c.failed = true;
                c.row.sum_rate = std::nan("");
                c.row.status = SolveStatus::IterationLimit;
            }
            if (record_runtime)
                c.row.runtime_ms =
                    std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        }
}

} // namespace

SweepReport run_fig10_sweep(const ScenarioConfig &cfg, const SweepOptions &opts) {
    validate(cfg);
    const std::size_t nt = cfg.trials;
    std::vector<TrialCell> cells(cfg.schemes.size() * cfg.p_max_dbm_list.size() * nt);
    if (opts.jobs == 1) {
        for (std::size_t t = 0; t < nt; ++t)
            run_trial(cfg, t, opts.record_runtime, cells);
    } else {
        const int threads = opts.jobs == 0 ? omp_get_max_threads() : static_cast<int>(opts.jobs);
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(nt); ++t)
            run_trial(cfg, static_cast<std::size_t>(t), opts.record_runtime, cells);
    }
    SweepReport rep;
    rep.rows.reserve(cells.size());
    for (auto &c : cells) {
        rep.partial = rep.partial || c.failed;
        rep.rows.push_back(std::move(c.row));
    }
    return rep;
}

SweepReport run_robust_variant(const ScenarioConfig &cfg, const SweepOptions &opts) {
    if (!(cfg.uncertainty_pct >= 0.0 && cfg.uncertainty_pct < 100.0))
        throw std::invalid_argument("uncertainty_pct: the robust variant needs a value in [0, 100)");
    return run_fig10_sweep(cfg, opts);
}

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

} // namespace

std::string to_csv(const SweepReport &report) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto &r : report.rows) {
        out += scheme_name(r.scheme);
        out += ',' + fmt(r.p_max_dbm) + ',' + std::to_string(r.trial) + ',' + fmt(r.sum_rate) + ',';
        out += status_name(r.status);
        out += ',' + std::to_string(r.iterations) + ',' + fmt(r.runtime_ms) + ',';
        if (r.gap)
            out += fmt(*r.gap);
        out += '\n';
    }
    return out;
}

std::vector<SweepMean> sweep_means(const SweepReport &report) {
    std::vector<SweepMean> out;
    std::vector<std::size_t> counts;
    for (const auto &r : report.rows) {
        if (out.empty() || out.back().scheme != r.scheme || out.back().p_max_dbm != r.p_max_dbm) {
            out.push_back({r.scheme, r.p_max_dbm, 0.0});
            counts.push_back(0);
        }
        out.back().mean += r.sum_rate;
        ++counts.back();
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i].mean /= static_cast<double>(counts[i]);
    return out;
}

} // namespace ngma
