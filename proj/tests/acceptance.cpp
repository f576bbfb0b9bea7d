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

// Acceptance runner: one PASS/FAIL line per criterion, non-zero exit when any
// criterion fails. Oracles here are written independently of the library.

#include "ngma/bench.hpp"
#include "ngma/channels.hpp"
#include "ngma/metrics.hpp"
#include "ngma/solvers.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <tuple>

using namespace ngma;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
    bool pass = true;
    std::string detail;
};

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// ---- 1: BnB vs exhaustive on OFDMA ----------------------------------------

ProblemInstance random_ofdma(Rng &rng) {
    OfdmaPowerMinData d;
    d.h = CMatrix(2, 3);
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t c = 0; c < 3; ++c)
            d.h(u, c) = rng.cnormal();
    d.p_max.assign(2, 50.0);
    d.sigma2.assign(2, 1.0);
    for (std::size_t u = 0; u < 2; ++u)
        d.r_min.push_back(rng.uniform(0.5, 3.0));
    return build_problem(d);
}

Verdict criterion1() {
    Rng rng(101);
    Verdict v;
    double worst = 0.0, slowest = 0.0;
    int infeasible = 0;
    for (int t = 0; t < 50; ++t) {
        const auto inst = random_ofdma(rng);
        const auto t0 = Clock::now();
        const BnbResult b = solve_bnb(inst, ofdma_relaxer(inst, {}), {});
        slowest = std::max(slowest, seconds_since(t0));
        const Solution ex = solve_exhaustive(inst, ofdma_closed_form(inst), {});
        if (ex.status == SolveStatus::Infeasible) {
            ++infeasible;
            v.pass = v.pass && b.solution.status == SolveStatus::Infeasible;
            continue;
        }
        v.pass = v.pass && b.solution.status == SolveStatus::Optimal;
        const double e = std::abs(b.solution.objective - ex.objective) / std::abs(ex.objective);
        worst = std::max(worst, e);
    }
    v.pass = v.pass && worst <= 1e-6 && slowest < 1.0;
    v.detail = fmt("max rel err %.2e, slowest %.3f s, infeasible %g", worst, slowest, infeasible);
    return v;
}

// ---- 2: polyblock vs power grid -------------------------------------------

// Two-user SIC rates by hand: the stronger user cancels the weaker one.
double grid_search(double g0, double g1, double p_max, double r0, double r1, std::size_t n) {
    const bool first_strong = g0 >= g1;
    const double gs = first_strong ? g0 : g1, gw = first_strong ? g1 : g0;
    const double rs = first_strong ? r0 : r1, rw = first_strong ? r1 : r0;
    double best = -kInf;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double ps = p_max * static_cast<double>(i) / static_cast<double>(n - 1);
            const double pw = p_max * static_cast<double>(j) / static_cast<double>(n - 1);
            if (ps + pw > p_max)
                continue;
            const double a = std::log2(1.0 + gs * ps);
            const double b = std::log2(1.0 + gw * pw / (gw * ps + 1.0));
            if (a >= rs && b >= rw)
                best = std::max(best, a + b);
        }
    return best;
}

Verdict criterion2() {
    Rng rng(202);
    Verdict v;
    double worst = 0.0, slowest = 0.0;
    for (int t = 0; t < 25; ++t) {
        const double g0 = std::exp(rng.uniform(-1.0, 2.5)), g1 = std::exp(rng.uniform(-1.0, 2.5));
        const double p_max = rng.uniform(1.0, 20.0);
        const double r0 = rng.uniform(0.05, 0.8), r1 = rng.uniform(0.05, 0.8);
        NomaSumRateData d;
        d.h = CMatrix(2, 1);
        d.h(0, 0) = std::sqrt(g0);
        d.h(1, 0) = std::sqrt(g1);
        d.sigma2 = {1.0, 1.0};
        d.p_max = p_max;
        d.r_min = {r0, r1};
        const auto inst = build_problem(d);
        const auto t0 = Clock::now();
        const PolyblockResult r = solve_polyblock(inst, {});
        slowest = std::max(slowest, seconds_since(t0));
        const double grid = grid_search(g0, g1, p_max, r0, r1, 1000);
        if (!std::isfinite(grid)) {
            v.pass = v.pass && r.solution.status == SolveStatus::Infeasible;
            continue;
        }
        v.pass = v.pass && r.solution.status == SolveStatus::Optimal;
        worst = std::max(worst, std::abs(r.solution.objective - grid) / grid);
    }
    v.pass = v.pass && worst <= 1e-3 && slowest < 5.0;
    v.detail = fmt("max rel err %.2e, slowest %.3f s", worst, slowest);
    return v;
}

// ---- 3: SDR single-user closed form ---------------------------------------

Verdict criterion3() {
    Rng rng(303);
    Verdict v;
    double worst = 0.0, defect = 0.0;
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 2 + rng.uniform_index(5);
        cvec h(n);
        for (auto &e : h)
            e = rng.cnormal() * 1e-4;
        const double gamma = 0.1 + 10.0 * rng.uniform(), sigma2 = 1e-10 * (0.5 + rng.uniform());
        SinrPowerProblem p;
        p.h = {h};
        p.gamma = {gamma};
        p.sigma2 = {sigma2};
        p.order = SicOrder::from_permutation({0});
        const SdrResult r = solve_sdr(p, {});
        double h2 = 0.0;
        for (const cd &e : h)
            h2 += std::norm(e);
        const double closed = gamma * sigma2 / h2;
        worst = std::max(worst, std::abs(r.power - closed) / closed);
        defect = std::max(defect, r.rank_defect);
        v.pass = v.pass && r.status == SolveStatus::Optimal;
    }
    v.pass = v.pass && worst <= 1e-4 && defect <= 1e-6;
    v.detail = fmt("max rel err %.2e, max rank defect %.2e", worst, defect);
    return v;
}

// ---- 4: SCA on ISAC toys --------------------------------------------------

ProblemInstance isac_toy(Rng &rng) {
    IsacCommCentricData d;
    d.h_c = CMatrix(1, 2);
    d.s = CMatrix(1, 2);
    d.x0 = CMatrix(2, 2);
    for (std::size_t i = 0; i < 2; ++i) {
        d.h_c(0, i) = rng.cnormal();
        d.s(0, i) = rng.cnormal();
        for (std::size_t t = 0; t < 2; ++t)
            d.x0(i, t) = rng.cnormal();
    }
    d.sigma2 = {0.1};
    d.p_max = 1.0;
    d.delta = 1.2 * std::pow(d.x0.frobenius_norm(), 2) / 2.0;
    return build_problem(d);
}

// Central differences, compared relative to the analytic gradient.
double fd_mismatch(const ScaModel &m, const rvec &x) {
    const rvec g = m.gradient(x);
    rvec y = x;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h = 1e-6;
        y[i] = x[i] + h;
        const double up = m.objective(y);
        y[i] = x[i] - h;
        const double dn = m.objective(y);
        y[i] = x[i];
        const double fd = (up - dn) / (2 * h);
        num += (fd - g[i]) * (fd - g[i]);
        den += g[i] * g[i];
    }
    return std::sqrt(num) / std::max(1.0, std::sqrt(den));
}

Verdict criterion4() {
    Rng rng(404);
    Verdict v;
    SolverOptions o;
    o.tol_gap = 1e-12;
    double worst_drop = 0.0, worst_kkt = 0.0, worst_fd = 0.0;
    for (int t = 0; t < 20; ++t) {
        const auto inst = isac_toy(rng);
        const ScaResult r = solve_sca(inst, inst.layout.zeros(), o);
        for (std::size_t i = 1; i < r.history.size(); ++i)
            worst_drop = std::max(worst_drop, r.history[i - 1] - r.history[i]);
        worst_kkt = std::max(worst_kkt, r.kkt_residual);
        v.pass = v.pass && r.solution.max_residual <= 1e-7;
    }
    for (int t = 0; t < 100; ++t) {
        const auto inst = isac_toy(rng);
        const ScaModel m = isac_sca_model(inst);
        rvec x(m.n);
        for (double &e : x)
            e = rng.normal() * 0.5;
        worst_fd = std::max(worst_fd, fd_mismatch(m, x));
    }
    v.pass = v.pass && worst_drop <= 1e-12 && worst_kkt <= 1e-4 && worst_fd <= 1e-5;
    v.detail = fmt("max drop %.2e, max KKT %.2e, max FD mismatch %.2e", worst_drop, worst_kkt, worst_fd);
    return v;
}

// ---- 5: BCD on desk IRS instances -----------------------------------------

double db_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Every 2-bit phase vector with the matched-filter beam at full power.
double enumerate_single_user(const IrsSumRateData &d) {
    const std::size_t m = d.f.cols();
    std::size_t total = 1;
    for (std::size_t e = 0; e < m; ++e)
        total *= 4;
    double best = 0.0;
    rvec psi(m);
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t r = c;
        for (std::size_t e = 0; e < m; ++e) {
            psi[e] = static_cast<double>(r % 4) / 4.0;
            r /= 4;
        }
        const cvec h = irs_effective_channel(d.h_direct[0], d.f, psi, d.h_reflect[0]);
        double h2 = 0.0;
        for (const cd &z : h)
            h2 += std::norm(z);
        best = std::max(best, std::log2(1.0 + d.p_max * h2 / d.sigma2[0]));
    }
    return best;
}

Verdict criterion5() {
    Verdict v;
    SolverOptions o;
    o.tol_gap = 1e-12;
    ScenarioConfig desk = *preset("fig10-desk");
    std::size_t updates = 0, decreases = 0;
    for (std::size_t t = 0; t < 20; ++t) {
        const ChannelDraw dr = draw_channels(desk, t);
        for (double dbm : desk.p_max_dbm_list) {
            IrsSumRateData d = dr.truth;
            d.p_max = db_to_watts(dbm);
            const auto inst = build_problem(d);
            rvec x0 = inst.layout.zeros();
            inst.layout.set(x0, "psi", dr.random_psi);
            std::vector<std::size_t> perm(d.h_direct.size());
            for (std::size_t i = 0; i < perm.size(); ++i)
                perm[i] = perm.size() - 1 - i;
            set_alpha(inst, x0, SicOrder::from_permutation(perm));
            const BcdResult r = solve_bcd(inst, x0, irs_bcd_blocks(inst, o), o);
            double prev = r.history.empty() ? 0.0 : r.history.front().before;
            for (const auto &u : r.history) {
                ++updates;
                if (u.before != prev || (u.accepted && u.after < u.before))
                    ++decreases;
                if (u.accepted)
                    prev = u.after;
            }
        }
    }
    ScenarioConfig small = desk;
    small.k_users = 1;
    small.m_irs = 4;
    double worst = 0.0;
    for (std::size_t t = 0; t < 100; ++t) {
        const ChannelDraw dr = draw_channels(small, t);
        IrsSumRateData d = dr.truth;
        d.p_max = db_to_watts(small.p_max_dbm_list[t % small.p_max_dbm_list.size()]);
        const auto inst = build_problem(d);
        rvec x0 = inst.layout.zeros();
        inst.layout.set(x0, "psi", dr.random_psi);
        set_alpha(inst, x0, SicOrder::from_permutation({0}));
        const BcdResult r = solve_bcd(inst, x0, irs_bcd_blocks(inst, o), o);
        worst = std::max(worst, std::abs(r.solution.objective - enumerate_single_user(d)));
    }
    v.pass = decreases == 0 && worst <= 1e-6;
    v.detail = fmt("%g updates, %g decreasing, max gap to enumeration %.2e", static_cast<double>(updates),
                   static_cast<double>(decreases), worst);
    return v;
}

// ---- 6: NOMA telescoping --------------------------------------------------

Verdict criterion6() {
    Rng rng(606);
    double worst = 0.0;
    for (int rep = 0; rep < 1000; ++rep) {
        const std::size_t k = 1 + rng.uniform_index(6);
        const double g = std::exp(rng.uniform(-5.0, 5.0)), s2 = std::exp(rng.uniform(-3.0, 1.0));
        rvec p(k);
        double total = 0.0;
        for (auto &e : p) {
            e = rng.uniform(0.0, 10.0);
            total += e;
        }
        std::vector<std::size_t> perm(k);
        for (std::size_t i = 0; i < k; ++i)
            perm[i] = i;
        for (std::size_t i = k; i > 1; --i)
            std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
        const rvec r = noma_subcarrier_rates(rvec(k, g), p, rvec(k, s2), SicOrder::from_permutation(perm));
        double sum = 0.0;
        for (double e : r)
            sum += e;
        worst = std::max(worst, std::abs(sum - std::log2(1.0 + g * total / s2)));
    }
    return {worst <= 1e-10, fmt("max abs err %.2e over 1000 cases", worst)};
}

// ---- 7: worst-case RSMA soundness -----------------------------------------

cvec random_cvec(Rng &rng, std::size_t n, double scale = 1.0) {
    cvec v(n);
    for (auto &z : v)
        z = rng.cnormal() * scale;
    return v;
}

// Uniform direction, radius either on the sphere or uniform inside.
cvec ball_point(Rng &rng, std::size_t n, double radius, bool surface) {
    cvec d = random_cvec(rng, n);
    double len = 0.0;
    for (const cd &z : d)
        len += std::norm(z);
    const double r = (surface ? radius : radius * rng.uniform()) / std::sqrt(len);
    for (auto &z : d)
        z *= r;
    return d;
}

Verdict criterion7() {
    Rng rng(707);
    std::size_t violations = 0, nominal_mismatch = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t k = 2 + rng.uniform_index(3), n = 2 + rng.uniform_index(4);
        std::vector<cvec> h;
        RsmaAlloc a;
        a.p_common = random_cvec(rng, n);
        a.common_share = rvec(k, 0.0);
        rvec delta(k), zero(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            h.push_back(random_cvec(rng, n));
            a.p_private.push_back(random_cvec(rng, n, 0.5));
            double hn = 0.0;
            for (const cd &z : h[i])
                hn += std::norm(z);
            delta[i] = rng.uniform(0.01, 0.3) * std::sqrt(hn);
        }
        const rvec s2(k, rng.uniform(0.05, 1.0));
        const RsmaRates nominal = rsma_rates(h, a, s2), exact = worst_case_rsma_rates(h, zero, a, s2);
        for (std::size_t i = 0; i < k; ++i)
            if (exact.common_per_user[i] != nominal.common_per_user[i] ||
                exact.private_per_user[i] != nominal.private_per_user[i])
                ++nominal_mismatch;
        const RsmaRates bound = worst_case_rsma_rates(h, delta, a, s2);
        for (int s = 0; s < 10000; ++s) {
            std::vector<cvec> real = h;
            for (std::size_t i = 0; i < k; ++i) {
                const cvec e = ball_point(rng, n, delta[i], s % 2 == 0);
                for (std::size_t j = 0; j < n; ++j)
                    real[i][j] += e[j];
            }
            const RsmaRates r = rsma_rates(real, a, s2);
            for (std::size_t i = 0; i < k; ++i)
                if (bound.common_per_user[i] > r.common_per_user[i] ||
                    bound.private_per_user[i] > r.private_per_user[i])
                    ++violations;
        }
    }
    return {violations == 0 && nominal_mismatch == 0,
            fmt("%g violations in 1e6 samples, %g nominal mismatches", static_cast<double>(violations),
                static_cast<double>(nominal_mismatch))};
}

// ---- 8 and 9: desk sweeps -------------------------------------------------

using Key = std::tuple<double, std::size_t>; // power, trial

std::map<Scheme, std::map<Key, double>> by_scheme(const SweepReport &rep) {
    std::map<Scheme, std::map<Key, double>> out;
    for (const auto &r : rep.rows)
        out[r.scheme][{r.p_max_dbm, r.trial}] = r.sum_rate;
    return out;
}

std::string perfect_csv; // the serial criterion-8 run, reused by criterion 9

Verdict criterion8() {
    Verdict v;
    const auto t0 = Clock::now();
    SweepOptions serial;
    serial.jobs = 1;
    const SweepReport perfect = run_fig10_sweep(*preset("fig10-desk"), serial);
    const SweepReport robust = run_robust_variant(*preset("robust-desk"), serial);
    const double minutes = seconds_since(t0) / 60.0;
    perfect_csv = to_csv(perfect);

    const auto rates = by_scheme(perfect);
    std::size_t order_violations = 0;
    for (const auto &[key, opt] : rates.at(Scheme::Optimal)) {
        const double sub = rates.at(Scheme::Suboptimal).at(key);
        double base = -kInf;
        for (Scheme b : {Scheme::Baseline1, Scheme::Baseline2, Scheme::Baseline3})
            base = std::max(base, rates.at(b).at(key));
        if (opt < sub - 1e-8 || sub < base - 1e-8)
            ++order_violations;
    }

    std::size_t non_increasing = 0;
    const auto pm = sweep_means(perfect), rm = sweep_means(robust);
    for (std::size_t i = 1; i < pm.size(); ++i)
        if (pm[i].scheme == pm[i - 1].scheme && pm[i].mean <= pm[i - 1].mean)
            ++non_increasing;

    std::size_t robust_above = 0;
    double worst_loss = 0.0;
    for (std::size_t i = 0; i < pm.size() && i < rm.size(); ++i) {
        if (rm[i].mean > pm[i].mean)
            ++robust_above;
        worst_loss = std::max(worst_loss, 1.0 - rm[i].mean / pm[i].mean);
    }
    const bool robust_ok = rm.size() == pm.size() && robust_above == 0 && worst_loss < 0.25;

    v.pass = order_violations == 0 && non_increasing == 0 && robust_ok && minutes <= 30.0 && !perfect.partial;
    v.detail = fmt("ordering violations %g, non-increasing means %g, ", static_cast<double>(order_violations),
                   static_cast<double>(non_increasing)) +
               fmt("robust above perfect %g, worst robust loss %.1f%% (ceiling 25%%), ",
                   static_cast<double>(robust_above), 100.0 * worst_loss) +
               fmt("runtime %.1f min", minutes);
    return v;
}

Verdict criterion9() {
    SweepOptions two;
    two.jobs = 2;
    const std::string parallel = to_csv(run_fig10_sweep(*preset("fig10-desk"), two));
    ScenarioConfig robust = *preset("robust-desk");
    robust.trials = 10;
    SweepOptions one;
    one.jobs = 1;
    const std::string r1 = to_csv(run_robust_variant(robust, one));
    const std::string r2 = to_csv(run_robust_variant(robust, two));
    const std::string r3 = to_csv(run_robust_variant(robust, two));
    const bool desk_same = !perfect_csv.empty() && parallel == perfect_csv;
    const bool robust_same = r1 == r2 && r2 == r3;
    return {desk_same && robust_same, std::string("fig10-desk jobs 1 vs 2: ") + (desk_same ? "identical" : "differ") +
                                          ", robust-desk (10 trials) jobs 1/2/2: " +
                                          (robust_same ? "identical" : "differ")};
}

} // namespace

// --known-failure N marks a criterion recorded as unattainable: it still prints
// FAIL, but only an unexpected failure or an unexpected pass changes the exit code.
int main(int argc, char **argv) {
    std::set<std::size_t> known;
    for (int i = 1; i + 1 < argc; i += 2)
        if (std::string(argv[i]) == "--known-failure")
            known.insert(std::stoul(argv[i + 1]));
    Verdict (*const criteria[])() = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                     criterion6, criterion7, criterion8, criterion9};
    int unexpected = 0;
    for (std::size_t i = 0; i < std::size(criteria); ++i) {
        Verdict v;
        try {
            v = criteria[i]();
        } catch (const std::exception &e) {
            v = {false, std::string("threw: ") + e.what()};
        }
        const bool expected_fail = known.count(i + 1) > 0;
        if (v.pass == expected_fail)
            ++unexpected;
        std::printf("criterion %zu: %s  %s%s\n", i + 1, v.pass ? "PASS" : "FAIL", v.detail.c_str(),
                    expected_fail ? (v.pass ? "  [declared known failure, now passes]" : "  [known failure]") : "");
        std::fflush(stdout);
    }
    return unexpected == 0 ? 0 : 1;
}
