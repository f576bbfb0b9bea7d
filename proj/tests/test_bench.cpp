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

#include <doctest.h>

#include <cmath>

using namespace ngma;

namespace {

ScenarioConfig small(std::size_t k, std::size_t m, std::size_t trials) {
    ScenarioConfig c = *preset("fig10-desk");
    c.k_users = k;
    c.m_irs = m;
    c.trials = trials;
    return c;
}

double watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

// Determinant-lemma two-user sum capacity on a power-split grid with golden
// refinement; independent of the barrier solver.
double two_user_capacity(const std::vector<cvec> &h, double sigma2, double p_max) {
    const double a = norm2(h[0]) / sigma2, b = norm2(h[1]) / sigma2;
    const double c = std::norm(dot(h[0], h[1])) / (sigma2 * sigma2);
    auto f = [&](double q1) {
        const double q2 = p_max - q1;
        return std::log2((1.0 + q1 * a) * (1.0 + q2 * b) - q1 * q2 * c);
    };
    const int grid = 2000;
    int arg = 0;
    for (int i = 1; i <= grid; ++i)
        if (f(p_max * i / grid) > f(p_max * arg / grid))
            arg = i;
    double lo = p_max * std::max(0, arg - 1) / grid, hi = p_max * std::min(grid, arg + 1) / grid;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int it = 0; it < 200; ++it) {
        const double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        if (f(x1) < f(x2))
            lo = x1;
        else
            hi = x2;
    }
    return f(0.5 * (lo + hi));
}

} // namespace

TEST_CASE("bench: presets") {
    CHECK(preset_names() == std::vector<std::string>{"fig10-full", "fig10-desk", "robust-desk"});
    const auto full = *preset("fig10-full");
    CHECK(full.n_antennas == 8);
    CHECK(full.k_users == 4);
    CHECK(full.m_irs == 16);
    CHECK(full.noise_dbm == -117.0);
    CHECK(full.phase_bits == 2);
    const auto desk = *preset("fig10-desk");
    CHECK(desk.k_users == 3);
    CHECK(desk.m_irs == 6);
    CHECK(desk.trials == 100);
    CHECK(desk.schemes.size() == 5);
    CHECK(preset("robust-desk")->uncertainty_pct == 10.0);
    CHECK_FALSE(preset("nope"));
}

TEST_CASE("bench: optimal is refused beyond the enumeration budget") {
    ScenarioConfig c;
    c.schemes = {Scheme::Optimal};
    CHECK_THROWS_WITH(validate(c), doctest::Contains("schemes"));
    c.m_irs = 8;
    CHECK_NOTHROW(validate(c));
}

TEST_CASE("bench: single-user baseline3 is the matched-filter rate") {
    const auto c = small(1, 4, 3);
    for (std::size_t t = 0; t < 3; ++t) {
        const auto draw = draw_channels(c, t);
        const double gain = norm2(draw.truth.h_direct[0]) / draw.truth.sigma2[0];
        for (std::size_t p = 0; p < c.p_max_dbm_list.size(); ++p) {
            const double pw = watts(c.p_max_dbm_list[p]);
            // Oracle: MF beam, power fraction on a 1e-3 grid.
            double grid = 0.0;
            for (int i = 0; i <= 1000; ++i)
                grid = std::max(grid, std::log2(1.0 + gain * pw * i / 1000.0));
            const auto o = run_scheme(c, Scheme::Baseline3, p, t, draw);
            CHECK(o.sum_rate == doctest::Approx(std::log2(1.0 + gain * pw)).epsilon(1e-9));
            CHECK(o.sum_rate == doctest::Approx(grid).epsilon(1e-12));
        }
    }
}

TEST_CASE("bench: vanishing power gives vanishing rates") {
    auto c = small(2, 3, 1);
    c.p_max_dbm_list = {-250.0};
    for (Scheme s : all_schemes())
        CHECK(run_scheme(c, s, 0, 0).sum_rate <= 1e-9);
}

TEST_CASE("bench: desk optimal equals joint order and phase enumeration") {
    const auto c = small(2, 4, 2);
    for (std::size_t t = 0; t < 2; ++t) {
        const auto draw = draw_channels(c, t);
        const std::size_t p = t;
        const double pw = watts(c.p_max_dbm_list[p]);
        double best = 0.0;
        rvec psi(4);
        for (int order = 0; order < 2; ++order) // the capacity oracle does not depend on it
            for (int q = 0; q < 256; ++q) {
                for (int e = 0; e < 4; ++e)
                    psi[e] = ((q >> (2 * e)) & 3) / 4.0;
                std::vector<cvec> h;
                for (std::size_t u = 0; u < 2; ++u)
                    h.push_back(irs_effective_channel(draw.truth.h_direct[u], draw.truth.f, psi,
                                                      draw.truth.h_reflect[u]));
                best = std::max(best, two_user_capacity(h, draw.truth.sigma2[0], pw));
            }
        const auto o = run_scheme(c, Scheme::Optimal, p, t, draw);
        CHECK(o.status == SolveStatus::Optimal);
        CHECK(o.sum_rate == doctest::Approx(best).epsilon(1e-8));
    }
}

TEST_CASE("bench: per-trial ordering on a small desk sweep") {
    auto c = small(2, 4, 4);
    const auto rep = run_fig10_sweep(c, SweepOptions{1, false});
    REQUIRE_FALSE(rep.partial);
    const std::size_t np = c.p_max_dbm_list.size(), nt = c.trials;
    auto at = [&](std::size_t s, std::size_t p, std::size_t t) { return rep.rows[(s * np + p) * nt + t].sum_rate; };
    for (std::size_t p = 0; p < np; ++p)
        for (std::size_t t = 0; t < nt; ++t) {
            CHECK(at(0, p, t) >= at(1, p, t) * (1.0 - 1e-8));
            for (std::size_t b = 2; b < 5; ++b)
                CHECK(at(1, p, t) >= at(b, p, t) * (1.0 - 1e-8));
            if (p > 0)
                CHECK(at(0, p, t) > at(0, p - 1, t));
        }
}

TEST_CASE("bench: one row per power point, csv layout") {
    auto c = small(2, 3, 1);
    c.schemes = {Scheme::Baseline2};
    const auto rep = run_fig10_sweep(c, SweepOptions{1, false});
    REQUIRE(rep.rows.size() == c.p_max_dbm_list.size());
    const std::string csv = to_csv(rep);
    CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    CHECK(csv.find("\nbaseline2,20,0,") != std::string::npos);
    // Uncertified rows end with an empty gap field.
    CHECK(csv.find(",0,\n") != std::string::npos);
}

TEST_CASE("bench: byte-identical output across job counts and repeats") {
    auto c = small(2, 3, 3);
    const std::string serial = to_csv(run_fig10_sweep(c, SweepOptions{1, false}));
    CHECK(to_csv(run_fig10_sweep(c, SweepOptions{2, false})) == serial);
    CHECK(to_csv(run_fig10_sweep(c, SweepOptions{3, false})) == serial);
    CHECK(to_csv(run_fig10_sweep(c, SweepOptions{1, false})) == serial);
    c.seed = 2;
    CHECK(to_csv(run_fig10_sweep(c, SweepOptions{1, false})) != serial);
}

TEST_CASE("bench: channel draws are paired across schemes and powers") {
    auto a = small(3, 4, 2);
    auto b = a;
    b.schemes = {Scheme::Baseline3};
    b.p_max_dbm_list = {0.0};
    const auto da = draw_channels(a, 1), db = draw_channels(b, 1);
    CHECK(da.truth.h_direct == db.truth.h_direct);
    CHECK(da.truth.f.data() == db.truth.f.data());
    CHECK(da.random_psi == db.random_psi);
    CHECK_FALSE(draw_channels(a, 0).truth.h_direct == da.truth.h_direct);
}

TEST_CASE("bench: zero uncertainty reproduces the perfect-CSI sweep") {
    auto c = small(2, 3, 2);
    const std::string perfect = to_csv(run_fig10_sweep(c, SweepOptions{1, false}));
    CHECK(to_csv(run_robust_variant(c, SweepOptions{1, false})) == perfect);
    const auto d = draw_channels(c, 0);
    CHECK(d.estimate.h_direct == d.truth.h_direct);
    CHECK(d.delta == rvec(2, 0.0));
}

TEST_CASE("bench: robust rows are sound and below perfect CSI for the optimal scheme") {
    auto c = small(2, 3, 4);
    c.uncertainty_pct = 10.0;
    const auto robust = run_robust_variant(c, SweepOptions{1, false});
    for (const auto &r : robust.rows) {
        REQUIRE(r.worst_case_bound);
        CHECK(*r.worst_case_bound <= r.sum_rate);
    }
    // The truth lies in the design ball.
    const double v = std::sqrt(0.1);
    for (std::size_t t = 0; t < c.trials; ++t) {
        const auto d = draw_channels(c, t);
        for (std::size_t u = 0; u < 2; ++u) {
            CHECK(norm(axpy(-1.0, d.truth.h_direct[u], d.estimate.h_direct[u])) <=
                  v * norm(d.estimate.h_direct[u]));
            CHECK(norm(axpy(-1.0, d.truth.h_reflect[u], d.estimate.h_reflect[u])) <=
                  v * norm(d.estimate.h_reflect[u]));
        }
    }
    c.uncertainty_pct = 0.0;
    const auto perfect = run_fig10_sweep(c, SweepOptions{1, false});
    const std::size_t per_scheme = c.p_max_dbm_list.size() * c.trials;
    for (std::size_t i = 0; i < per_scheme; ++i)
        CHECK(robust.rows[i].sum_rate <= perfect.rows[i].sum_rate * (1.0 + 1e-8));
}

TEST_CASE("bench: scheme names round-trip") {
    for (Scheme s : all_schemes())
        CHECK(parse_scheme(scheme_name(s)) == s);
    CHECK_FALSE(parse_scheme("optimal2"));
}
