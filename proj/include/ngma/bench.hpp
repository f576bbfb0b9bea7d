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

#include "ngma/solvers.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ngma {

enum class Scheme { Optimal, Suboptimal, Baseline1, Baseline2, Baseline3 };

std::string_view scheme_name(Scheme s);
std::optional<Scheme> parse_scheme(std::string_view name);
std::vector<Scheme> all_schemes();

struct ScenarioConfig {
    std::size_t n_antennas = 8;
    std::size_t k_users = 4;
    std::size_t m_irs = 16;
    double cell_radius_m = 50.0;
    double bs_irs_dist_m = 50.0;
    int phase_bits = 2;
    double pathloss_exp = 3.0;
    double rician_k = 1.0;
    double noise_dbm = -117.0;
    std::vector<double> p_max_dbm_list{20.0, 25.0, 30.0, 35.0};
    std::size_t trials = 100;
    std::uint64_t seed = 1;
    double uncertainty_pct = 0.0; // upsilon^2 in percent; 0 means perfect CSI
    std::vector<Scheme> schemes = all_schemes();
    double carrier_hz = 2e9;
    double ref_gain_db = -30.0;
};

inline constexpr double kInnerRadiusM = 5.0;
inline constexpr double kSectorWidthRad = 2.0943951023931953; // 120 degrees
// The optimal scheme enumerates at most this many phase configurations.
inline constexpr std::size_t kMaxOptimalConfigs = std::size_t{1} << 16;

// Throws std::invalid_argument naming the offending field.
void validate(const ScenarioConfig &cfg);

std::vector<std::string> preset_names();
std::optional<ScenarioConfig> preset(std::string_view name);

// One paired channel draw. truth is what the users see; estimate is what the
// BS designs with (equal to truth under perfect CSI). delta bounds the error
// of each user's effective channel for any phase choice.
struct ChannelDraw {
    IrsSumRateData truth;
    IrsSumRateData estimate;
    rvec delta;        // with the IRS: direct radius + ||F||_2 * reflected radius
    rvec delta_direct; // without the IRS
    rvec random_psi; // shared by every scheme that needs a random phase start
};

ChannelDraw draw_channels(const ScenarioConfig &cfg, std::size_t trial);

struct SchemeOutcome {
    double sum_rate = 0.0; // achieved on the true channel
    SolveStatus status = SolveStatus::Feasible;
    std::size_t iterations = 0;
    std::optional<double> gap;
    std::optional<double> worst_case_bound; // robust runs only
    rvec psi;
    std::vector<std::size_t> decode_order;
};

SchemeOutcome run_scheme(const ScenarioConfig &cfg, Scheme scheme, std::size_t p_index, std::size_t trial);
// Same, on an existing draw.
SchemeOutcome run_scheme(const ScenarioConfig &cfg, Scheme scheme, std::size_t p_index, std::size_t trial,
                         const ChannelDraw &draw);

struct SweepRow {
    Scheme scheme = Scheme::Optimal;
    double p_max_dbm = 0.0;
    std::size_t trial = 0;
    double sum_rate = 0.0;
    SolveStatus status = SolveStatus::Feasible;
    std::size_t iterations = 0;
    double runtime_ms = 0.0;
    std::optional<double> gap;
    std::optional<double> worst_case_bound; // not part of the CSV
};

struct SweepReport {
    std::vector<SweepRow> rows; // ordered by (scheme, power, trial)
    bool partial = false;       // some row recorded a solver failure
};

struct SweepOptions {
    unsigned jobs = 0; // 0: all available threads; 1: serial reference path
    bool record_runtime = false;
};

SweepReport run_fig10_sweep(const ScenarioConfig &cfg, const SweepOptions &opts = {});
// Requires uncertainty_pct in [0, 100); at 0 it is the perfect-CSI sweep.
SweepReport run_robust_variant(const ScenarioConfig &cfg, const SweepOptions &opts = {});

inline constexpr std::string_view kCsvHeader =
    "scheme,p_max_dbm,trial,sum_rate_bits_s_hz,status,iterations,runtime_ms,gap";

std::string to_csv(const SweepReport &report);

// Mean sum rate per (scheme, power) in report order.
struct SweepMean {
    Scheme scheme;
    double p_max_dbm;
    double mean;
};
std::vector<SweepMean> sweep_means(const SweepReport &report);

} // namespace ngma
