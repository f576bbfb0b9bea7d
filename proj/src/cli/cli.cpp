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

#include "ngma/cli.hpp"

#include "ngma/solvers.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace ngma {

ConfigError::ConfigError(std::size_t line, std::string key, const std::string &what)
    : std::runtime_error(what), line_(line), key_(std::move(key)) {}

namespace {

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> out;
    for (;;) {
        const auto c = s.find(',');
        out.push_back(trim(s.substr(0, c)));
        if (c == std::string_view::npos)
            return out;
        s.remove_prefix(c + 1);
    }
}

template <class T> std::optional<T> parse_number(std::string_view s) {
    T v{};
    if (!s.empty() && s.front() == '+')
        s.remove_prefix(1);
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || end != s.data() + s.size() || s.empty())
        return std::nullopt;
    if constexpr (std::is_floating_point_v<T>)
        if (!std::isfinite(v))
            return std::nullopt;
    return v;
}

std::string fmt_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<Scheme> parse_scheme_list(std::string_view s) {
    std::vector<Scheme> out;
    for (std::string_view name : split_commas(s)) {
        const auto sc = parse_scheme(name);
        if (!sc)
            throw std::invalid_argument("unknown scheme '" + std::string(name) + "'");
        out.push_back(*sc);
    }
    return out;
}

using Setter = std::function<void(ScenarioConfig &, std::string_view)>;

template <class T> Setter number_key(T ScenarioConfig::*field, const char *what) {
    return [field, what](ScenarioConfig &c, std::string_view v) {
        const auto n = parse_number<T>(v);
        if (!n)
            throw std::invalid_argument(std::string("expected ") + what + ", got '" + std::string(v) + "'");
        c.*field = *n;
    };
}

// Declaration order is the serialization order.
const std::vector<std::pair<std::string, Setter>> &setters() {
    static const std::vector<std::pair<std::string, Setter>> table = {
        {"n_antennas", number_key(&ScenarioConfig::n_antennas, "an unsigned integer")},
        {"k_users", number_key(&ScenarioConfig::k_users, "an unsigned integer")},
        {"m_irs", number_key(&ScenarioConfig::m_irs, "an unsigned integer")},
        {"cell_radius_m", number_key(&ScenarioConfig::cell_radius_m, "a number")},
        {"bs_irs_dist_m", number_key(&ScenarioConfig::bs_irs_dist_m, "a number")},
        {"phase_bits", number_key(&ScenarioConfig::phase_bits, "an integer")},
        {"pathloss_exp", number_key(&ScenarioConfig::pathloss_exp, "a number")},
        {"rician_k", number_key(&ScenarioConfig::rician_k, "a number")},
        {"noise_dbm", number_key(&ScenarioConfig::noise_dbm, "a number")},
        {"p_max_dbm_list",
         [](ScenarioConfig &c, std::string_view v) {
             std::vector<double> out;
             for (std::string_view item : split_commas(v)) {
                 const auto n = parse_number<double>(item);
                 if (!n)
                     throw std::invalid_argument("expected a comma-separated list of numbers, got '" +
                                                 std::string(v) + "'");
                 out.push_back(*n);
             }
             c.p_max_dbm_list = std::move(out);
         }},
        {"trials", number_key(&ScenarioConfig::trials, "an unsigned integer")},
        {"seed", number_key(&ScenarioConfig::seed, "an unsigned 64-bit integer")},
        {"uncertainty_pct", number_key(&ScenarioConfig::uncertainty_pct, "a number")},
        {"schemes", [](ScenarioConfig &c, std::string_view v) { c.schemes = parse_scheme_list(v); }},
        {"carrier_hz", number_key(&ScenarioConfig::carrier_hz, "a number")},
        {"ref_gain_db", number_key(&ScenarioConfig::ref_gain_db, "a number")},
    };
    return table;
}

// validate() prefixes its message with the field name.
std::string field_of(const std::string &msg) { return msg.substr(0, msg.find(':')); }

} // namespace

ScenarioConfig parse_config(std::string_view text, const ScenarioConfig &base) {
    ScenarioConfig cfg = base;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    while (!text.empty() || line_no == 0) {
        ++line_no;
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        const std::string where = "line " + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos)
            throw ConfigError(line_no, {}, where + "expected 'key = value', got '" + std::string(line) + "'");
        const std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto &table = setters();
        const auto it = std::find_if(table.begin(), table.end(), [&](const auto &e) { return e.first == key; });
        if (it == table.end())
            throw ConfigError(line_no, key, where + "unknown key '" + key + "'");
        if (!seen.insert(key).second)
            throw ConfigError(line_no, key, where + "duplicate key '" + key + "'");
        try {
            it->second(cfg, value);
        } catch (const std::invalid_argument &e) {
            throw ConfigError(line_no, key, where + key + ": " + e.what());
        }
    }
    try {
        validate(cfg);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(0, field_of(e.what()), e.what());
    }
    return cfg;
}

ScenarioConfig parse_config(std::string_view text) { return parse_config(text, *preset("fig10-full")); }

std::string serialize_config(const ScenarioConfig &cfg) {
    std::ostringstream os;
    os << "n_antennas = " << cfg.n_antennas << '\n';
    os << "k_users = " << cfg.k_users << '\n';
    os << "m_irs = " << cfg.m_irs << '\n';
    os << "cell_radius_m = " << fmt_double(cfg.cell_radius_m) << '\n';
    os << "bs_irs_dist_m = " << fmt_double(cfg.bs_irs_dist_m) << '\n';
    os << "phase_bits = " << cfg.phase_bits << '\n';
    os << "pathloss_exp = " << fmt_double(cfg.pathloss_exp) << '\n';
    os << "rician_k = " << fmt_double(cfg.rician_k) << '\n';
    os << "noise_dbm = " << fmt_double(cfg.noise_dbm) << '\n';
    os << "p_max_dbm_list = ";
    for (std::size_t i = 0; i < cfg.p_max_dbm_list.size(); ++i)
        os << (i ? ", " : "") << fmt_double(cfg.p_max_dbm_list[i]);
    os << '\n';
    os << "trials = " << cfg.trials << '\n';
    os << "seed = " << cfg.seed << '\n';
    os << "uncertainty_pct = " << fmt_double(cfg.uncertainty_pct) << '\n';
    os << "schemes = ";
    for (std::size_t i = 0; i < cfg.schemes.size(); ++i)
        os << (i ? ", " : "") << scheme_name(cfg.schemes[i]);
    os << '\n';
    os << "carrier_hz = " << fmt_double(cfg.carrier_hz) << '\n';
    os << "ref_gain_db = " << fmt_double(cfg.ref_gain_db) << '\n';
    return os.str();
}

OfdmaPowerMinData ofdma_oracle_fixture() {
    OfdmaPowerMinData d;
    d.h = CMatrix{{cd(0.9, 0.0), cd(0.4, 0.3), cd(1.2, -0.1)}, {cd(0.0, 0.5), cd(1.1, 0.2), cd(0.3, 0.0)}};
    d.p_max = {4.0, 4.0};
    d.r_min = {1.5, 1.0};
    d.sigma2 = {0.1, 0.1};
    return d;
}

namespace {

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Usage("--config: cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ScenarioConfig effective_config(const CliInvocation &inv) {
    ScenarioConfig base = *preset("fig10-full");
    if (inv.preset) {
        const auto p = preset(*inv.preset);
        if (!p)
            throw Usage("--preset: no preset named '" + *inv.preset + "'");
        base = *p;
    }
    ScenarioConfig cfg = inv.config_path ? parse_config(read_file(*inv.config_path), base) : base;
    if (inv.seed)
        cfg.seed = *inv.seed;
    if (inv.schemes) {
        try {
            cfg.schemes = parse_scheme_list(*inv.schemes);
        } catch (const std::invalid_argument &e) {
            throw Usage(std::string("--scheme: ") + e.what());
        }
    }
    try {
        validate(cfg);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(0, field_of(e.what()), e.what());
    }
    return cfg;
}

void print_solution(std::ostream &out, const Solution &s) {
    out << "objective = " << fmt_double(s.objective) << '\n';
    out << "status = " << status_name(s.status) << '\n';
    out << "gap = " << (s.gap ? fmt_double(*s.gap) : std::string()) << '\n';
    out << "iterations = " << s.iterations << '\n';
    out << "max_residual = " << fmt_double(s.max_residual) << '\n';
    out << "x = ";
    for (std::size_t i = 0; i < s.x.size(); ++i)
        out << (i ? ", " : "") << fmt_double(s.x[i]);
    out << '\n';
}

bool ofdma_requested(const CliInvocation &inv) { return inv.preset && *inv.preset == kOfdmaOraclePreset; }

int solve_ofdma(const CliInvocation &inv, std::ostream &out, bool exhaustive) {
    if (inv.config_path || inv.schemes)
        throw Usage(std::string("--preset ") + std::string(kOfdmaOraclePreset) + " takes no --config or --scheme");
    const ProblemInstance inst = build_problem(ofdma_oracle_fixture());
    const SolverOptions opts;
    const Solution s = exhaustive ? solve_exhaustive(inst, ofdma_closed_form(inst), opts)
                                  : solve_bnb(inst, ofdma_relaxer(inst, opts), opts).solution;
    if (exhaustive)
        out << "reference_value = " << fmt_double(s.objective) << '\n';
    else
        print_solution(out, s);
    return s.status == SolveStatus::Infeasible ? kExitInfeasible : kExitOk;
}

// One block per (scheme, power) on trial 0.
int solve_scenario(const ScenarioConfig &cfg, std::ostream &out) {
    const ChannelDraw draw = draw_channels(cfg, 0);
    int code = kExitOk;
    for (Scheme sc : cfg.schemes)
        for (std::size_t p = 0; p < cfg.p_max_dbm_list.size(); ++p) {
            const SchemeOutcome o = run_scheme(cfg, sc, p, 0, draw);
            out << "scheme = " << scheme_name(sc) << '\n';
            out << "p_max_dbm = " << fmt_double(cfg.p_max_dbm_list[p]) << '\n';
            out << "objective = " << fmt_double(o.sum_rate) << '\n';
            out << "status = " << status_name(o.status) << '\n';
            out << "gap = " << (o.gap ? fmt_double(*o.gap) : std::string()) << '\n';
            out << "iterations = " << o.iterations << '\n';
            if (o.worst_case_bound)
                out << "worst_case_bound = " << fmt_double(*o.worst_case_bound) << '\n';
            out << "psi = ";
            for (std::size_t i = 0; i < o.psi.size(); ++i)
                out << (i ? ", " : "") << fmt_double(o.psi[i]);
            out << "\ndecode_order = ";
            for (std::size_t i = 0; i < o.decode_order.size(); ++i)
                out << (i ? ", " : "") << o.decode_order[i];
            out << "\n\n";
            if (o.status == SolveStatus::Infeasible)
                code = kExitInfeasible;
        }
    return code;
}

// Joint enumeration of the phase codebook on trial 0; the sum capacity does
// not depend on the decode order, so orders need no enumeration.
int oracle_scenario(const ScenarioConfig &cfg, std::ostream &out) {
    const std::size_t bits = static_cast<std::size_t>(cfg.phase_bits);
    if (bits * cfg.m_irs > kMaxExhaustiveBinaries)
        throw ConfigError(0, "m_irs",
                          "m_irs: phase_bits * m_irs = " + std::to_string(bits * cfg.m_irs) +
                              " exceeds the enumeration budget of " + std::to_string(kMaxExhaustiveBinaries));
    const ChannelDraw draw = draw_channels(cfg, 0);
    const rvec levels = irs_phase_levels(cfg.phase_bits);
    for (double p_dbm : cfg.p_max_dbm_list) {
        IrsSumRateData d = draw.truth;
        d.p_max = db_to_linear(p_dbm - 30.0);
        const auto payoff = [&](const std::vector<int> &b) -> std::optional<double> {
            rvec psi(cfg.m_irs);
            for (std::size_t e = 0; e < cfg.m_irs; ++e) {
                std::size_t level = 0;
                for (std::size_t j = 0; j < bits; ++j)
                    level = 2 * level + static_cast<std::size_t>(b[e * bits + j]);
                psi[e] = levels[level];
            }
            return mac_sum_capacity(irs_channels(d, psi), d.sigma2, d.p_max, SolverOptions{}).sum_rate;
        };
        const Solution s = solve_exhaustive(bits * cfg.m_irs, payoff, Sense::Maximize);
        out << "p_max_dbm = " << fmt_double(p_dbm) << '\n';
        out << "reference_value = " << fmt_double(s.objective) << '\n';
    }
    return kExitOk;
}

void write_output(const CliInvocation &inv, const std::string &bytes, std::ostream &out) {
    if (!inv.out_path) {
        out << bytes;
        return;
    }
    std::ofstream f(*inv.out_path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Usage("--out: cannot write '" + *inv.out_path + "'");
    f << bytes;
    f.close();
    if (!f)
        throw Usage("--out: cannot write '" + *inv.out_path + "'");
}

int run(const CliInvocation &inv, std::ostream &out, std::ostream &err) {
    if (inv.command == "list-presets") {
        std::ostringstream os;
        for (const auto &name : preset_names())
            os << name << '\n';
        write_output(inv, os.str(), out);
        return kExitOk;
    }
    if (inv.command == "solve" || inv.command == "oracle") {
        const bool exhaustive = inv.command == "oracle";
        std::ostringstream os;
        const int code = ofdma_requested(inv) ? solve_ofdma(inv, os, exhaustive)
                         : exhaustive         ? oracle_scenario(effective_config(inv), os)
                                              : solve_scenario(effective_config(inv), os);
        write_output(inv, os.str(), out);
        return code;
    }
    if (inv.command == "run-sweep") {
        const ScenarioConfig cfg = effective_config(inv);
        SweepOptions so;
        so.jobs = inv.jobs.value_or(0);
        so.record_runtime = inv.record_runtime;
        const SweepReport rep = cfg.uncertainty_pct > 0.0 ? run_robust_variant(cfg, so) : run_fig10_sweep(cfg, so);
        write_output(inv, to_csv(rep), out);
        if (rep.partial)
            err << "warning: some rows recorded a solver failure\n";
        for (const auto &row : rep.rows)
            if (row.status == SolveStatus::Infeasible)
                return kExitInfeasible;
        return kExitOk;
    }
    throw Usage("unknown command '" + inv.command + "'");
}

} // namespace

int dispatch(const CliInvocation &inv, std::ostream &out, std::ostream &err) {
    try {
        return run(inv, out, err);
    } catch (const ConfigError &e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const Usage &e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

} // namespace ngma
