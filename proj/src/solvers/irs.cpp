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

#include "ngma/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace ngma {

struct IrsCapacityCache {
    struct Entry {
        double rate = 0.0;
        rvec q;
    };
    std::map<std::vector<int>, Entry> entries;
};

std::shared_ptr<IrsCapacityCache> make_irs_cache() { return std::make_shared<IrsCapacityCache>(); }

std::vector<cvec> irs_channels(const IrsSumRateData &d, const rvec &psi) {
    std::vector<cvec> h(d.h_direct.size());
    for (std::size_t k = 0; k < h.size(); ++k)
        h[k] = irs_effective_channel(d.h_direct[k], d.f, psi, d.h_reflect[k]);
    return h;
}

rvec irs_phase_levels(int phase_bits) {
    if (phase_bits < 0 || phase_bits > 16)
        throw std::invalid_argument("irs_phase_levels: phase bits out of range");
    const std::size_t n = phase_bits == 0 ? 256 : (std::size_t{1} << phase_bits);
    rvec out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = static_cast<double>(i) / static_cast<double>(n);
    return out;
}

std::vector<SicOrder> all_sic_orders(std::size_t k) {
    std::vector<SicOrder> out;
    for (const auto &perm : all_permutations(k))
        out.push_back(SicOrder::from_permutation(perm));
    return out;
}

namespace {

const IrsSumRateData &irs_data(const ProblemInstance &inst) {
    const auto *d = std::get_if<IrsSumRateData>(&inst.kind);
    if (!d)
        throw std::invalid_argument("IRS solver needs an IrsSumRate instance");
    return *d;
}

std::vector<std::size_t> decode_order_of(const ProblemInstance &inst, const rvec &x) {
    const auto perm = SicOrder::gating(alpha_of(inst, x)).permutation();
    if (!perm)
        throw std::invalid_argument("IRS solver: SIC indicators do not form an order");
    return *perm;
}

void write_beams(const Layout &l, rvec &x, const std::vector<cvec> &beams) {
    cvec flat;
    for (const auto &b : beams)
        flat.insert(flat.end(), b.begin(), b.end());
    l.set_complex(x, "p", flat);
}

// Single user, fixed beam w: maximize |w^H hD + sum_m b_m x_m| over codebook
// phases x_m, b_m = w^H f_m hR_m. For a direction phi of the sum each x_m
// independently maximizes Re(b_m x_m e^{-j phi}); that choice only changes
// at M L breakpoints, so one probe per arc covers every candidate optimum.
rvec single_user_phases(const IrsSumRateData &d, const cvec &w, const rvec &levels, const rvec &current) {
    const std::size_t m = d.f.cols(), nl = levels.size();
    const cd c0 = dot(w, d.h_direct[0]);
    cvec b(m);
    for (std::size_t e = 0; e < m; ++e) {
        cd s = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i)
            s += std::conj(w[i]) * d.f(i, e);
        b[e] = s * d.h_reflect[0][e];
    }
    auto value = [&](const rvec &psi) {
        cd s = c0;
        for (std::size_t e = 0; e < m; ++e)
            s += b[e] * std::polar(1.0, 2.0 * std::numbers::pi * psi[e]);
        return std::abs(s);
    };
    const double two_pi = 2.0 * std::numbers::pi;
    std::vector<double> cuts;
    for (std::size_t e = 0; e < m; ++e)
        for (std::size_t l = 0; l < nl; ++l)
            cuts.push_back(std::fmod(std::arg(b[e]) + two_pi * (levels[l] + 0.5 / static_cast<double>(nl)) + 4.0 * two_pi,
                                     two_pi));
    std::sort(cuts.begin(), cuts.end());
    rvec best = current;
    double best_v = value(current);
    for (std::size_t c = 0; c < cuts.size(); ++c) {
        const double next = c + 1 < cuts.size() ? cuts[c + 1] : cuts[0] + two_pi;
        const double phi = 0.5 * (cuts[c] + next);
        rvec psi(m);
        for (std::size_t e = 0; e < m; ++e) {
            double top = -kInf;
            for (std::size_t l = 0; l < nl; ++l) {
                const double r = std::cos(std::arg(b[e]) + two_pi * levels[l] - phi);
                if (r > top) {
                    top = r;
                    psi[e] = levels[l];
                }
            }
        }
        const double v = value(psi);
        if (v > best_v) {
            best_v = v;
            best = psi;
        }
    }
    return best;
}

} // namespace

std::vector<BcdBlock> irs_bcd_blocks(const ProblemInstance &inst, const SolverOptions &opts) {
    const IrsSumRateData d = irs_data(inst);
    const Layout layout = inst.layout;
    const std::size_t k = d.h_direct.size(), n = d.h_direct[0].size(), m = d.f.cols();

    BcdBlock beams{"beams", [inst, d, layout, opts](const rvec &x) {
                       const auto order = decode_order_of(inst, x);
                       const auto h = irs_channels(d, layout.get(x, "psi"));
                       const MacSolution mac = mac_sum_capacity(h, d.sigma2, d.p_max, opts);
                       rvec out = x;
                       write_beams(layout, out, mac_to_bc_beams(h, d.sigma2, mac.q, order));
                       return out;
                   }};

    const rvec levels = irs_phase_levels(d.phase_bits);
    BcdBlock phases{"phases", [inst, d, layout, levels, k, n, m, opts](const rvec &x) {
                        cvec flat = layout.get_complex(x, "p");
                        std::vector<cvec> p(k, cvec(n));
                        for (std::size_t u = 0; u < k; ++u)
                            for (std::size_t i = 0; i < n; ++i)
                                p[u][i] = flat[u * n + i];
                        rvec psi = layout.get(x, "psi");
                        if (k == 1) {
                            rvec out = x;
                            layout.set(out, "psi", single_user_phases(d, p[0], levels, psi));
                            return out;
                        }
                        // Several users: with the beams held fixed, a discrete phase jump
                        // breaks their interference suppression at high SNR, so each
                        // candidate is scored with the beams re-solved (sum capacity).
                        auto capacity = [&](const rvec &ps) {
                            return mac_sum_capacity(irs_channels(d, ps), d.sigma2, d.p_max, opts);
                        };
                        MacSolution best = capacity(psi);
                        bool moved = false;
                        for (std::size_t e = 0; e < m; ++e) {
                            const double keep = psi[e];
                            double pick = keep;
                            for (double level : levels) {
                                if (level == keep)
                                    continue;
                                psi[e] = level;
                                MacSolution c = capacity(psi);
                                if (c.sum_rate > best.sum_rate * (1.0 + 1e-12)) {
                                    best = std::move(c);
                                    pick = level;
                                }
                            }
                            psi[e] = pick;
                            moved = moved || pick != keep;
                        }
                        if (!moved)
                            return x;
                        rvec out = x;
                        layout.set(out, "psi", psi);
                        write_beams(layout, out,
                                    mac_to_bc_beams(irs_channels(d, psi), d.sigma2, best.q, decode_order_of(inst, x)));
                        return out;
                    }};
    return {beams, phases};
}

Relaxer irs_phase_relaxer(const ProblemInstance &inst, const std::vector<std::size_t> &decode_order,
                          std::shared_ptr<IrsCapacityCache> cache, const SolverOptions &opts) {
    const IrsSumRateData d = irs_data(inst);
    if (d.phase_bits == 0)
        throw std::invalid_argument("irs_phase_relaxer: needs a discrete phase codebook");
    if (!cache)
        cache = make_irs_cache();
    const SicOrder order = SicOrder::from_permutation(decode_order);
    const rvec levels = irs_phase_levels(d.phase_bits);
    const std::size_t nl = levels.size(), m = d.f.cols(), k = d.h_direct.size(), n = d.h_direct[0].size();

    // Capacity of a full phase configuration, memoized.
    auto capacity = [d, levels, cache, opts](const std::vector<int> &cfg) -> const IrsCapacityCache::Entry & {
        auto it = cache->entries.find(cfg);
        if (it != cache->entries.end())
            return it->second;
        rvec psi(cfg.size());
        for (std::size_t e = 0; e < cfg.size(); ++e)
            psi[e] = levels[static_cast<std::size_t>(cfg[e])];
        const MacSolution mac = mac_sum_capacity(irs_channels(d, psi), d.sigma2, d.p_max, opts);
        return cache->entries.emplace(cfg, IrsCapacityCache::Entry{mac.sum_rate, mac.q}).first->second;
    };

    // Column norms |f_e| |hR_ke| bound each free element's contribution.
    std::vector<rvec> reach(k, rvec(m, 0.0));
    for (std::size_t e = 0; e < m; ++e) {
        double fe = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            fe += std::norm(d.f(i, e));
        fe = std::sqrt(fe);
        for (std::size_t u = 0; u < k; ++u)
            reach[u][e] = fe * std::abs(d.h_reflect[u][e]);
    }

    Relaxer r;
    r.n_binary = m * nl;
    r.relax = [=](const std::vector<int> &fixed) {
        BnbRelaxation out;
        out.binaries.assign(m * nl, 0.0);
        std::vector<int> cfg(m, -1);
        bool leaf = true;
        for (std::size_t e = 0; e < m; ++e) {
            std::size_t ones = 0, allowed = 0;
            for (std::size_t l = 0; l < nl; ++l) {
                const int f = fixed[e * nl + l];
                if (f == 1) {
                    ++ones;
                    cfg[e] = static_cast<int>(l);
                }
                if (f != 0)
                    ++allowed;
            }
            if (ones > 1 || allowed == 0)
                return out;
            if (ones == 1) {
                out.binaries[e * nl + static_cast<std::size_t>(cfg[e])] = 1.0;
                continue;
            }
            if (allowed == 1) {
                for (std::size_t l = 0; l < nl; ++l)
                    if (fixed[e * nl + l] != 0)
                        cfg[e] = static_cast<int>(l);
                out.binaries[e * nl + static_cast<std::size_t>(cfg[e])] = 1.0;
                continue;
            }
            leaf = false;
        }
        out.feasible = true;
        if (leaf) {
            out.bound = capacity(cfg).rate;
            return out;
        }
        // Fixed part of every effective channel.
        std::vector<cvec> g = d.h_direct;
        for (std::size_t e = 0; e < m; ++e) {
            if (cfg[e] < 0)
                continue;
            const cd ph = std::polar(1.0, 2.0 * std::numbers::pi * levels[static_cast<std::size_t>(cfg[e])]);
            for (std::size_t u = 0; u < k; ++u)
                for (std::size_t i = 0; i < n; ++i)
                    g[u][i] += d.f(i, e) * ph * d.h_reflect[u][e];
        }
        // Free elements: the level adding the most received energy on its own
        // gets 0.6 so rounding yields a complete configuration.
        for (std::size_t e = 0; e < m; ++e) {
            if (cfg[e] >= 0)
                continue;
            std::size_t allowed = 0, pref = nl;
            double best = -kInf;
            for (std::size_t l = 0; l < nl; ++l) {
                if (fixed[e * nl + l] == 0)
                    continue;
                ++allowed;
                const cd ph = std::polar(1.0, 2.0 * std::numbers::pi * levels[l]);
                double energy = 0.0;
                for (std::size_t u = 0; u < k; ++u) {
                    double eu = 0.0;
                    for (std::size_t i = 0; i < n; ++i)
                        eu += std::norm(g[u][i] + d.f(i, e) * ph * d.h_reflect[u][e]);
                    energy += eu / d.sigma2[u];
                }
                if (energy > best) {
                    best = energy;
                    pref = l;
                }
            }
            for (std::size_t l = 0; l < nl; ++l)
                if (fixed[e * nl + l] != 0)
                    out.binaries[e * nl + l] = l == pref ? 0.6 : 0.4 / static_cast<double>(allowed - 1);
        }
        rvec a(k);
        for (std::size_t u = 0; u < k; ++u) {
            double slack = 0.0;
            for (std::size_t e = 0; e < m; ++e)
                if (cfg[e] < 0)
                    slack += reach[u][e];
            a[u] = (norm(g[u]) + slack) / std::sqrt(d.sigma2[u]);
        }
        out.bound = mac_norm_bound(a, d.p_max);
        return out;
    };
    r.complete = [=](const std::vector<int> &assignment) -> std::optional<std::pair<double, rvec>> {
        std::vector<int> cfg(m, -1);
        for (std::size_t e = 0; e < m; ++e)
            for (std::size_t l = 0; l < nl; ++l)
                if (assignment[e * nl + l] == 1) {
                    if (cfg[e] >= 0)
                        return std::nullopt;
                    cfg[e] = static_cast<int>(l);
                }
        rvec psi(m);
        for (std::size_t e = 0; e < m; ++e) {
            if (cfg[e] < 0)
                return std::nullopt;
            psi[e] = levels[static_cast<std::size_t>(cfg[e])];
        }
        const auto &entry = capacity(cfg);
        rvec x = inst.layout.zeros();
        inst.layout.set(x, "psi", psi);
        set_alpha(inst, x, order);
        write_beams(inst.layout, x, mac_to_bc_beams(irs_channels(d, psi), d.sigma2, entry.q, decode_order));
        return std::make_pair(evaluate_objective(inst, x), x);
    };
    return r;
}

} // namespace ngma
