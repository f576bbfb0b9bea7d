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

#include <CLI11.hpp>

#include <cstdlib>
#include <cstring>
#include <iostream>

int main(int argc, char **argv) {
    CLI::App app{"ngma: resource allocation solvers and IRS sum-rate sweeps"};
    app.require_subcommand(1);
    app.fallthrough();

    ngma::CliInvocation inv;
    std::string config, out, preset, schemes;
    std::uint64_t seed = 0;
    unsigned jobs = 0;
    auto *o_config = app.add_option("--config", config, "key = value scenario file");
    auto *o_out = app.add_option("--out", out, "output file (default: stdout)");
    auto *o_seed = app.add_option("--seed", seed, "overrides the config seed");
    auto *o_preset = app.add_option("--preset", preset, "named scenario, or ofdma-k2m3 for solve/oracle");
    auto *o_scheme = app.add_option("--scheme", schemes, "comma-separated scheme filter");
    auto *o_jobs = app.add_option("--jobs", jobs, "worker threads (default: all cores)");

    app.add_subcommand("run-sweep", "Monte-Carlo sweep, CSV output");
    app.add_subcommand("solve", "every scheme on trial 0, key = value output");
    app.add_subcommand("oracle", "exhaustive reference value");
    app.add_subcommand("list-presets", "names of the built-in scenarios");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return ngma::kExitConfig;
    }

    inv.command = app.get_subcommands().front()->get_name();
    if (*o_config)
        inv.config_path = config;
    if (*o_out)
        inv.out_path = out;
    if (*o_seed)
        inv.seed = seed;
    if (*o_preset)
        inv.preset = preset;
    if (*o_scheme)
        inv.schemes = schemes;
    if (*o_jobs)
        inv.jobs = jobs;
    const char *rt = std::getenv("NGMA_RECORD_RUNTIME");
    inv.record_runtime = rt != nullptr && std::strcmp(rt, "1") == 0;
    return ngma::dispatch(inv, std::cout, std::cerr);
}
