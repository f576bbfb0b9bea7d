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

#include "ngma/bench.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ngma {

// line is 0 for errors that concern the config as a whole.
class ConfigError : public std::runtime_error {
  public:
    ConfigError(std::size_t line, std::string key, const std::string &what);
    std::size_t line() const { return line_; }
    const std::string &key() const { return key_; }

  private:
    std::size_t line_;
    std::string key_;
};

// Line-based `key = value`; '#' starts a comment. Omitted keys keep the value
// from base, fig10-full when none is given. The result is validated.
ScenarioConfig parse_config(std::string_view text, const ScenarioConfig &base);
ScenarioConfig parse_config(std::string_view text);
std::string serialize_config(const ScenarioConfig &cfg);

// The K=2, M=3 OfdmaPowerMin instance behind `oracle --preset ofdma-k2m3`.
OfdmaPowerMinData ofdma_oracle_fixture();
inline constexpr std::string_view kOfdmaOraclePreset = "ofdma-k2m3";

struct CliInvocation {
    std::string command; // run-sweep | solve | oracle | list-presets
    std::optional<std::string> config_path;
    std::optional<std::string> out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> preset;
    std::optional<std::string> schemes; // comma separated
    std::optional<unsigned> jobs;
    bool record_runtime = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitConfig = 2;

int dispatch(const CliInvocation &inv, std::ostream &out, std::ostream &err);

} // namespace ngma
