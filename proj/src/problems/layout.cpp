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

#include "ngma/problems.hpp"

#include <string>

namespace ngma {

void Layout::add(std::string name, std::size_t count, bool is_complex, bool binary, double lo, double hi) {
    VarBlock b;
    b.name = std::move(name);
    b.offset = size_;
    b.count = count;
    b.is_complex = is_complex;
    b.binary = binary;
    b.lower.assign(b.width(), lo);
    b.upper.assign(b.width(), hi);
    size_ += b.width();
    blocks_.push_back(std::move(b));
}

void Layout::add(std::string name, rvec lower, rvec upper) {
    if (lower.size() != upper.size())
        throw std::invalid_argument("Layout: bound vectors differ in length");
    VarBlock b;
    b.name = std::move(name);
    b.offset = size_;
    b.count = lower.size();
    b.lower = std::move(lower);
    b.upper = std::move(upper);
    size_ += b.width();
    blocks_.push_back(std::move(b));
}

bool Layout::has(std::string_view name) const {
    for (const auto &b : blocks_)
        if (b.name == name)
            return true;
    return false;
}

const VarBlock &Layout::block(std::string_view name) const {
    for (const auto &b : blocks_)
        if (b.name == name)
            return b;
    throw std::out_of_range("Layout: no block named " + std::string(name));
}

rvec Layout::get(const rvec &x, std::string_view name) const {
    if (x.size() != size_)
        throw std::invalid_argument("Layout: x has " + std::to_string(x.size()) + " entries, expected " +
                                    std::to_string(size_));
    const VarBlock &b = block(name);
    return rvec(x.begin() + static_cast<std::ptrdiff_t>(b.offset),
                x.begin() + static_cast<std::ptrdiff_t>(b.offset + b.width()));
}

cvec Layout::get_complex(const rvec &x, std::string_view name) const {
    const VarBlock &b = block(name);
    if (!b.is_complex)
        throw std::invalid_argument("Layout: block " + b.name + " is real");
    const rvec r = get(x, name);
    cvec out(b.count);
    for (std::size_t i = 0; i < b.count; ++i)
        out[i] = cd(r[2 * i], r[2 * i + 1]);
    return out;
}

void Layout::set(rvec &x, std::string_view name, const rvec &v) const {
    const VarBlock &b = block(name);
    if (x.size() != size_ || v.size() != b.width())
        throw std::invalid_argument("Layout: size mismatch writing block " + b.name);
    for (std::size_t i = 0; i < v.size(); ++i)
        x[b.offset + i] = v[i];
}

void Layout::set_complex(rvec &x, std::string_view name, const cvec &v) const {
    const VarBlock &b = block(name);
    if (!b.is_complex || v.size() != b.count)
        throw std::invalid_argument("Layout: size mismatch writing block " + b.name);
    rvec r(2 * v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        r[2 * i] = v[i].real();
        r[2 * i + 1] = v[i].imag();
    }
    set(x, name, r);
}

std::string_view status_name(SolveStatus s) {
    switch (s) {
    case SolveStatus::Optimal:
        return "optimal";
    case SolveStatus::Feasible:
        return "feasible";
    case SolveStatus::Infeasible:
        return "infeasible";
    case SolveStatus::IterationLimit:
        return "iteration-limit";
    }
    return "unknown";
}

} // namespace ngma
