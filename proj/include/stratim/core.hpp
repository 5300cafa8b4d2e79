/*
 * Copyright 2026 The stratim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef STRATIM_CORE_HPP
#define STRATIM_CORE_HPP

#include <algorithm>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace stratim {

// Dense integer identifiers. Agents are 0..k-1, states 0..n-1, actions
// index a global action table.
using AgentId = int;
using StateId = int;
using ActionId = int;

// A set of states kept as a sorted vector without duplicates. All set
// algebra below assumes (and preserves) that representation.
using StateSet = std::vector<StateId>;

// Unordered state pair stored with first < second.
using StatePair = std::pair<StateId, StateId>;
using PairSet = std::vector<StatePair>;

inline bool set_contains(const StateSet& s, StateId q) {
    return std::binary_search(s.begin(), s.end(), q);
}

inline void set_insert(StateSet& s, StateId q) {
    auto it = std::lower_bound(s.begin(), s.end(), q);
    if (it == s.end() || *it != q) s.insert(it, q);
}

inline StateSet set_union(const StateSet& a, const StateSet& b) {
    StateSet r;
    r.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

inline StateSet set_intersect(const StateSet& a, const StateSet& b) {
    StateSet r;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

inline StateSet set_minus(const StateSet& a, const StateSet& b) {
    StateSet r;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(r));
    return r;
}

template <typename T>
inline bool is_subset(const std::vector<T>& a, const std::vector<T>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

template <typename T>
inline bool is_strict_subset(const std::vector<T>& a, const std::vector<T>& b) {
    return a.size() < b.size() && is_subset(a, b);
}

inline StatePair make_pair_sorted(StateId a, StateId b) {
    return a < b ? StatePair{a, b} : StatePair{b, a};
}

/**
 * Seeded random source. Draws go through our own bounded-int reduction and
 * Fisher-Yates shuffle rather than std distributions, so a given seed yields
 * the same stream on every standard library. Benchmark generators promise
 * byte-identical output per seed; this keeps that promise portable.
 */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next() { return gen_(); }

    // Uniform draw from [0, n). Modulo bias is negligible for the small
    // ranges used by the generators.
    int below(int n) { return n <= 1 ? 0 : static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

    bool chance(double p) {
        return (static_cast<double>(next() >> 11) * 0x1.0p-53) < p;
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (int i = static_cast<int>(v.size()) - 1; i > 0; --i)
            std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(below(i + 1))]);
    }

    template <typename T>
    const T& pick(const std::vector<T>& v) { return v[static_cast<std::size_t>(below(static_cast<int>(v.size())))]; }

private:
    std::mt19937_64 gen_;
};

}  // namespace stratim

#endif
