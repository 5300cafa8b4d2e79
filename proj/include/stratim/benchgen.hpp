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

#ifndef STRATIM_BENCHGEN_HPP
#define STRATIM_BENCHGEN_HPP

#include <cmath>
#include <map>
#include <tuple>

#include "stratim/strategy.hpp"

namespace stratim {

struct GeneratedInstance {
    Model model;
    ReachabilityGoal goal;
};

// ---------------------------------------------------------------------------
// Random models: a single agent against a nondeterministic environment.

enum class ClassSizeMode { Logarithmic, Linear };

inline const char* to_string(ClassSizeMode m) { return m == ClassSizeMode::Logarithmic ? "logarithmic" : "linear"; }

struct RandomModelSpec {
    int n_states = 10;
    ClassSizeMode class_size_mode = ClassSizeMode::Logarithmic;
    std::uint64_t seed = 0;
    // 0 = derive from n_states: connections ~ 2n, actions max(2, ceil(log2 n)),
    // winning max(1, ceil(n/20)), class bound from the mode.
    int connections = 0;
    int actions = 0;
    int winning = 0;
    int repetitions = 3;
    int class_bound = 0;

    int derived_connections() const { return connections > 0 ? connections : 2 * n_states; }
    int derived_actions() const {
        return actions > 0 ? actions : std::max(2, static_cast<int>(std::ceil(std::log2(n_states))));
    }
    int derived_winning() const { return winning > 0 ? winning : std::max(1, (n_states + 19) / 20); }
    int derived_class_bound() const {
        if (class_bound > 0) return class_bound;
        if (class_size_mode == ClassSizeMode::Logarithmic)
            return std::max(1, static_cast<int>(std::ceil(std::log2(n_states))));
        return std::max(1, static_cast<int>(std::ceil(0.1 * n_states)));
    }
};

/**
 * Random iCGS generator. Layout: a set of random paths covering the state
 * space (state 0 starts the first one), extra cross connections between
 * distinct paths, winning states drawn from the path finals. Transitions
 * label each connection repeatedly with random agent actions; connections
 * sharing an action at a state become environment choice. Epistemic classes
 * are random chunks within the size bound; protocols are harmonized across
 * each class (missing actions get extra transitions along existing
 * connections) so uniformity holds structurally. Winning states absorb.
 *
 * Agent 0 plays; agent 1 is the environment with perfect information.
 * Deterministic per seed, byte-identical JSON included.
 */
inline GeneratedInstance gen_random(const RandomModelSpec& spec) {
    if (spec.n_states < 2) throw std::invalid_argument("gen_random: need at least 2 states");
    const int n = spec.n_states;
    const int n_actions = spec.derived_actions();
    const int bound = spec.derived_class_bound();
    if (bound < 1) throw std::invalid_argument("gen_random: class bound below 1");
    const int n_winning = std::min(spec.derived_winning(), std::max(1, n / 2));
    Rng rng(spec.seed);

    // Two paths per winning state: half the path finals stay non-winning
    // and absorb, which is where unrealizable instances come from.
    const int n_paths = std::min(n, std::max(1, 2 * n_winning));
    std::vector<StateId> perm(static_cast<std::size_t>(n));
    for (StateId q = 0; q < n; ++q) perm[static_cast<std::size_t>(q)] = q;
    rng.shuffle(perm);
    for (std::size_t i = 0; i < perm.size(); ++i)
        if (perm[i] == 0) {
            std::swap(perm[0], perm[i]);
            break;
        }

    std::vector<int> path_of(static_cast<std::size_t>(n));
    std::vector<StateId> finals;
    std::vector<std::vector<StateId>> edges(static_cast<std::size_t>(n));  // insertion order kept
    {
        std::size_t at = 0;
        for (int p = 0; p < n_paths; ++p) {
            std::size_t len = static_cast<std::size_t>(n / n_paths) + (p < n % n_paths ? 1u : 0u);
            for (std::size_t i = 0; i < len; ++i) {
                path_of[at + i] = p;
                if (i + 1 < len) edges[static_cast<std::size_t>(perm[at + i])].push_back(perm[at + i + 1]);
            }
            finals.push_back(perm[at + len - 1]);
            at += len;
        }
        // path_of was indexed by permutation position; rebase to states
        std::vector<int> by_state(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < perm.size(); ++i) by_state[static_cast<std::size_t>(perm[i])] = path_of[i];
        path_of = std::move(by_state);
    }

    StateSet winning;
    {
        std::vector<StateId> pool = finals;
        rng.shuffle(pool);
        winning.assign(pool.begin(), pool.begin() + n_winning);
        std::sort(winning.begin(), winning.end());
    }

    // Cross connections between distinct paths (arbitrary pairs when there
    // is only one path). Mostly forward in the path layout, so that
    // multi-target transitions still make progress and plays fan out over
    // the graph instead of short-circuiting it. No duplicates; winning
    // states stay edge-free.
    std::vector<int> layout_pos(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < perm.size(); ++i) layout_pos[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
    {
        int have = 0;
        for (const auto& e : edges) have += static_cast<int>(e.size());
        int want = std::max(0, spec.derived_connections() - have);
        int attempts = 20 * want + 100;
        const int window = std::max(3, n / (4 * n_paths));  // short hops keep forced distances long
        while (want > 0 && attempts-- > 0) {
            StateId u = rng.below(n), v = rng.below(n);
            if (u == v || set_contains(winning, u)) continue;
            if (n_paths > 1 && path_of[static_cast<std::size_t>(u)] == path_of[static_cast<std::size_t>(v)]) continue;
            int delta = layout_pos[static_cast<std::size_t>(v)] - layout_pos[static_cast<std::size_t>(u)];
            if (delta < 1 || delta > window) continue;
            if (std::find(edges[static_cast<std::size_t>(u)].begin(), edges[static_cast<std::size_t>(u)].end(), v) !=
                edges[static_cast<std::size_t>(u)].end())
                continue;
            edges[static_cast<std::size_t>(u)].push_back(v);
            --want;
        }
    }

    // Label connections with agent actions, several rounds; targets sharing
    // an action become environment alternatives.
    std::vector<std::vector<StateSet>> alt(static_cast<std::size_t>(n),
                                           std::vector<StateSet>(static_cast<std::size_t>(n_actions)));
    for (StateId q = 0; q < n; ++q) {
        if (set_contains(winning, q)) {
            alt[static_cast<std::size_t>(q)][0] = {q};  // absorbing baseline, class harmonization adds the rest
            continue;
        }
        auto& out = edges[static_cast<std::size_t>(q)];
        if (out.empty()) out.push_back(q);  // dead-end path final that lost the winning draw
        for (int r = 0; r < std::max(1, spec.repetitions); ++r) {
            // One action per round-subset: connections sharing the round's
            // action become environment alternatives, which is where the
            // nondeterminism comes from.
            auto& bucket = alt[static_cast<std::size_t>(q)][static_cast<std::size_t>(rng.below(n_actions))];
            bool any = false;
            for (StateId to : out)
                if (rng.chance(0.8)) {
                    set_insert(bucket, to);
                    any = true;
                }
            if (!any) set_insert(bucket, rng.pick(out));
        }
        // every connection must be carried by at least one transition
        for (StateId to : out) {
            bool covered = false;
            for (const auto& s : alt[static_cast<std::size_t>(q)])
                if (set_contains(s, to)) covered = true;
            if (!covered)
                set_insert(alt[static_cast<std::size_t>(q)][static_cast<std::size_t>(rng.below(n_actions))], to);
        }
    }

    // Random epistemic chunks within the bound, cut along the path layout so
    // a class tends to group graph-nearby states, then protocol
    // harmonization: every class member supports the class-wide action set.
    std::vector<StateSet> cells;
    {
        std::size_t at = 0;
        while (at < perm.size()) {
            std::size_t len = static_cast<std::size_t>(1 + rng.below(bound));
            len = std::min(len, perm.size() - at);
            cells.emplace_back(perm.begin() + static_cast<long>(at), perm.begin() + static_cast<long>(at + len));
            at += len;
        }
    }
    for (const auto& cell : cells) {
        std::vector<char> class_acts(static_cast<std::size_t>(n_actions), 0);
        for (StateId q : cell)
            for (int a = 0; a < n_actions; ++a)
                if (!alt[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)].empty())
                    class_acts[static_cast<std::size_t>(a)] = 1;
        for (StateId q : cell) {
            std::vector<int> native;
            for (int a = 0; a < n_actions; ++a)
                if (!alt[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)].empty()) native.push_back(a);
            for (int a = 0; a < n_actions; ++a) {
                auto& s = alt[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
                if (!class_acts[static_cast<std::size_t>(a)] || !s.empty()) continue;
                // Alias a native action rather than inventing new successors;
                // harmonization must not change what the state can do.
                if (set_contains(winning, q)) s = {q};
                else s = alt[static_cast<std::size_t>(q)][static_cast<std::size_t>(rng.pick(native))];
            }
        }
    }

    // Assemble the model: agent 0 = protagonist, agent 1 = environment whose
    // action picks among the alternatives of the chosen agent action.
    Model m;
    m.init(2, n);
    int env_max = 1;
    for (StateId q = 0; q < n; ++q) {
        auto& proto = m.protocol[0][static_cast<std::size_t>(q)];
        int width = 1;
        for (int a = 0; a < n_actions; ++a) {
            const auto& s = alt[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
            if (s.empty()) continue;
            proto.push_back(a);
            width = std::max(width, static_cast<int>(s.size()));
        }
        auto& env = m.protocol[1][static_cast<std::size_t>(q)];
        for (int e = 0; e < width; ++e) env.push_back(e);
        env_max = std::max(env_max, width);
        m.joint_succ[static_cast<std::size_t>(q)].reserve(proto.size() * static_cast<std::size_t>(width));
        for (ActionId a : proto) {
            const auto& s = alt[static_cast<std::size_t>(q)][static_cast<std::size_t>(a)];
            for (int e = 0; e < width; ++e)
                m.joint_succ[static_cast<std::size_t>(q)].push_back(s[static_cast<std::size_t>(e) % s.size()]);
        }
    }
    m.num_actions = std::max(n_actions, env_max);
    m.propositions = {"win"};
    m.valuation = {winning};
    m.set_classes(0, cells);
    m.set_identity_classes(1);

    return {std::move(m), ReachabilityGoal{{0}, "win", 0}};
}

// ---------------------------------------------------------------------------
// Drone air-quality models

struct DroneModelSpec {
    int n_drones = 1;
    int initial_energy = -1;  // -1 = 2 * map_size
    int map_size = 5;
    std::uint64_t seed = 0;
    double confusion = 0.2;  // fraction of places with a GPS-confusable twin
    int extra_edges = -1;    // -1 = map_size / 2

    int derived_energy() const { return initial_energy >= 0 ? initial_energy : 2 * map_size; }
};

namespace detail {

// Map actions: 0 = wait, 1..4 = fly N/E/S/W.
constexpr ActionId kWait = 0;
constexpr int kDirections = 4;

struct DroneMap {
    int places = 0;
    // neighbor[p][dir] = target place or -1
    std::vector<std::array<int, 4>> neighbor;
    // wind diversion per (place, dir); equals the intended target when the
    // place has a single out-neighbor
    std::vector<std::array<int, 4>> divert;
    std::vector<int> gps_partner;  // partner place or -1
    std::vector<char> polluted;

    std::vector<int> out_dirs(int p) const {
        std::vector<int> d;
        for (int dir = 0; dir < kDirections; ++dir)
            if (neighbor[static_cast<std::size_t>(p)][static_cast<std::size_t>(dir)] >= 0) d.push_back(dir);
        return d;
    }
};

inline DroneMap gen_drone_map(const DroneModelSpec& spec, Rng& rng) {
    const int m = spec.map_size;
    DroneMap map;
    map.places = m;
    map.neighbor.assign(static_cast<std::size_t>(m), {-1, -1, -1, -1});
    map.divert.assign(static_cast<std::size_t>(m), {-1, -1, -1, -1});
    map.gps_partner.assign(static_cast<std::size_t>(m), -1);
    map.polluted.assign(static_cast<std::size_t>(m), 0);

    auto free_dirs = [&](int p) {
        std::vector<int> d;
        for (int dir = 0; dir < kDirections; ++dir)
            if (map.neighbor[static_cast<std::size_t>(p)][static_cast<std::size_t>(dir)] < 0) d.push_back(dir);
        return d;
    };

    // Spanning arborescence from place 0 keeps every place reachable.
    for (int p = 1; p < m; ++p) {
        std::vector<int> hosts;
        for (int u = 0; u < p; ++u)
            if (!free_dirs(u).empty()) hosts.push_back(u);
        if (hosts.empty()) throw std::invalid_argument("gen_drone: map too large for degree-4 tree");
        int u = rng.pick(hosts);
        int dir = rng.pick(free_dirs(u));
        map.neighbor[static_cast<std::size_t>(u)][static_cast<std::size_t>(dir)] = p;
    }
    int extra = spec.extra_edges >= 0 ? spec.extra_edges : 3 * m;
    int attempts = 10 * extra + 20;
    while (extra > 0 && attempts-- > 0) {
        int u = rng.below(m);
        auto fd = free_dirs(u);
        if (fd.empty()) continue;
        int v = rng.below(m);
        if (v == u) continue;
        map.neighbor[static_cast<std::size_t>(u)][static_cast<std::size_t>(rng.pick(fd))] = v;
        --extra;
    }

    // GPS-confusable pairs must share the same out-direction set, otherwise
    // protocols could differ inside a class. Harmonize one pair if the map
    // offers none.
    auto dir_key = [&](int p) {
        int key = 0;
        for (int dir : map.out_dirs(p)) key |= 1 << dir;
        return key;
    };
    int want_pairs = std::max(1, static_cast<int>(spec.confusion * m + 0.5) / 2);
    if (spec.confusion <= 0.0) want_pairs = 0;
    std::vector<std::pair<int, int>> candidates;
    for (int p = 0; p < m; ++p)
        for (int q = p + 1; q < m; ++q)
            if (dir_key(p) == dir_key(q)) candidates.push_back({p, q});
    if (candidates.empty() && want_pairs > 0 && m >= 3) {
        // add edges to the poorer of two random places until dir sets match
        int p = 1 + rng.below(m - 1), q = 1 + rng.below(m - 1);
        while (q == p) q = 1 + rng.below(m - 1);
        for (int dir = 0; dir < kDirections; ++dir) {
            auto& np = map.neighbor[static_cast<std::size_t>(p)][static_cast<std::size_t>(dir)];
            auto& nq = map.neighbor[static_cast<std::size_t>(q)][static_cast<std::size_t>(dir)];
            if (np >= 0 && nq < 0) {
                int v = rng.below(m);
                while (v == q) v = rng.below(m);
                nq = v;
            } else if (nq >= 0 && np < 0) {
                int v = rng.below(m);
                while (v == p) v = rng.below(m);
                np = v;
            }
        }
        candidates.push_back({std::min(p, q), std::max(p, q)});
    }
    rng.shuffle(candidates);
    for (const auto& [p, q] : candidates) {
        if (want_pairs == 0) break;
        if (map.gps_partner[static_cast<std::size_t>(p)] >= 0 || map.gps_partner[static_cast<std::size_t>(q)] >= 0)
            continue;
        map.gps_partner[static_cast<std::size_t>(p)] = q;
        map.gps_partner[static_cast<std::size_t>(q)] = p;
        --want_pairs;
    }

    // Wind: one diversion alternative per fly edge, drawn from the source's
    // out-neighbors.
    for (int p = 0; p < m; ++p) {
        auto dirs = map.out_dirs(p);
        for (int dir : dirs) {
            // Half the fly edges are sheltered from the wind; an all-windy map
            // rarely admits a forceable tour within the energy budget.
            if (rng.chance(0.5)) {
                map.divert[static_cast<std::size_t>(p)][static_cast<std::size_t>(dir)] =
                    map.neighbor[static_cast<std::size_t>(p)][static_cast<std::size_t>(dir)];
                continue;
            }
            std::vector<int> alts;
            for (int d2 : dirs) alts.push_back(map.neighbor[static_cast<std::size_t>(p)][static_cast<std::size_t>(d2)]);
            map.divert[static_cast<std::size_t>(p)][static_cast<std::size_t>(dir)] = rng.pick(alts);
        }
    }

    for (int p = 0; p < m; ++p) map.polluted[static_cast<std::size_t>(p)] = rng.chance(0.5) ? 1 : 0;
    return map;
}

struct DroneState {
    std::vector<int> pos;
    int energy = 0;        // shared: drones act in lockstep from a common level
    unsigned visited = 0;  // shared bitmask over places

    auto operator<=>(const DroneState&) const = default;
};

}  // namespace detail

/**
 * Drone benchmark generator. Global states are (per-drone positions, common
 * energy level, shared visited set); the last agent is the environment
 * playing wind (one gust bit per drone). Every action costs one energy unit;
 * at zero energy a drone can only wait. The goal is the shared visited set
 * covering the whole map ("all_visited"); pollution readings decorate states
 * via the "polluted" proposition. GPS faults pair up places with identical
 * out-direction sets; a drone cannot tell its own position apart within a
 * pair. Deterministic per seed.
 */
inline GeneratedInstance gen_drone(const DroneModelSpec& spec) {
    if (spec.map_size < 2) throw std::invalid_argument("gen_drone: map_size must be at least 2");
    if (spec.n_drones < 1) throw std::invalid_argument("gen_drone: need at least one drone");
    const int d = spec.n_drones;
    const int energy0 = spec.derived_energy();
    Rng rng(spec.seed);
    detail::DroneMap map = detail::gen_drone_map(spec, rng);
    const unsigned full = (1u << map.places) - 1;

    using detail::DroneState;
    std::map<DroneState, StateId> ids;
    std::vector<DroneState> states;
    auto intern = [&](const DroneState& s) {
        auto [it, fresh] = ids.try_emplace(s, static_cast<StateId>(states.size()));
        if (fresh) states.push_back(s);
        return it->second;
    };

    DroneState init;
    init.pos.assign(static_cast<std::size_t>(d), 0);
    init.energy = energy0;
    init.visited = 1u;  // place 0
    intern(init);

    auto drone_actions = [&](const DroneState& s, int i) {
        std::vector<ActionId> acts{detail::kWait};
        if (s.energy > 0)
            for (int dir : map.out_dirs(s.pos[static_cast<std::size_t>(i)])) acts.push_back(1 + dir);
        return acts;
    };

    // BFS expansion; transition rows are built on the fly in protocol
    // enumeration order, so joint indices line up with the Model layout.
    std::vector<std::vector<StateId>> succ_rows;
    for (StateId q = 0; q < static_cast<StateId>(states.size()); ++q) {
        DroneState s = states[static_cast<std::size_t>(q)];
        std::vector<std::vector<ActionId>> acts(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) acts[static_cast<std::size_t>(i)] = drone_actions(s, i);
        const int gusts = 1 << d;

        std::vector<StateId> row;
        std::vector<std::size_t> pos(static_cast<std::size_t>(d), 0);
        for (;;) {
            for (int g = 0; g < gusts; ++g) {
                DroneState t = s;
                if (t.energy > 0) t.energy = s.energy - 1;
                for (int i = 0; i < d; ++i) {
                    ActionId act = acts[static_cast<std::size_t>(i)][pos[static_cast<std::size_t>(i)]];
                    if (act != detail::kWait) {
                        int p = s.pos[static_cast<std::size_t>(i)];
                        int dir = act - 1;
                        int to = (g >> i) & 1 ? map.divert[static_cast<std::size_t>(p)][static_cast<std::size_t>(dir)]
                                              : map.neighbor[static_cast<std::size_t>(p)][static_cast<std::size_t>(dir)];
                        t.pos[static_cast<std::size_t>(i)] = to;
                    }
                    t.visited |= 1u << t.pos[static_cast<std::size_t>(i)];
                }
                row.push_back(intern(t));
            }
            int i = d;
            for (;;) {
                if (i == 0) {
                    i = -1;
                    break;
                }
                --i;
                if (++pos[static_cast<std::size_t>(i)] < acts[static_cast<std::size_t>(i)].size()) break;
                pos[static_cast<std::size_t>(i)] = 0;
            }
            if (i < 0) break;
        }
        succ_rows.push_back(std::move(row));
    }

    const int n = static_cast<int>(states.size());
    Model m;
    m.init(d + 1, n);
    m.num_actions = std::max(1 + detail::kDirections, 1 << d);
    for (StateId q = 0; q < n; ++q) {
        const DroneState& s = states[static_cast<std::size_t>(q)];
        for (int i = 0; i < d; ++i) m.protocol[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)] = drone_actions(s, i);
        auto& env = m.protocol[static_cast<std::size_t>(d)][static_cast<std::size_t>(q)];
        for (int g = 0; g < (1 << d); ++g) env.push_back(g);
        m.joint_succ[static_cast<std::size_t>(q)] = std::move(succ_rows[static_cast<std::size_t>(q)]);
    }

    m.propositions = {"all_visited", "polluted"};
    StateSet all_visited, polluted;
    for (StateId q = 0; q < n; ++q) {
        const DroneState& s = states[static_cast<std::size_t>(q)];
        if (s.visited == full) all_visited.push_back(q);
        for (int i = 0; i < d; ++i)
            if (map.polluted[static_cast<std::size_t>(s.pos[static_cast<std::size_t>(i)])]) {
                polluted.push_back(q);
                break;
            }
    }
    m.valuation = {all_visited, polluted};

    // Epistemic classes per drone: states identical up to the drone's own
    // position within its GPS pair.
    for (int i = 0; i < d; ++i) {
        std::map<DroneState, StateSet> groups;
        for (StateId q = 0; q < n; ++q) {
            DroneState key = states[static_cast<std::size_t>(q)];
            int p = key.pos[static_cast<std::size_t>(i)];
            int partner = map.gps_partner[static_cast<std::size_t>(p)];
            if (partner >= 0) key.pos[static_cast<std::size_t>(i)] = std::min(p, partner);
            groups[key].push_back(q);
        }
        std::vector<StateSet> cells;
        for (auto& [_, members] : groups) cells.push_back(std::move(members));
        m.set_classes(i, std::move(cells));
    }
    m.set_identity_classes(d);

    ReachabilityGoal goal;
    for (int i = 0; i < d; ++i) goal.coalition.push_back(i);
    goal.target = "all_visited";
    goal.initial_state = 0;
    return {std::move(m), goal};
}

}  // namespace stratim

#endif
