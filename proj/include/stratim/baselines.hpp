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

#ifndef STRATIM_BASELINES_HPP
#define STRATIM_BASELINES_HPP

#include <chrono>
#include <cmath>

#include "stratim/synthesis.hpp"

namespace stratim {

enum class BaselineMethod { Brute, LowerApprox, UpperApprox };
enum class BaselineAnswer { True, False, Inconclusive };

inline const char* to_string(BaselineAnswer a) {
    switch (a) {
        case BaselineAnswer::True: return "true";
        case BaselineAnswer::False: return "false";
        default: return "inconclusive";
    }
}

struct BaselineVerdict {
    BaselineMethod method = BaselineMethod::Brute;
    BaselineAnswer answer = BaselineAnswer::Inconclusive;
    std::optional<StrategyProfile> witness;
    std::chrono::milliseconds elapsed{0};
    bool timed_out = false;
};

namespace detail {

// Enumeration slots for the uniform-strategy search: one per (agent, class)
// with the class reachable in the full transition graph from the entry
// closure. Classes no play can ever visit are pinned to the first action.
struct UniformSlots {
    struct Slot {
        AgentId agent;
        int cell;  // index into m.classes[agent]
        const std::vector<ActionId>* actions;
    };
    std::vector<Slot> slots;
};

inline StateSet full_graph_reach(const Model& m, const StateSet& from) {
    std::vector<char> mark(static_cast<std::size_t>(m.num_states), 0);
    std::vector<StateId> work;
    for (StateId q : from) {
        mark[static_cast<std::size_t>(q)] = 1;
        work.push_back(q);
    }
    while (!work.empty()) {
        StateId q = work.back();
        work.pop_back();
        for (StateId to : m.joint_succ[static_cast<std::size_t>(q)])
            if (!mark[static_cast<std::size_t>(to)]) {
                mark[static_cast<std::size_t>(to)] = 1;
                work.push_back(to);
            }
    }
    StateSet out;
    for (StateId q = 0; q < m.num_states; ++q)
        if (mark[static_cast<std::size_t>(q)]) out.push_back(q);
    return out;
}

// DFS discovery order over the full transition graph: initial state first,
// remaining entry-closure states next, ascending joint-action expansion.
inline std::vector<StateId> full_dfs_order(const Model& m, StateId initial, const StateSet& q0) {
    std::vector<char> seen(static_cast<std::size_t>(m.num_states), 0);
    std::vector<StateId> order;
    auto visit = [&](StateId root) {
        if (seen[static_cast<std::size_t>(root)]) return;
        std::vector<std::pair<StateId, std::size_t>> stack;
        seen[static_cast<std::size_t>(root)] = 1;
        order.push_back(root);
        stack.push_back({root, 0});
        while (!stack.empty()) {
            auto& [q, next] = stack.back();
            const auto& succ = m.joint_succ[static_cast<std::size_t>(q)];
            if (next == succ.size()) {
                stack.pop_back();
                continue;
            }
            StateId to = succ[next++];
            if (!seen[static_cast<std::size_t>(to)]) {
                seen[static_cast<std::size_t>(to)] = 1;
                order.push_back(to);
                stack.push_back({to, 0});
            }
        }
    };
    visit(initial);
    for (StateId q : q0) visit(q);
    return order;
}

inline UniformSlots uniform_slots(const Model& m, const ReachabilityGoal& goal) {
    StateSet q0 = initial_class_union(m, goal.coalition, goal.initial_state);
    StateSet reachable = full_graph_reach(m, q0);
    std::vector<StateId> order = full_dfs_order(m, goal.initial_state, q0);

    UniformSlots out;
    for (AgentId a : goal.coalition) {
        std::vector<char> listed(m.classes[static_cast<std::size_t>(a)].size(), 0);
        for (StateId q : order) {
            if (!set_contains(reachable, q)) continue;
            int cell = m.class_index[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
            if (listed[static_cast<std::size_t>(cell)]) continue;
            listed[static_cast<std::size_t>(cell)] = 1;
            const StateSet& members = m.classes[static_cast<std::size_t>(a)][static_cast<std::size_t>(cell)];
            out.slots.push_back({a, cell, &m.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(members[0])]});
        }
    }
    return out;
}

}  // namespace detail

// log2 of the number of uniform profiles brute force would enumerate;
// callers use this to judge feasibility before spending a deadline on it.
inline double uniform_search_bits(const Model& m, const ReachabilityGoal& goal) {
    auto slots = detail::uniform_slots(m, goal);
    double bits = 0;
    for (const auto& s : slots.slots) bits += std::log2(static_cast<double>(s.actions->size()));
    return bits;
}

/**
 * Exact decision procedure for the reachability goal under uniform
 * memoryless strategies: enumerate one action per (coalition member,
 * reachable class), first verified winner wins. Deterministic; the witness
 * is the enumeration-first one. Deadline expiry yields Inconclusive with
 * timed_out set. Intended for small models — check uniform_search_bits
 * before calling.
 */
inline BaselineVerdict brute_force_uniform(const Model& m, const ReachabilityGoal& goal,
                                           std::chrono::milliseconds budget = std::chrono::milliseconds::max()) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto deadline = budget.count() > 1'000'000'000L ? std::chrono::steady_clock::time_point::max() : t0 + budget;
    BaselineVerdict v;
    v.method = BaselineMethod::Brute;

    auto slots = detail::uniform_slots(m, goal).slots;
    std::vector<std::size_t> pos(slots.size(), 0);

    StrategyProfile profile = detail::first_action_profile(m, goal.coalition);
    long checked = 0;
    for (;;) {
        // Materialize the slot assignment; pinned classes keep action 0.
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const auto& s = slots[i];
            ActionId act = (*s.actions)[pos[i]];
            int member = profile.member_index(s.agent);
            for (StateId q : m.classes[static_cast<std::size_t>(s.agent)][static_cast<std::size_t>(s.cell)])
                profile.choices[static_cast<std::size_t>(member)][static_cast<std::size_t>(q)] = act;
        }
        if (verify_winning(m, goal, profile, InfoMode::ImperfectInfo).winning) {
            v.answer = BaselineAnswer::True;
            v.witness = profile;
            break;
        }
        if ((++checked & 0xff) == 0 && std::chrono::steady_clock::now() >= deadline) {
            v.answer = BaselineAnswer::Inconclusive;
            v.timed_out = true;
            break;
        }
        // Advance, last slot fastest.
        std::size_t i = slots.size();
        for (;;) {
            if (i == 0) {
                v.answer = BaselineAnswer::False;
                i = SIZE_MAX;
                break;
            }
            --i;
            if (++pos[i] < slots[i].actions->size()) break;
            pos[i] = 0;
        }
        if (i == SIZE_MAX) break;
    }
    v.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    return v;
}

/**
 * Sound/complete approximation pair, a deliberately simple stand-in for the
 * published fixpoint approximations.
 *
 * Upper bound: the perfect-information attractor. False means certainly no
 * uniform winning strategy (uniform strategies are perfect-information
 * strategies too).
 *
 * Lower bound: a uniform attractor over common-knowledge classes (the join
 * of the members' partitions). A class is conquered when one joint action,
 * legal at all members, forces every not-yet-won member into the already-won
 * region against all completions. True comes with an extracted uniform
 * witness. The pair is conclusive iff lower is true or upper is false.
 */
inline std::pair<BaselineVerdict, BaselineVerdict> approx_bounds(const Model& m, const ReachabilityGoal& goal) {
    check_goal(m, goal);
    std::pair<BaselineVerdict, BaselineVerdict> out;
    auto& lower = out.first;
    auto& upper = out.second;

    // Upper: perfect-information attractor.
    {
        const auto t0 = std::chrono::steady_clock::now();
        upper.method = BaselineMethod::UpperApprox;
        upper.answer = attractor(m, goal) ? BaselineAnswer::True : BaselineAnswer::False;
        upper.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    }

    // Lower: uniform attractor over common-knowledge classes.
    const auto t0 = std::chrono::steady_clock::now();
    lower.method = BaselineMethod::LowerApprox;

    // Union-find join of the coalition members' partitions.
    std::vector<int> parent(static_cast<std::size_t>(m.num_states));
    for (StateId q = 0; q < m.num_states; ++q) parent[static_cast<std::size_t>(q)] = q;
    std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    };
    auto unite = [&](int x, int y) {
        x = find(x);
        y = find(y);
        if (x != y) parent[static_cast<std::size_t>(std::max(x, y))] = std::min(x, y);
    };
    for (AgentId a : goal.coalition)
        for (const auto& cell : m.classes[static_cast<std::size_t>(a)])
            for (std::size_t i = 1; i < cell.size(); ++i) unite(cell[0], cell[i]);

    std::vector<StateSet> ck_classes;
    {
        std::map<int, StateSet> by_root;
        for (StateId q = 0; q < m.num_states; ++q) by_root[find(q)].push_back(q);
        for (auto& [_, members] : by_root) ck_classes.push_back(std::move(members));
    }

    const StateSet& targets = m.prop_states(goal.target);
    std::vector<char> won(static_cast<std::size_t>(m.num_states), 0);
    for (StateId q : targets) won[static_cast<std::size_t>(q)] = 1;

    std::vector<std::optional<std::vector<ActionId>>> conquered(ck_classes.size());
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t c = 0; c < ck_classes.size(); ++c) {
            if (conquered[c]) continue;
            const StateSet& members = ck_classes[c];
            std::optional<std::vector<ActionId>> pick;
            detail::for_each_coalition_action(m, goal.coalition, members[0], [&](const std::vector<ActionId>& acts) {
                if (pick) return;
                // legal at every member?
                for (StateId q : members)
                    for (std::size_t i = 0; i < goal.coalition.size(); ++i)
                        if (m.action_position(goal.coalition[i], q, acts[i]) < 0) return;
                for (StateId q : members) {
                    if (won[static_cast<std::size_t>(q)]) continue;
                    bool forced = true;
                    for_each_completion(m, q, goal.coalition, acts, [&](long joint) {
                        if (!won[static_cast<std::size_t>(m.joint_succ[static_cast<std::size_t>(q)][static_cast<std::size_t>(joint)])])
                            forced = false;
                    });
                    if (!forced) return;
                }
                pick = acts;
            });
            if (pick) {
                conquered[c] = pick;
                for (StateId q : members) won[static_cast<std::size_t>(q)] = 1;
                changed = true;
            }
        }
    }

    StateSet q0 = initial_class_union(m, goal.coalition, goal.initial_state);
    bool all_won = true;
    for (StateId q : q0)
        if (!won[static_cast<std::size_t>(q)]) all_won = false;

    if (all_won) {
        lower.answer = BaselineAnswer::True;
        StrategyProfile witness = detail::first_action_profile(m, goal.coalition);
        for (std::size_t c = 0; c < ck_classes.size(); ++c) {
            if (!conquered[c]) continue;
            for (StateId q : ck_classes[c])
                for (std::size_t i = 0; i < goal.coalition.size(); ++i)
                    witness.choices[i][static_cast<std::size_t>(q)] = (*conquered[c])[i];
        }
        lower.witness = std::move(witness);
    } else {
        lower.answer = BaselineAnswer::False;  // not proven, may still be winnable
    }
    lower.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
    return out;
}

inline bool approx_conclusive(const BaselineVerdict& lower, const BaselineVerdict& upper) {
    return lower.answer == BaselineAnswer::True || upper.answer == BaselineAnswer::False;
}

}  // namespace stratim

#endif
