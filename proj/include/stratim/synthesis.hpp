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

#ifndef STRATIM_SYNTHESIS_HPP
#define STRATIM_SYNTHESIS_HPP

#include "stratim/strategy.hpp"

namespace stratim {

/**
 * Result of the perfect-information reachability fixpoint: the region from
 * which the coalition can force the target, a distance-to-target rank per
 * region state (-1 elsewhere), and a total profile whose region choices are
 * rank-decreasing against every opponent completion (first safe choice; see
 * randomize_profile for the seeded variant). Off-region states get the first
 * legal action — they are unreachable under any region play.
 */
struct AttractorResult {
    StateSet winning_region;
    std::vector<int> rank;
    StrategyProfile profile;
};

namespace detail {

// Enumerate the coalition's joint actions at q (odometer, member 0 most
// significant), invoking fn with one action per member.
template <typename F>
inline void for_each_coalition_action(const Model& m, const std::vector<AgentId>& coalition, StateId q, F&& fn) {
    std::vector<std::size_t> pos(coalition.size(), 0);
    std::vector<ActionId> acts(coalition.size());
    for (;;) {
        for (std::size_t i = 0; i < coalition.size(); ++i)
            acts[i] = m.protocol[static_cast<std::size_t>(coalition[i])][static_cast<std::size_t>(q)][pos[i]];
        fn(acts);
        std::size_t i = coalition.size();
        for (;;) {
            if (i == 0) return;
            --i;
            if (++pos[i] < m.protocol[static_cast<std::size_t>(coalition[i])][static_cast<std::size_t>(q)].size()) break;
            pos[i] = 0;
        }
    }
}

// All coalition actions at q that keep every opponent completion inside the
// region at strictly smaller rank (targets: every legal action qualifies).
inline std::vector<std::vector<ActionId>> safe_actions(const Model& m, const std::vector<AgentId>& coalition,
                                                       StateId q, const std::vector<int>& rank) {
    std::vector<std::vector<ActionId>> safe;
    if (rank[static_cast<std::size_t>(q)] == 0) {
        for_each_coalition_action(m, coalition, q, [&](const std::vector<ActionId>& acts) { safe.push_back(acts); });
        return safe;
    }
    for_each_coalition_action(m, coalition, q, [&](const std::vector<ActionId>& acts) {
        bool ok = true;
        for_each_completion(m, q, coalition, acts, [&](long joint) {
            StateId to = m.joint_succ[static_cast<std::size_t>(q)][static_cast<std::size_t>(joint)];
            if (rank[static_cast<std::size_t>(to)] < 0 || rank[static_cast<std::size_t>(to)] >= rank[static_cast<std::size_t>(q)])
                ok = false;
        });
        if (ok) safe.push_back(acts);
    });
    return safe;
}

inline StrategyProfile first_action_profile(const Model& m, const std::vector<AgentId>& coalition) {
    StrategyProfile p;
    p.coalition = coalition;
    p.choices.assign(coalition.size(), std::vector<ActionId>(static_cast<std::size_t>(m.num_states)));
    for (std::size_t i = 0; i < coalition.size(); ++i)
        for (StateId q = 0; q < m.num_states; ++q)
            p.choices[i][static_cast<std::size_t>(q)] =
                m.protocol[static_cast<std::size_t>(coalition[i])][static_cast<std::size_t>(q)][0];
    return p;
}

}  // namespace detail

/**
 * Least-fixpoint attractor for the coalition against all opponents,
 * layer-by-layer so that rank(q) is the forced distance bound to the target.
 * Returns nullopt when the goal's initial state lies outside the region.
 */
inline std::optional<AttractorResult> attractor(const Model& m, const ReachabilityGoal& goal) {
    check_goal(m, goal);
    const StateSet& targets = m.prop_states(goal.target);
    const auto& coalition = goal.coalition;

    std::vector<int> rank(static_cast<std::size_t>(m.num_states), -1);
    for (StateId q : targets) rank[static_cast<std::size_t>(q)] = 0;

    StateSet frontier = targets;
    int level = 0;
    while (!frontier.empty()) {
        ++level;
        StateSet next;
        // Desk-scale models: scan candidates each layer rather than keeping
        // reverse-edge counters.
        for (StateId q = 0; q < m.num_states; ++q) {
            if (rank[static_cast<std::size_t>(q)] >= 0) continue;
            bool attracted = false;
            detail::for_each_coalition_action(m, coalition, q, [&](const std::vector<ActionId>& acts) {
                if (attracted) return;
                bool ok = true;
                for_each_completion(m, q, coalition, acts, [&](long joint) {
                    StateId to = m.joint_succ[static_cast<std::size_t>(q)][static_cast<std::size_t>(joint)];
                    if (rank[static_cast<std::size_t>(to)] < 0) ok = false;
                });
                if (ok) attracted = true;
            });
            if (attracted) next.push_back(q);
        }
        for (StateId q : next) rank[static_cast<std::size_t>(q)] = level;
        frontier = std::move(next);
    }

    if (rank[static_cast<std::size_t>(goal.initial_state)] < 0) return std::nullopt;

    AttractorResult res;
    res.rank = std::move(rank);
    for (StateId q = 0; q < m.num_states; ++q)
        if (res.rank[static_cast<std::size_t>(q)] >= 0) res.winning_region.push_back(q);

    res.profile = detail::first_action_profile(m, coalition);
    for (StateId q : res.winning_region) {
        auto safe = detail::safe_actions(m, coalition, q, res.rank);
        assert(!safe.empty());
        for (std::size_t i = 0; i < coalition.size(); ++i)
            res.profile.choices[i][static_cast<std::size_t>(q)] = safe.front()[i];
    }
    return res;
}

/**
 * Seeded random selection among each region state's safe rank-decreasing
 * actions (per the experimental protocol: the perfect-information strategy
 * is randomly chosen). Off-region states keep the first legal action.
 */
inline StrategyProfile randomize_profile(const Model& m, const ReachabilityGoal& goal, const AttractorResult& att,
                                         std::uint64_t seed) {
    Rng rng(seed);
    StrategyProfile p = detail::first_action_profile(m, goal.coalition);
    for (StateId q : att.winning_region) {
        auto safe = detail::safe_actions(m, goal.coalition, q, att.rank);
        const auto& pick = safe[static_cast<std::size_t>(rng.below(static_cast<int>(safe.size())))];
        for (std::size_t i = 0; i < goal.coalition.size(); ++i)
            p.choices[i][static_cast<std::size_t>(q)] = pick[i];
    }
    return p;
}

// ---------------------------------------------------------------------------
// Decomposition into per-information-set records

namespace detail {

// DFS discovery order of the profile-pruned model: from the initial state
// first, then any remaining entry-closure states in ascending order.
// Successors are expanded in ascending joint-action enumeration order.
inline std::vector<StateId> dfs_order(const Model& m, const StrategyProfile& s, const StateSet& q0,
                                      StateId initial) {
    std::vector<char> seen(static_cast<std::size_t>(m.num_states), 0);
    std::vector<StateId> order;
    auto visit = [&](StateId root) {
        if (seen[static_cast<std::size_t>(root)]) return;
        std::vector<std::pair<StateId, std::size_t>> stack;
        std::vector<StateSet> succs;
        seen[static_cast<std::size_t>(root)] = 1;
        order.push_back(root);
        stack.push_back({root, 0});
        succs.push_back(successors(m, root, s.coalition, s.joint_at(root)));
        while (!stack.empty()) {
            auto& [q, next] = stack.back();
            if (next == succs.back().size()) {
                stack.pop_back();
                succs.pop_back();
                continue;
            }
            StateId to = succs.back()[next++];
            if (!seen[static_cast<std::size_t>(to)]) {
                seen[static_cast<std::size_t>(to)] = 1;
                order.push_back(to);
                stack.push_back({to, 0});
                succs.push_back(successors(m, to, s.coalition, s.joint_at(to)));
            }
        }
    };
    visit(initial);
    for (StateId q : q0) visit(q);
    return order;
}

}  // namespace detail

/**
 * Build the ordered record list of one coalition member over the pruned
 * model: info sets are the member's observation classes restricted to
 * Reach(Q0, s), listed in DFS discovery order; each record carries the
 * profile's restriction to the class plus the derived entry/relevance/
 * conflict/exit sets. The entry set follows the decomposition formula
 * augmented with Q0 ∩ Q_i so the initial class measures its own conflicts.
 */
inline std::vector<PartialStrategyRecord> build_agent_records(const Model& m, AgentId agent,
                                                              const StrategyProfile& s, const StateSet& q0,
                                                              StateId initial) {
    StateSet pruned = reach(m, q0, s);
    std::vector<StateId> order = detail::dfs_order(m, s, q0, initial);

    std::vector<PartialStrategyRecord> records;
    std::vector<char> listed(m.classes[static_cast<std::size_t>(agent)].size(), 0);
    for (StateId q : order) {
        int cell = m.class_index[static_cast<std::size_t>(agent)][static_cast<std::size_t>(q)];
        if (listed[static_cast<std::size_t>(cell)]) continue;
        listed[static_cast<std::size_t>(cell)] = 1;

        PartialStrategyRecord rec;
        rec.info.id = static_cast<int>(records.size());
        rec.info.agent = agent;
        rec.info.members = set_intersect(m.classes[static_cast<std::size_t>(agent)][static_cast<std::size_t>(cell)], pruned);
        rec.sigma = restrict_profile(s, rec.info.members);
        records.push_back(std::move(rec));
    }

    for (auto& rec : records) {
        StateSet outside = set_minus(pruned, rec.info.members);
        StateSet entries = set_intersect(reach_profile_excluding(m, outside, s, rec.info.members), rec.info.members);
        rec.in_states = set_union(set_intersect(q0, rec.info.members), entries);
        rec.recompute(m);
    }
    return records;
}

/**
 * Output of strategy synthesis: a total perfect-information profile plus
 * the ordered per-information-set records it decomposes into. q0 is the
 * entry closure of the goal's initial state for the record agents.
 */
struct SynthesisOutput {
    StrategyProfile profile;
    StateSet q0;
    // One record list per coalition member, coalition order. Singleton
    // coalitions have exactly one list.
    std::vector<std::vector<PartialStrategyRecord>> records;

    std::vector<PartialStrategyRecord>& single() {
        assert(records.size() == 1);
        return records[0];
    }
    const std::vector<PartialStrategyRecord>& single() const {
        assert(records.size() == 1);
        return records[0];
    }
};

/**
 * Coalition-general synthesis: attractor, seeded choice among the safe
 * actions, then one record list per member over the pruned model. Entry
 * closure q0 is the union of the members' classes at the initial state.
 * Returns nullopt when no perfect-information winning strategy exists from
 * the initial state.
 */
inline std::optional<SynthesisOutput> synthesize(const Model& m, const ReachabilityGoal& goal, std::uint64_t seed) {
    auto att = attractor(m, goal);
    if (!att) return std::nullopt;
    SynthesisOutput out;
    out.profile = randomize_profile(m, goal, *att, seed);
    out.q0 = initial_class_union(m, goal.coalition, goal.initial_state);
    for (AgentId a : goal.coalition)
        out.records.push_back(build_agent_records(m, a, out.profile, out.q0, goal.initial_state));
    return out;
}

// Single-agent strategy synthesis. Returns nullopt ("false") when
// the perfect-information game is unrealizable from the initial state.
inline std::optional<SynthesisOutput> strat_synth(const Model& m, const ReachabilityGoal& goal, std::uint64_t seed) {
    if (goal.coalition.size() != 1)
        throw std::invalid_argument("strat_synth expects a singleton coalition; use optimize_coal for coalitions");
    return synthesize(m, goal, seed);
}

}  // namespace stratim

#endif
