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

#ifndef STRATIM_MODEL_HPP
#define STRATIM_MODEL_HPP

#include <cassert>
#include <span>
#include <stdexcept>
#include <string>

#include "stratim/core.hpp"

namespace stratim {

/**
 * Explicit-state concurrent game structure with per-agent observation
 * partitions. Transitions are stored densely: for every state the legal
 * joint actions are the cartesian product of the per-agent protocol lists,
 * enumerated in mixed-radix order with agent 0 most significant, and
 * joint_succ[q] maps that joint index to the successor state.
 *
 * A Model is immutable after construction; all algorithms treat it as
 * read-only and may share it across threads.
 */
struct Model {
    int num_agents = 0;
    int num_states = 0;
    int num_actions = 0;

    std::vector<std::string> propositions;
    std::vector<StateSet> valuation;  // parallel to propositions

    // protocol[a][q]: nonempty ordered action list of agent a at state q.
    std::vector<std::vector<std::vector<ActionId>>> protocol;

    // joint_succ[q][joint index]; -1 marks a missing entry (invalid model).
    std::vector<std::vector<StateId>> joint_succ;

    // Observation partitions: classes[a] lists the cells of ~_a,
    // class_index[a][q] locates the cell containing q.
    std::vector<std::vector<StateSet>> classes;
    std::vector<std::vector<int>> class_index;

    void init(int agents, int states) {
        num_agents = agents;
        num_states = states;
        protocol.assign(static_cast<std::size_t>(agents), std::vector<std::vector<ActionId>>(static_cast<std::size_t>(states)));
        joint_succ.assign(static_cast<std::size_t>(states), {});
        classes.assign(static_cast<std::size_t>(agents), {});
        class_index.assign(static_cast<std::size_t>(agents), std::vector<int>(static_cast<std::size_t>(states), -1));
    }

    int prop_index(const std::string& name) const {
        for (std::size_t i = 0; i < propositions.size(); ++i)
            if (propositions[i] == name) return static_cast<int>(i);
        return -1;
    }

    const StateSet& prop_states(const std::string& name) const {
        int idx = prop_index(name);
        if (idx < 0) throw std::invalid_argument("unknown proposition: " + name);
        return valuation[static_cast<std::size_t>(idx)];
    }

    long joint_count(StateId q) const {
        long c = 1;
        for (AgentId a = 0; a < num_agents; ++a)
            c *= static_cast<long>(protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)].size());
        return c;
    }

    // Position of `act` in agent a's protocol list at q, or -1.
    int action_position(AgentId a, StateId q, ActionId act) const {
        const auto& acts = protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
        for (std::size_t i = 0; i < acts.size(); ++i)
            if (acts[i] == act) return static_cast<int>(i);
        return -1;
    }

    long joint_index(StateId q, std::span<const int> positions) const {
        long idx = 0;
        for (AgentId a = 0; a < num_agents; ++a) {
            const auto& acts = protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
            idx = idx * static_cast<long>(acts.size()) + positions[static_cast<std::size_t>(a)];
        }
        return idx;
    }

    // Decode a joint index back into one action per agent.
    std::vector<ActionId> joint_actions_at(StateId q, long joint) const {
        std::vector<ActionId> out(static_cast<std::size_t>(num_agents));
        for (AgentId a = num_agents - 1; a >= 0; --a) {
            const auto& acts = protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
            long sz = static_cast<long>(acts.size());
            out[static_cast<std::size_t>(a)] = acts[static_cast<std::size_t>(joint % sz)];
            joint /= sz;
        }
        return out;
    }

    StateId successor(StateId q, std::span<const ActionId> full_joint) const {
        std::vector<int> pos(static_cast<std::size_t>(num_agents));
        for (AgentId a = 0; a < num_agents; ++a) {
            int p = action_position(a, q, full_joint[static_cast<std::size_t>(a)]);
            if (p < 0)
                throw std::invalid_argument("illegal action " + std::to_string(full_joint[static_cast<std::size_t>(a)]) +
                                            " for agent " + std::to_string(a) + " at state " + std::to_string(q));
            pos[static_cast<std::size_t>(a)] = p;
        }
        return joint_succ[static_cast<std::size_t>(q)][static_cast<std::size_t>(joint_index(q, pos))];
    }

    // Install a partition for one agent; cells need not be sorted on entry.
    void set_classes(AgentId a, std::vector<StateSet> cells) {
        for (auto& c : cells) std::sort(c.begin(), c.end());
        classes[static_cast<std::size_t>(a)] = std::move(cells);
        auto& idx = class_index[static_cast<std::size_t>(a)];
        std::fill(idx.begin(), idx.end(), -1);
        for (std::size_t c = 0; c < classes[static_cast<std::size_t>(a)].size(); ++c)
            for (StateId q : classes[static_cast<std::size_t>(a)][c])
                idx[static_cast<std::size_t>(q)] = static_cast<int>(c);
    }

    // Identity partition = perfect information for that agent.
    void set_identity_classes(AgentId a) {
        std::vector<StateSet> cells(static_cast<std::size_t>(num_states));
        for (StateId q = 0; q < num_states; ++q) cells[static_cast<std::size_t>(q)] = {q};
        set_classes(a, std::move(cells));
    }
};

// Reachability goal: coalition A tries to reach a state of the target
// proposition starting at initial_state.
struct ReachabilityGoal {
    std::vector<AgentId> coalition;  // sorted, nonempty
    std::string target;
    StateId initial_state = 0;
};

/**
 * Enumerate every legal joint action at q whose coalition components match
 * the given fixed assignment, invoking fn(joint_index) for each. Agents not
 * listed in `agents` range over their whole protocol.
 *
 * Throws if a fixed action is not in the owning agent's protocol at q.
 */
template <typename F>
inline void for_each_completion(const Model& m, StateId q, std::span<const AgentId> agents,
                                std::span<const ActionId> actions, F&& fn) {
    assert(agents.size() == actions.size());
    std::vector<int> pos(static_cast<std::size_t>(m.num_agents), 0);
    std::vector<bool> fixed(static_cast<std::size_t>(m.num_agents), false);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        AgentId a = agents[i];
        int p = m.action_position(a, q, actions[i]);
        if (p < 0)
            throw std::invalid_argument("illegal action " + std::to_string(actions[i]) + " for agent " +
                                        std::to_string(a) + " at state " + std::to_string(q));
        pos[static_cast<std::size_t>(a)] = p;
        fixed[static_cast<std::size_t>(a)] = true;
    }
    // Odometer over the free agents, most significant first; yields joint
    // indices in ascending enumeration order.
    for (;;) {
        fn(m.joint_index(q, pos));
        AgentId a = m.num_agents - 1;
        for (; a >= 0; --a) {
            if (fixed[static_cast<std::size_t>(a)]) continue;
            const auto sz = static_cast<int>(m.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)].size());
            if (pos[static_cast<std::size_t>(a)] + 1 < sz) {
                ++pos[static_cast<std::size_t>(a)];
                break;
            }
            pos[static_cast<std::size_t>(a)] = 0;
        }
        if (a < 0) return;
    }
}

/**
 * One-step image of q under all completions of a partially fixed joint
 * action: { o(q, (fixed, rest)) : rest over the free agents' protocols }.
 */
inline StateSet successors(const Model& m, StateId q, std::span<const AgentId> agents,
                           std::span<const ActionId> actions) {
    StateSet out;
    for_each_completion(m, q, agents, actions, [&](long joint) {
        out.push_back(m.joint_succ[static_cast<std::size_t>(q)][static_cast<std::size_t>(joint)]);
    });
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline const StateSet& epistemic_class(const Model& m, AgentId a, StateId q) {
    int c = m.class_index[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
    if (c < 0) throw std::invalid_argument("state " + std::to_string(q) + " not covered by agent " +
                                           std::to_string(a) + "'s partition");
    return m.classes[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)];
}

/**
 * Structural validation. Returns one human-readable line per violation;
 * an empty list means the model is a well-formed game structure. Violations
 * are data, not errors: callers decide whether to throw.
 */
inline std::vector<std::string> validate_model(const Model& m) {
    std::vector<std::string> bad;
    auto complain = [&](std::string msg) { bad.push_back(std::move(msg)); };

    if (m.num_agents <= 0) complain("model has no agents");
    if (m.num_states <= 0) complain("model has no states");
    if (m.propositions.size() != m.valuation.size())
        complain("valuation does not match proposition list");
    for (std::size_t p = 0; p < m.valuation.size(); ++p)
        for (StateId q : m.valuation[p])
            if (q < 0 || q >= m.num_states)
                complain("proposition " + m.propositions[p] + " names out-of-range state " + std::to_string(q));

    // Protocols: nonempty, in-range, duplicate-free.
    for (AgentId a = 0; a < m.num_agents; ++a) {
        for (StateId q = 0; q < m.num_states; ++q) {
            const auto& acts = m.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)];
            if (acts.empty())
                complain("empty protocol for agent " + std::to_string(a) + " at state " + std::to_string(q));
            std::vector<ActionId> sorted = acts;
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
                complain("duplicate action in protocol of agent " + std::to_string(a) + " at state " + std::to_string(q));
            for (ActionId act : acts)
                if (act < 0 || act >= m.num_actions)
                    complain("out-of-range action " + std::to_string(act) + " for agent " + std::to_string(a) +
                             " at state " + std::to_string(q));
        }
    }

    // Transition totality and determinism: exactly one successor per legal
    // joint action (the dense table makes extra entries unrepresentable, so
    // only gaps and ranges can go wrong).
    for (StateId q = 0; q < m.num_states; ++q) {
        const auto expect = static_cast<std::size_t>(m.joint_count(q));
        if (m.joint_succ[static_cast<std::size_t>(q)].size() != expect) {
            complain("state " + std::to_string(q) + " has " +
                     std::to_string(m.joint_succ[static_cast<std::size_t>(q)].size()) + " transition entries, expected " +
                     std::to_string(expect));
            continue;
        }
        for (std::size_t j = 0; j < expect; ++j) {
            StateId to = m.joint_succ[static_cast<std::size_t>(q)][j];
            if (to < 0 || to >= m.num_states)
                complain("missing or out-of-range transition from state " + std::to_string(q) + " at joint action " +
                         std::to_string(j));
        }
    }

    // Epistemic partitions: every state in exactly one cell, protocol
    // uniform across each cell.
    for (AgentId a = 0; a < m.num_agents; ++a) {
        std::vector<int> seen(static_cast<std::size_t>(m.num_states), 0);
        for (const auto& cell : m.classes[static_cast<std::size_t>(a)]) {
            if (cell.empty()) complain("empty epistemic class for agent " + std::to_string(a));
            for (StateId q : cell) {
                if (q < 0 || q >= m.num_states) {
                    complain("agent " + std::to_string(a) + " partition names out-of-range state " + std::to_string(q));
                    continue;
                }
                ++seen[static_cast<std::size_t>(q)];
            }
            for (std::size_t i = 1; i < cell.size(); ++i) {
                const auto& p0 = m.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(cell[0])];
                const auto& pi = m.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(cell[i])];
                if (p0 != pi)
                    complain("uniformity violation: agent " + std::to_string(a) + " cannot distinguish states " +
                             std::to_string(cell[0]) + " and " + std::to_string(cell[i]) +
                             " but has different protocols there");
            }
        }
        for (StateId q = 0; q < m.num_states; ++q) {
            if (seen[static_cast<std::size_t>(q)] == 0)
                complain("state " + std::to_string(q) + " missing from agent " + std::to_string(a) + "'s partition");
            else if (seen[static_cast<std::size_t>(q)] > 1)
                complain("state " + std::to_string(q) + " appears in several classes of agent " + std::to_string(a));
        }
        if (m.class_index[static_cast<std::size_t>(a)].size() != static_cast<std::size_t>(m.num_states))
            complain("class index of agent " + std::to_string(a) + " not sized to the state space");
    }
    return bad;
}

inline void check_goal(const Model& m, const ReachabilityGoal& goal) {
    if (goal.coalition.empty()) throw std::invalid_argument("empty coalition");
    for (AgentId a : goal.coalition)
        if (a < 0 || a >= m.num_agents) throw std::invalid_argument("coalition agent out of range: " + std::to_string(a));
    if (m.prop_index(goal.target) < 0) throw std::invalid_argument("unknown target proposition: " + goal.target);
    if (goal.initial_state < 0 || goal.initial_state >= m.num_states)
        throw std::invalid_argument("initial state out of range");
}

}  // namespace stratim

#endif
