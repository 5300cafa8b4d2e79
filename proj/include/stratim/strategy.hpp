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

#ifndef STRATIM_STRATEGY_HPP
#define STRATIM_STRATEGY_HPP

#include <functional>
#include <map>
#include <optional>

#include "stratim/model.hpp"

namespace stratim {

/**
 * Total memoryless strategy for a coalition: one action per (member, state).
 * choices[i][q] is the action of coalition[i] at q. Uniformity is a property
 * checked by verify_uniform, not an invariant; perfect-information profiles
 * are first-class values here.
 */
struct StrategyProfile {
    std::vector<AgentId> coalition;                 // sorted
    std::vector<std::vector<ActionId>> choices;     // [member][state]

    bool operator==(const StrategyProfile&) const = default;

    int member_index(AgentId a) const {
        for (std::size_t i = 0; i < coalition.size(); ++i)
            if (coalition[i] == a) return static_cast<int>(i);
        return -1;
    }

    ActionId choice(AgentId a, StateId q) const {
        int i = member_index(a);
        assert(i >= 0);
        return choices[static_cast<std::size_t>(i)][static_cast<std::size_t>(q)];
    }

    std::vector<ActionId> joint_at(StateId q) const {
        std::vector<ActionId> j(coalition.size());
        for (std::size_t i = 0; i < coalition.size(); ++i)
            j[i] = choices[i][static_cast<std::size_t>(q)];
        return j;
    }
};

/**
 * Partial coalition strategy: joint coalition actions on a subset of states.
 * Per-agent choices are projections of the stored joint action. Protocols
 * are nonempty, so any partial strategy extends to a total one.
 */
struct PartialStrategy {
    std::vector<AgentId> coalition;
    std::map<StateId, std::vector<ActionId>> choices;

    bool operator==(const PartialStrategy&) const = default;

    bool defined(StateId q) const { return choices.count(q) != 0; }

    StateSet domain() const {
        StateSet d;
        d.reserve(choices.size());
        for (const auto& [q, _] : choices) d.push_back(q);
        return d;
    }

    ActionId projected(AgentId a, StateId q) const {
        for (std::size_t i = 0; i < coalition.size(); ++i)
            if (coalition[i] == a) return choices.at(q)[i];
        throw std::invalid_argument("agent not in strategy coalition");
    }
};

inline PartialStrategy restrict_profile(const StrategyProfile& s, const StateSet& states) {
    PartialStrategy p;
    p.coalition = s.coalition;
    for (StateId q : states) p.choices[q] = s.joint_at(q);
    return p;
}

// Q0: the coalition-indistinguishability closure of a state — the union of
// every member's observation class at q.
inline StateSet initial_class_union(const Model& m, const std::vector<AgentId>& coalition, StateId q) {
    StateSet q0;
    for (AgentId a : coalition) q0 = set_union(q0, epistemic_class(m, a, q));
    return q0;
}

namespace detail {

// Generic forward closure. chooser(q) returns the joint coalition action to
// follow at q, or nullopt where the strategy is undefined; undefined states
// join the result as frontier states but take no step.
template <typename Chooser>
inline StateSet reach_closure(const Model& m, const std::vector<AgentId>& coalition, const StateSet& start,
                              Chooser&& chooser) {
    std::vector<char> mark(static_cast<std::size_t>(m.num_states), 0);
    std::vector<StateId> work;
    for (StateId q : start)
        if (!mark[static_cast<std::size_t>(q)]) {
            mark[static_cast<std::size_t>(q)] = 1;
            work.push_back(q);
        }
    while (!work.empty()) {
        StateId q = work.back();
        work.pop_back();
        auto act = chooser(q);
        if (!act) continue;
        for (StateId to : successors(m, q, coalition, *act))
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

}  // namespace detail

/**
 * Reach(start, sigma): least superset of start closed under one-step images
 * of sigma against all opponent completions. States outside dom(sigma) are
 * kept as frontier states, which is what makes Out = Reach \ Q well-typed.
 */
inline StateSet reach(const Model& m, const StateSet& start, const PartialStrategy& sigma) {
    return detail::reach_closure(m, sigma.coalition, start, [&](StateId q) -> std::optional<std::vector<ActionId>> {
        auto it = sigma.choices.find(q);
        if (it == sigma.choices.end()) return std::nullopt;
        return it->second;
    });
}

inline StateSet reach(const Model& m, const StateSet& start, const StrategyProfile& s) {
    return detail::reach_closure(m, s.coalition, start,
                                 [&](StateId q) -> std::optional<std::vector<ActionId>> { return s.joint_at(q); });
}

// Reach under a total profile with one state set carved out of the domain;
// the carved states become frontier states. This is the "s \ sigma_i" shape
// used when computing a record's entry states.
inline StateSet reach_profile_excluding(const Model& m, const StateSet& start, const StrategyProfile& s,
                                        const StateSet& excluded) {
    return detail::reach_closure(m, s.coalition, start, [&](StateId q) -> std::optional<std::vector<ActionId>> {
        if (set_contains(excluded, q)) return std::nullopt;
        return s.joint_at(q);
    });
}

/**
 * Conflicts(Q, sigma) for one coalition member: unordered pairs of states in
 * `states` where the member's projected choice differs. Stored unordered;
 * the relation is symmetric so nothing is lost against the ordered reading.
 */
inline PairSet conflicts(const Model& m, AgentId agent, const StateSet& states, const PartialStrategy& sigma) {
    (void)m;
    for (StateId q : states)
        if (!sigma.defined(q))
            throw std::invalid_argument("conflicts: state " + std::to_string(q) + " outside strategy domain");
    PairSet out;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = i + 1; j < states.size(); ++j)
            if (sigma.projected(agent, states[i]) != sigma.projected(agent, states[j]))
                out.push_back(make_pair_sorted(states[i], states[j]));
    std::sort(out.begin(), out.end());
    return out;
}

// sigma touches no state satisfying p.
inline bool is_p_free(const Model& m, const PartialStrategy& sigma, const std::string& prop) {
    for (StateId q : m.prop_states(prop))
        if (sigma.defined(q)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Outcome plays

struct Play {
    std::vector<StateId> states;
    bool reached_target = false;  // cut at a target rather than a revisit
};

/**
 * Stream the outcome plays of a total profile from every state some
 * coalition member cannot distinguish from the goal's initial state. A play
 * is cut when it first revisits a state on it or reaches a target; the
 * visitor returns false to stop the enumeration early.
 */
inline void for_each_outcome_play(const Model& m, const ReachabilityGoal& goal, const StrategyProfile& profile,
                                  const std::function<bool(const Play&)>& visit) {
    const StateSet& targets = m.prop_states(goal.target);
    StateSet q0 = initial_class_union(m, goal.coalition, goal.initial_state);

    std::vector<char> on_path(static_cast<std::size_t>(m.num_states), 0);
    std::vector<StateId> path;
    bool stop = false;

    std::function<void(StateId)> expand = [&](StateId q) {
        if (stop) return;
        path.push_back(q);
        if (set_contains(targets, q)) {
            if (!visit(Play{path, true})) stop = true;
        } else if (on_path[static_cast<std::size_t>(q)]) {
            if (!visit(Play{path, false})) stop = true;
        } else {
            on_path[static_cast<std::size_t>(q)] = 1;
            for (StateId to : successors(m, q, profile.coalition, profile.joint_at(q))) {
                expand(to);
                if (stop) break;
            }
            on_path[static_cast<std::size_t>(q)] = 0;
        }
        path.pop_back();
    };

    for (StateId q : q0) {
        expand(q);
        if (stop) return;
    }
}

inline std::vector<Play> enumerate_outcome_plays(const Model& m, const ReachabilityGoal& goal,
                                                 const StrategyProfile& profile, std::size_t max_plays) {
    std::vector<Play> plays;
    for_each_outcome_play(m, goal, profile, [&](const Play& p) {
        plays.push_back(p);
        return plays.size() < max_plays;
    });
    return plays;
}

// ---------------------------------------------------------------------------
// Verification

enum class InfoMode { PerfectInfo, ImperfectInfo };

struct WinVerdict {
    bool winning = false;
    // On failure: a lasso witness; states[cycle_start..] repeats forever.
    std::vector<StateId> lasso;
    std::size_t cycle_start = 0;
};

/**
 * Decide whether every outcome play reaches the target. Perfect-info mode
 * starts from the initial state alone; imperfect-info mode from its whole
 * coalition-indistinguishability closure. Because the transition function is
 * total, a play that avoids targets forever must enter a cycle of non-target
 * states, so the check reduces to cycle detection on the profile-pruned
 * graph with target states removed.
 */
inline WinVerdict verify_winning(const Model& m, const ReachabilityGoal& goal, const StrategyProfile& profile,
                                 InfoMode mode) {
    const StateSet& targets = m.prop_states(goal.target);
    StateSet starts = mode == InfoMode::PerfectInfo ? StateSet{goal.initial_state}
                                                    : initial_class_union(m, goal.coalition, goal.initial_state);

    enum : char { White, Grey, Black };
    std::vector<char> color(static_cast<std::size_t>(m.num_states), White);
    WinVerdict verdict;
    verdict.winning = true;

    // Iterative 3-color DFS; an edge into a grey state closes a target-free
    // cycle. Recursion would overflow on deep models.
    struct Frame {
        StateId q;
        StateSet succ;
        std::size_t next;
    };
    std::vector<Frame> stack;

    for (StateId start : starts) {
        if (set_contains(targets, start) || color[static_cast<std::size_t>(start)] == Black) continue;
        stack.push_back({start, successors(m, start, profile.coalition, profile.joint_at(start)), 0});
        color[static_cast<std::size_t>(start)] = Grey;
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next == f.succ.size()) {
                color[static_cast<std::size_t>(f.q)] = Black;
                stack.pop_back();
                continue;
            }
            StateId to = f.succ[f.next++];
            if (set_contains(targets, to)) continue;  // play ends well here
            char& c = color[static_cast<std::size_t>(to)];
            if (c == Grey) {
                verdict.winning = false;
                for (const Frame& g : stack) verdict.lasso.push_back(g.q);
                verdict.lasso.push_back(to);
                while (verdict.lasso[verdict.cycle_start] != to) ++verdict.cycle_start;
                return verdict;
            }
            if (c == White) {
                c = Grey;
                stack.push_back({to, successors(m, to, profile.coalition, profile.joint_at(to)), 0});
            }
        }
    }
    return verdict;
}

struct UniformityViolation {
    AgentId agent;
    StateId q1, q2;
};

struct UniformVerdict {
    bool uniform = true;
    std::vector<UniformityViolation> violations;
};

/**
 * Check uniformity of a profile on a restricted state set: every coalition
 * member must act identically across each of its observation classes, pairs
 * outside restrict_to being exempt. Pass the strategy-reachable set to match
 * how broken states are counted in the experiment metrics.
 */
inline UniformVerdict verify_uniform(const Model& m, const std::vector<AgentId>& coalition,
                                     const StrategyProfile& profile, const StateSet& restrict_to) {
    UniformVerdict v;
    for (AgentId a : coalition) {
        for (const auto& cell : m.classes[static_cast<std::size_t>(a)]) {
            StateSet members = set_intersect(cell, restrict_to);
            for (std::size_t i = 0; i < members.size(); ++i)
                for (std::size_t j = i + 1; j < members.size(); ++j)
                    if (profile.choice(a, members[i]) != profile.choice(a, members[j])) {
                        v.uniform = false;
                        v.violations.push_back({a, members[i], members[j]});
                    }
        }
    }
    return v;
}

/**
 * True iff no cycle inside dom(sigma) \ treat_as_exit is reachable from
 * `from` under sigma. Exits (typically target states) terminate paths, so a
 * loop through a target does not count against the strategy.
 */
inline bool is_loopless(const Model& m, const PartialStrategy& sigma, const StateSet& from,
                        const StateSet& treat_as_exit) {
    enum : char { White, Grey, Black };
    std::vector<char> color(static_cast<std::size_t>(m.num_states), White);

    auto terminal = [&](StateId q) { return !sigma.defined(q) || set_contains(treat_as_exit, q); };

    struct Frame {
        StateId q;
        StateSet succ;
        std::size_t next;
    };
    std::vector<Frame> stack;
    for (StateId start : from) {
        if (terminal(start) || color[static_cast<std::size_t>(start)] == Black) continue;
        color[static_cast<std::size_t>(start)] = Grey;
        stack.push_back({start, successors(m, start, sigma.coalition, sigma.choices.at(start)), 0});
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next == f.succ.size()) {
                color[static_cast<std::size_t>(f.q)] = Black;
                stack.pop_back();
                continue;
            }
            StateId to = f.succ[f.next++];
            if (terminal(to)) continue;
            char& c = color[static_cast<std::size_t>(to)];
            if (c == Grey) return false;
            if (c == White) {
                c = Grey;
                stack.push_back({to, successors(m, to, sigma.coalition, sigma.choices.at(to)), 0});
            }
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Information sets and partial-strategy records

struct InfoSet {
    int id = 0;
    AgentId agent = 0;
    StateSet members;  // one ~_agent class restricted to the pruned model
};

/**
 * Bookkeeping attached to one information set during optimization:
 * the partial strategy over the class, its entry states, and three derived
 * caches (domain of relevance, conflicts, exit states). The caches are
 * functions of (sigma, in_states) and must be refreshed via recompute()
 * whenever either changes.
 */
struct PartialStrategyRecord {
    InfoSet info;
    PartialStrategy sigma;
    StateSet in_states;
    StateSet rdom;
    PairSet conflict_pairs;
    StateSet out_states;

    void recompute(const Model& m) {
        StateSet r = reach(m, in_states, sigma);
        rdom = set_intersect(info.members, r);
        out_states = set_minus(r, info.members);
        conflict_pairs = conflicts(m, info.agent, rdom, sigma);
    }

    StateSet reach_set() const { return set_union(rdom, out_states); }
};

}  // namespace stratim

#endif
