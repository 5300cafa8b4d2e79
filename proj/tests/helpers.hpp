// Shared test utilities: a compact model builder for hand-written game
// structures plus independent oracles the implementation is checked against.
// The oracles deliberately take different algorithmic routes than the
// library (play enumeration, avoid-set fixpoints, quadratic scans).

#ifndef STRATIM_TESTS_HELPERS_HPP
#define STRATIM_TESTS_HELPERS_HPP

#include <catch2/catch_amalgamated.hpp>

#include "stratim/benchgen.hpp"
#include "stratim/metrics.hpp"
#include "stratim/strategy.hpp"

namespace testutil {

using namespace stratim;

class ModelBuilder {
public:
    ModelBuilder(int agents, int states, int actions) {
        m_.init(agents, states);
        m_.num_actions = actions;
    }

    ModelBuilder& protocol(AgentId a, StateId q, std::vector<ActionId> acts) {
        m_.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)] = std::move(acts);
        return *this;
    }

    // Same protocol for one agent at every state.
    ModelBuilder& protocol_all(AgentId a, std::vector<ActionId> acts) {
        for (StateId q = 0; q < m_.num_states; ++q)
            m_.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)] = acts;
        return *this;
    }

    ModelBuilder& transition(StateId from, std::vector<ActionId> acts, StateId to) {
        trans_.push_back({from, std::move(acts), to});
        return *this;
    }

    ModelBuilder& prop(std::string name, StateSet states) {
        std::sort(states.begin(), states.end());
        m_.propositions.push_back(std::move(name));
        m_.valuation.push_back(std::move(states));
        return *this;
    }

    ModelBuilder& classes(AgentId a, std::vector<StateSet> cells) {
        m_.set_classes(a, std::move(cells));
        explicit_classes_.insert(a);
        return *this;
    }

    // Gaps in the transition table stay -1 so totality violations can be
    // exercised; build() asserts validity, build_unchecked() does not.
    Model build_unchecked() {
        Model m = m_;
        for (AgentId a = 0; a < m.num_agents; ++a)
            if (!explicit_classes_.count(a)) m.set_identity_classes(a);
        for (StateId q = 0; q < m.num_states; ++q)
            m.joint_succ[static_cast<std::size_t>(q)].assign(static_cast<std::size_t>(m.joint_count(q)), -1);
        for (const auto& [from, acts, to] : trans_) {
            std::vector<int> pos(static_cast<std::size_t>(m.num_agents));
            for (AgentId a = 0; a < m.num_agents; ++a) {
                int p = m.action_position(a, from, acts[static_cast<std::size_t>(a)]);
                REQUIRE(p >= 0);
                pos[static_cast<std::size_t>(a)] = p;
            }
            m.joint_succ[static_cast<std::size_t>(from)][static_cast<std::size_t>(m.joint_index(from, pos))] = to;
        }
        return m;
    }

    Model build() {
        Model m = build_unchecked();
        auto violations = validate_model(m);
        for (const auto& v : violations) UNSCOPED_INFO(v);
        REQUIRE(violations.empty());
        return m;
    }

private:
    Model m_;
    std::vector<std::tuple<StateId, std::vector<ActionId>, StateId>> trans_;
    std::set<AgentId> explicit_classes_;
};

// Total single-agent profile from a plain action-per-state list.
inline StrategyProfile profile_of(std::vector<ActionId> actions, std::vector<AgentId> coalition = {0}) {
    StrategyProfile s;
    s.coalition = std::move(coalition);
    s.choices.assign(s.coalition.size(), std::move(actions));
    return s;
}

inline PartialStrategy partial_of(std::vector<AgentId> coalition,
                                  std::initializer_list<std::pair<StateId, std::vector<ActionId>>> choices) {
    PartialStrategy p;
    p.coalition = std::move(coalition);
    for (const auto& [q, acts] : choices) p.choices[q] = acts;
    return p;
}

// ---------------------------------------------------------------------------
// Oracles

// Reach by explicit play enumeration: all strategy-consistent paths up to
// length |St| + 1, collecting every state on them.
inline StateSet oracle_reach_by_plays(const Model& m, const StateSet& start, const PartialStrategy& sigma) {
    std::set<StateId> seen;
    std::function<void(StateId, std::size_t)> walk = [&](StateId q, std::size_t depth) {
        seen.insert(q);
        if (depth > static_cast<std::size_t>(m.num_states)) return;
        if (!sigma.defined(q)) return;
        for (StateId to : successors(m, q, sigma.coalition, sigma.choices.at(q))) walk(to, depth + 1);
    };
    for (StateId q : start) walk(q, 0);
    return StateSet(seen.begin(), seen.end());
}

// Winning check through the avoid-set greatest fixpoint: the environment
// can defeat the profile iff a state of X = gfp(non-targets with a
// successor in X) is reachable from a start without crossing a target.
inline bool oracle_winning(const Model& m, const ReachabilityGoal& goal, const StrategyProfile& profile,
                           InfoMode mode) {
    const StateSet& targets = m.prop_states(goal.target);
    std::vector<char> in_x(static_cast<std::size_t>(m.num_states), 1);
    for (StateId q : targets) in_x[static_cast<std::size_t>(q)] = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (StateId q = 0; q < m.num_states; ++q) {
            if (!in_x[static_cast<std::size_t>(q)]) continue;
            bool has = false;
            for (StateId to : successors(m, q, profile.coalition, profile.joint_at(q)))
                if (in_x[static_cast<std::size_t>(to)]) has = true;
            if (!has) {
                in_x[static_cast<std::size_t>(q)] = 0;
                changed = true;
            }
        }
    }
    StateSet starts = mode == InfoMode::PerfectInfo ? StateSet{goal.initial_state}
                                                    : initial_class_union(m, goal.coalition, goal.initial_state);
    // BFS avoiding targets
    std::vector<char> seen(static_cast<std::size_t>(m.num_states), 0);
    std::vector<StateId> work;
    for (StateId q : starts)
        if (!set_contains(targets, q)) {
            seen[static_cast<std::size_t>(q)] = 1;
            work.push_back(q);
        }
    while (!work.empty()) {
        StateId q = work.back();
        work.pop_back();
        if (in_x[static_cast<std::size_t>(q)]) return false;
        for (StateId to : successors(m, q, profile.coalition, profile.joint_at(q)))
            if (!set_contains(targets, to) && !seen[static_cast<std::size_t>(to)]) {
                seen[static_cast<std::size_t>(to)] = 1;
                work.push_back(to);
            }
    }
    return true;
}

// Exhaustive perfect-information synthesis for tiny single-agent models:
// enumerate every total strategy of the coalition agent and test it.
inline bool oracle_perfect_info_winner_exists(const Model& m, const ReachabilityGoal& goal) {
    REQUIRE(goal.coalition.size() == 1);
    AgentId a = goal.coalition[0];
    std::vector<std::size_t> pos(static_cast<std::size_t>(m.num_states), 0);
    for (;;) {
        StrategyProfile s;
        s.coalition = {a};
        s.choices.assign(1, std::vector<ActionId>(static_cast<std::size_t>(m.num_states)));
        for (StateId q = 0; q < m.num_states; ++q)
            s.choices[0][static_cast<std::size_t>(q)] =
                m.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)][pos[static_cast<std::size_t>(q)]];
        if (oracle_winning(m, goal, s, InfoMode::PerfectInfo)) return true;
        StateId q = m.num_states;
        for (;;) {
            if (q == 0) return false;
            --q;
            if (++pos[static_cast<std::size_t>(q)] <
                m.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)].size())
                break;
            pos[static_cast<std::size_t>(q)] = 0;
        }
    }
}

// Quadratic broken-state scan, the straightforward reading of the metric.
inline int oracle_ep_scan(const Model& m, const ReachabilityGoal& goal, const StrategyProfile& profile) {
    StateSet reachable = reach(m, initial_class_union(m, goal.coalition, goal.initial_state), profile);
    int count = 0;
    for (StateId q : reachable) {
        bool broken = false;
        for (AgentId a : goal.coalition)
            for (StateId p : reachable)
                if (p != q && set_contains(epistemic_class(m, a, q), p) &&
                    profile.choice(a, q) != profile.choice(a, p))
                    broken = true;
        count += broken ? 1 : 0;
    }
    return count;
}

}  // namespace testutil

#endif
