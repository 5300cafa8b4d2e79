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

#ifndef STRATIM_METRICS_HPP
#define STRATIM_METRICS_HPP

#include "stratim/strategy.hpp"

namespace stratim {

// #str: states reachable in the strategy from the entry closure of the
// initial state.
inline int metric_str(const Model& m, const ReachabilityGoal& goal, const StrategyProfile& profile) {
    StateSet q0 = initial_class_union(m, goal.coalition, goal.initial_state);
    return static_cast<int>(reach(m, q0, profile).size());
}

/**
 * #ep: number of reachable states where the strategy's uniformity is
 * broken, i.e. some coalition member acts differently at another reachable
 * state of the same observation class. A state counts once however many
 * pairs it violates. Measured on the reachable set only — unreachable
 * conflicts are not what the optimization targets.
 */
inline int metric_ep(const Model& m, const ReachabilityGoal& goal, const StrategyProfile& profile) {
    StateSet q0 = initial_class_union(m, goal.coalition, goal.initial_state);
    StateSet reachable = reach(m, q0, profile);
    std::vector<char> broken(static_cast<std::size_t>(m.num_states), 0);
    for (AgentId a : goal.coalition) {
        for (const auto& cell : m.classes[static_cast<std::size_t>(a)]) {
            StateSet members = set_intersect(cell, reachable);
            if (members.size() < 2) continue;
            bool mixed = false;
            for (std::size_t i = 1; i < members.size() && !mixed; ++i)
                if (profile.choice(a, members[i]) != profile.choice(a, members[0])) mixed = true;
            if (mixed)
                for (StateId q : members) broken[static_cast<std::size_t>(q)] = 1;
        }
    }
    int count = 0;
    for (StateId q = 0; q < m.num_states; ++q) count += broken[static_cast<std::size_t>(q)];
    return count;
}

}  // namespace stratim

#endif
