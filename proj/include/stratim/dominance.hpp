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

#ifndef STRATIM_DOMINANCE_HPP
#define STRATIM_DOMINANCE_HPP

#include <chrono>

#include "stratim/strategy.hpp"

namespace stratim {

// The two improvement criteria. Outcome ranks strategies by tightness of
// the reachable outcome set, Uniformity by inclusion of the conflict set on
// the domain of relevance. Both are subset-inclusion preorders, so pairs can
// be incomparable; incomparable never triggers a replacement.
enum class Criterion { Outcome, Uniformity };

struct DominanceVerdict {
    bool comparable = false;  // at least one direction of the inclusion holds
    bool dominates = false;   // sigma1 <= sigma2 (sigma2 at least as good)
    bool strictly = false;    // sigma1 <  sigma2
};

// Everything a criterion comparison needs, computed with one forward
// closure per strategy.
struct CriterionEval {
    StateSet reach_set;
    StateSet rdom;
    PairSet conflict_pairs;
};

inline CriterionEval evaluate_criteria(const Model& m, AgentId agent, const StateSet& in_states,
                                       const PartialStrategy& sigma) {
    CriterionEval e;
    e.reach_set = reach(m, in_states, sigma);
    StateSet dom = sigma.domain();
    e.rdom = set_intersect(dom, e.reach_set);
    e.conflict_pairs = conflicts(m, agent, e.rdom, sigma);
    return e;
}

namespace detail {

inline DominanceVerdict compare_evals(const CriterionEval& e1, const CriterionEval& e2, Criterion c) {
    bool fwd, bwd;  // fwd: sigma1 <= sigma2
    if (c == Criterion::Outcome) {
        fwd = is_subset(e2.reach_set, e1.reach_set);
        bwd = is_subset(e1.reach_set, e2.reach_set);
    } else {
        fwd = is_subset(e2.conflict_pairs, e1.conflict_pairs);
        bwd = is_subset(e1.conflict_pairs, e2.conflict_pairs);
    }
    return {fwd || bwd, fwd, fwd && !bwd};
}

}  // namespace detail

/**
 * Compare two partial strategies over the same information set and entry
 * states under one criterion. The verdict is about sigma2's standing:
 * dominates means sigma1 <= sigma2 (sigma2 at least as tight / as uniform).
 */
inline DominanceVerdict compare(const Model& m, AgentId agent, const StateSet& in_states,
                                const PartialStrategy& sigma1, const PartialStrategy& sigma2, Criterion criterion) {
    if (!is_subset(in_states, sigma1.domain()) || !is_subset(in_states, sigma2.domain()))
        throw std::invalid_argument("compare: entry states not inside both strategies' domains");
    return detail::compare_evals(evaluate_criteria(m, agent, in_states, sigma1),
                                 evaluate_criteria(m, agent, in_states, sigma2), criterion);
}

// sigma1 is (primary, secondary)-dominated by sigma2: strict improvement on
// the primary criterion with no deterioration on the secondary.
inline bool dominated_by(const Model& m, AgentId agent, const StateSet& in_states, const PartialStrategy& sigma1,
                         const PartialStrategy& sigma2, Criterion primary, Criterion secondary) {
    CriterionEval e1 = evaluate_criteria(m, agent, in_states, sigma1);
    CriterionEval e2 = evaluate_criteria(m, agent, in_states, sigma2);
    return detail::compare_evals(e1, e2, primary).strictly && detail::compare_evals(e1, e2, secondary).dominates;
}

struct BestDominatingResult {
    std::optional<PartialStrategy> strategy;
    bool exhaustive = false;    // whole candidate space was enumerated
    long candidates_tried = 0;
};

// Extra per-candidate safety veto, applied on top of the loopless filter.
// Evaluated lazily, only for candidates about to become the current best.
using CandidateFilter = std::function<bool(const PartialStrategy&)>;

namespace detail {

inline bool strictly_better_primary(const CriterionEval& baseline, const CriterionEval& challenger, Criterion primary) {
    if (primary == Criterion::Outcome) return is_strict_subset(challenger.reach_set, baseline.reach_set);
    return is_strict_subset(challenger.conflict_pairs, baseline.conflict_pairs);
}

inline bool dominates_record(const CriterionEval& rec, const CriterionEval& cand, Criterion primary,
                             Criterion secondary) {
    return compare_evals(rec, cand, primary).strictly && compare_evals(rec, cand, secondary).dominates;
}

}  // namespace detail

/**
 * Search the record's information set for a (primary, secondary)-dominating
 * replacement such that no enumerated candidate is strictly better on the
 * primary criterion. Candidates reassign the record agent's action on the
 * states that matter (RDom union In); choices elsewhere in the class are
 * kept. A candidate must be loopless from the entry states (targets count
 * as exits) — a replacement that traps plays in a target-free cycle would
 * shrink the outcome set while silently losing the game.
 *
 * The whole space is enumerated when its size is within
 * exhaustive_threshold; otherwise hill-climbing over single-state changes
 * followed by the constant-action candidates, all capped by `budget`
 * evaluations and the deadline.
 */
inline BestDominatingResult find_best_dominating(const Model& m, AgentId agent, const PartialStrategyRecord& record,
                                                 Criterion primary, Criterion secondary, long budget,
                                                 long exhaustive_threshold, const StateSet& targets,
                                                 std::chrono::steady_clock::time_point deadline =
                                                     std::chrono::steady_clock::time_point::max(),
                                                 const CandidateFilter& safe = {}) {
    BestDominatingResult result;

    StateSet vary = set_union(record.rdom, record.in_states);
    if (vary.empty()) return result;

    const int member = [&] {
        for (std::size_t i = 0; i < record.sigma.coalition.size(); ++i)
            if (record.sigma.coalition[i] == agent) return static_cast<int>(i);
        throw std::invalid_argument("record agent not in strategy coalition");
    }();
    auto act_of = [&](const PartialStrategy& s, StateId q) -> ActionId {
        return s.choices.at(q)[static_cast<std::size_t>(member)];
    };

    // Protocol uniformity makes the legal action list identical across the
    // class; keep per-state lists anyway so hand-built models stay usable.
    std::vector<const std::vector<ActionId>*> legal;
    legal.reserve(vary.size());
    for (StateId q : vary)
        legal.push_back(&m.protocol[static_cast<std::size_t>(agent)][static_cast<std::size_t>(q)]);

    long space = 1;
    bool exhaust = true;
    for (const auto* acts : legal) {
        space *= static_cast<long>(acts->size());
        if (space > exhaustive_threshold) {
            exhaust = false;
            break;
        }
    }

    CriterionEval rec_eval{record.reach_set(), record.rdom, record.conflict_pairs};
    std::optional<CriterionEval> best_eval;
    bool truncated = false;

    // Returns true when the candidate became the new best.
    auto consider = [&](const PartialStrategy& cand) {
        ++result.candidates_tried;
        if (!is_loopless(m, cand, record.in_states, targets)) return false;
        CriterionEval e = evaluate_criteria(m, agent, record.in_states, cand);
        if (!detail::dominates_record(rec_eval, e, primary, secondary)) return false;
        if (result.strategy && !detail::strictly_better_primary(*best_eval, e, primary)) return false;
        if (safe && !safe(cand)) return false;
        result.strategy = cand;
        best_eval = std::move(e);
        return true;
    };
    auto out_of_budget = [&] {
        if (result.candidates_tried >= budget || std::chrono::steady_clock::now() >= deadline) truncated = true;
        return truncated;
    };

    if (exhaust) {
        // Lexicographic enumeration over (state, action position); the
        // record's own assignment is skipped, it cannot strictly dominate
        // itself.
        std::vector<std::size_t> pos(vary.size(), 0);
        std::vector<std::size_t> rec_pos(vary.size());
        for (std::size_t i = 0; i < vary.size(); ++i) {
            int p = m.action_position(agent, vary[i], act_of(record.sigma, vary[i]));
            assert(p >= 0);
            rec_pos[i] = static_cast<std::size_t>(p);
        }
        bool done = false;
        while (!done) {
            if (pos != rec_pos) {
                PartialStrategy cand = record.sigma;
                for (std::size_t i = 0; i < vary.size(); ++i)
                    cand.choices[vary[i]][static_cast<std::size_t>(member)] = (*legal[i])[pos[i]];
                consider(cand);
                if (out_of_budget()) break;
            }
            std::size_t i = vary.size();
            for (;;) {
                if (i == 0) {
                    done = true;
                    break;
                }
                --i;
                if (++pos[i] < legal[i]->size()) break;
                pos[i] = 0;
            }
        }
        result.exhaustive = done && !truncated;
        return result;
    }

    // Greedy mode: hill-climb over single-state changes, pivoting to each
    // new best, then try the constant-action collapses.
    PartialStrategy pivot = record.sigma;
    bool improved = true;
    while (improved && !truncated) {
        improved = false;
        for (std::size_t i = 0; i < vary.size() && !truncated; ++i) {
            StateId q = vary[i];
            for (ActionId act : *legal[i]) {
                if (act == act_of(pivot, q)) continue;
                PartialStrategy cand = pivot;
                cand.choices[q][static_cast<std::size_t>(member)] = act;
                if (consider(cand)) {
                    pivot = cand;
                    improved = true;
                }
                if (out_of_budget()) break;
            }
        }
    }
    if (!truncated) {
        for (ActionId act : *legal[0]) {
            bool act_legal = true;
            PartialStrategy cand = record.sigma;
            for (std::size_t i = 0; i < vary.size(); ++i) {
                if (std::find(legal[i]->begin(), legal[i]->end(), act) == legal[i]->end()) {
                    act_legal = false;
                    break;
                }
                cand.choices[vary[i]][static_cast<std::size_t>(member)] = act;
            }
            if (act_legal) consider(cand);
            if (out_of_budget()) break;
        }
    }
    return result;
}

}  // namespace stratim

#endif
