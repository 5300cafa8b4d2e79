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

#ifndef STRATIM_OPTIMIZER_HPP
#define STRATIM_OPTIMIZER_HPP

#include <set>
#include <sstream>

#include "stratim/dominance.hpp"
#include "stratim/metrics.hpp"
#include "stratim/synthesis.hpp"

namespace stratim {

struct OptimizerConfig {
    std::chrono::milliseconds synth_budget{30000};
    std::chrono::milliseconds optimize_budget{60000};
    long candidate_budget = 10000;
    long exhaustive_threshold = 4096;
    bool verify_each_sweep = true;
    // Candidate-level safety: dominance plus looplessness cannot see cycles
    // that leave the class and re-enter it, so the search additionally vetoes
    // candidates whose trial merge loses the perfect-information game.
    // Without this, such replacements surface at the sweep boundary and the
    // rollback throws away the whole sweep's progress.
    bool safe_candidate_filter = true;
    // Debugging aid: verify after every accepted replacement and drop the
    // replacement (skipping further work on that record this sweep) when it
    // breaks the winning property.
    bool verify_each_replacement = false;
    int max_sweeps = 50;
    std::uint64_t seed = 0;
};

enum class Termination { Fixpoint, Timeout };

inline const char* to_string(Termination t) { return t == Termination::Fixpoint ? "fixpoint" : "timeout"; }

struct SweepStats {
    long replacements = 0;
    long conflict_pairs = 0;  // sum over records after the sweep
};

// Fired on every accepted in-record replacement; before/after refer to the
// record's caches at acceptance time.
struct ReplacementEvent {
    int record_id = 0;
    AgentId agent = 0;
    Criterion primary = Criterion::Uniformity;
    PairSet conflicts_before, conflicts_after;
    StateSet reach_before, reach_after;
};
using ReplacementObserver = std::function<void(const ReplacementEvent&)>;

struct OptimizationTrace {
    int sweeps = 0;
    long replacements = 0;  // net of rolled-back sweeps
    std::vector<SweepStats> per_sweep;
    Termination termination = Termination::Fixpoint;
    int rollbacks = 0;
    StrategyProfile final_profile;
    std::vector<std::vector<PartialStrategyRecord>> final_records;
};

namespace detail {

inline long total_conflict_pairs(const std::vector<std::vector<PartialStrategyRecord>>& lists) {
    long n = 0;
    for (const auto& list : lists)
        for (const auto& rec : list) n += static_cast<long>(rec.conflict_pairs.size());
    return n;
}

// Fixpoint signature over what the loop actually compares: each record's
// choices and entry states (the other cached sets are functions of these).
inline std::string records_signature(const std::vector<std::vector<PartialStrategyRecord>>& lists) {
    std::ostringstream os;
    for (const auto& list : lists) {
        for (const auto& rec : list) {
            os << '#' << rec.info.id << '@' << rec.info.agent << ':';
            for (const auto& [q, joint] : rec.sigma.choices) {
                os << q << '=';
                for (ActionId a : joint) os << a << ',';
            }
            os << '|';
            for (StateId q : rec.in_states) os << q << ',';
        }
        os << ';';
    }
    return os.str();
}

/**
 * Refresh every record's entry states against the current profile (the
 * decomposition formula over the re-pruned model), excluding the record
 * that was just merged — its entry set is refreshed by later merges, as in
 * the sweep pseudocode. Teammate components of each record's strategy are
 * re-projected from the profile so coalition reach sets stay truthful.
 */
inline void refresh_entries(const Model& m, SynthesisOutput& state, const PartialStrategyRecord* just_merged,
                            std::chrono::steady_clock::time_point deadline) {
    StateSet pruned = reach(m, state.q0, state.profile);
    for (auto& list : state.records) {
        for (auto& rec : list) {
            if (&rec == just_merged) continue;
            if (std::chrono::steady_clock::now() >= deadline) return;
            for (auto& [q, joint] : rec.sigma.choices)
                for (std::size_t i = 0; i < rec.sigma.coalition.size(); ++i)
                    if (rec.sigma.coalition[i] != rec.info.agent)
                        joint[i] = state.profile.choices[i][static_cast<std::size_t>(q)];
            StateSet outside = set_minus(pruned, rec.info.members);
            StateSet entries = set_intersect(
                reach_profile_excluding(m, outside, state.profile, rec.info.members), rec.info.members);
            rec.in_states = set_union(set_intersect(state.q0, rec.info.members), entries);
            rec.recompute(m);
        }
    }
}

struct SweepOutcome {
    long replacements = 0;
    bool deadline_hit = false;
};

/**
 * One optimization pass over a single record list (Algorithm-2 sweep):
 * each record is stabilized by alternating uniform-best and outcome-best
 * replacements, then merged into the profile, after which every other
 * record's entry states are refreshed.
 */
inline SweepOutcome optimize_once(const Model& m, const ReachabilityGoal& goal, SynthesisOutput& state,
                                  std::size_t list_idx, const OptimizerConfig& cfg,
                                  std::chrono::steady_clock::time_point deadline,
                                  const ReplacementObserver& observer) {
    SweepOutcome out;
    const StateSet& targets = m.prop_states(goal.target);
    auto& list = state.records[list_idx];

    for (auto& rec : list) {
        if (std::chrono::steady_clock::now() >= deadline) {
            out.deadline_hit = true;
            return out;
        }
        const int member = [&] {
            for (std::size_t i = 0; i < rec.sigma.coalition.size(); ++i)
                if (rec.sigma.coalition[i] == rec.info.agent) return static_cast<int>(i);
            return 0;
        }();
        auto trial_merge_wins = [&](const PartialStrategy& cand) {
            StrategyProfile trial = state.profile;
            for (const auto& [q, joint] : cand.choices)
                trial.choices[static_cast<std::size_t>(member)][static_cast<std::size_t>(q)] =
                    joint[static_cast<std::size_t>(member)];
            return verify_winning(m, goal, trial, InfoMode::PerfectInfo).winning;
        };

        CandidateFilter safe;
        if (cfg.safe_candidate_filter) safe = trial_merge_wins;

        bool rec_changed = false;
        bool abort_record = false;
        for (;;) {
            bool changed = false;
            for (auto [primary, secondary] : {std::pair{Criterion::Uniformity, Criterion::Outcome},
                                              std::pair{Criterion::Outcome, Criterion::Uniformity}}) {
                auto res = find_best_dominating(m, rec.info.agent, rec, primary, secondary, cfg.candidate_budget,
                                                cfg.exhaustive_threshold, targets, deadline, safe);
                if (!res.strategy) continue;

                if (cfg.verify_each_replacement && !trial_merge_wins(*res.strategy)) {
                    abort_record = true;  // retrying would re-find the same candidate
                    break;
                }

                ReplacementEvent ev;
                ev.record_id = rec.info.id;
                ev.agent = rec.info.agent;
                ev.primary = primary;
                ev.conflicts_before = rec.conflict_pairs;
                ev.reach_before = rec.reach_set();
                rec.sigma = std::move(*res.strategy);
                rec.recompute(m);
                ev.conflicts_after = rec.conflict_pairs;
                ev.reach_after = rec.reach_set();
                if (observer) observer(ev);

                ++out.replacements;
                changed = true;
                rec_changed = true;
            }
            if (abort_record || !changed) break;
            if (std::chrono::steady_clock::now() >= deadline) {
                out.deadline_hit = true;
                break;
            }
        }

        if (rec_changed) {
            // Merge the record agent's component into the profile; teammate
            // components were never varied.
            for (const auto& [q, joint] : rec.sigma.choices)
                state.profile.choices[static_cast<std::size_t>(member)][static_cast<std::size_t>(q)] =
                    joint[static_cast<std::size_t>(member)];
            refresh_entries(m, state, &rec, deadline);
        }
        if (out.deadline_hit) return out;
    }
    return out;
}

}  // namespace detail

/**
 * One full optimization sweep over the synthesis state, in place: every
 * record list in coalition order, every record stabilized and merged.
 * Returns the number of accepted replacements; deadline expiry aborts
 * mid-sweep and reports it (anytime).
 */
inline detail::SweepOutcome optimize_once(const Model& m, const ReachabilityGoal& goal, SynthesisOutput& state,
                                          const OptimizerConfig& cfg,
                                          std::chrono::steady_clock::time_point deadline =
                                              std::chrono::steady_clock::time_point::max(),
                                          const ReplacementObserver& observer = {}) {
    detail::SweepOutcome out;
    for (std::size_t li = 0; li < state.records.size() && !out.deadline_hit; ++li) {
        auto res = detail::optimize_once(m, goal, state, li, cfg, deadline, observer);
        out.replacements += res.replacements;
        out.deadline_hit = res.deadline_hit;
    }
    return out;
}

/**
 * Iterated improvement loop with the anytime contract. Sweeps run until a
 * full sweep changes nothing (fixpoint), the optimize budget expires, the
 * sweep cap is hit, or a previously seen record state recurs (oscillation —
 * reported as timeout, never as fixpoint). With verify_each_sweep on, a
 * sweep whose merged profile stops being winning is rolled back whole.
 * Whatever happens, the returned profile passed the perfect-information
 * winning check: the synthesis profile is the floor, and a deadline that
 * fires mid-sweep falls back to the last verified snapshot.
 *
 * Works for any coalition size: each sweep passes over every member's
 * record list in coalition order, which for singletons is exactly the
 * single-agent loop.
 */
inline OptimizationTrace optimize(const Model& m, const ReachabilityGoal& goal, const SynthesisOutput& synth,
                                  const OptimizerConfig& cfg, const ReplacementObserver& observer = {}) {
    // Budgets beyond ~11 days mean "no deadline"; adding them to now() would
    // overflow the nanosecond clock.
    const auto deadline = cfg.optimize_budget.count() > 1'000'000'000L
                              ? std::chrono::steady_clock::time_point::max()
                              : std::chrono::steady_clock::now() + cfg.optimize_budget;

    OptimizationTrace trace;
    SynthesisOutput state = synth;

    auto quality = [&](const SynthesisOutput& s) {
        return std::pair<long, long>{metric_ep(m, goal, s.profile), metric_str(m, goal, s.profile)};
    };

    SynthesisOutput best = state;  // floor: the synthesis profile is winning
    auto best_q = quality(best);

    std::set<std::string> seen_states;
    for (;;) {
        if (std::chrono::steady_clock::now() >= deadline || trace.sweeps >= cfg.max_sweeps) {
            trace.termination = Termination::Timeout;
            break;
        }
        std::string sig = detail::records_signature(state.records);
        if (!seen_states.insert(sig).second) {
            trace.termination = Termination::Timeout;  // oscillation, not a fixpoint
            break;
        }

        SynthesisOutput before_sweep = state;
        auto sweep = optimize_once(m, goal, state, cfg, deadline, observer);
        long sweep_repl = sweep.replacements;
        bool hit = sweep.deadline_hit;
        ++trace.sweeps;
        trace.per_sweep.push_back({sweep_repl, detail::total_conflict_pairs(state.records)});

        if (cfg.verify_each_sweep && !verify_winning(m, goal, state.profile, InfoMode::PerfectInfo).winning) {
            state = std::move(before_sweep);
            ++trace.rollbacks;
            // The sweep had no net effect; keep the fixpoint invariant honest.
            trace.per_sweep.back() = {0, detail::total_conflict_pairs(state.records)};
            trace.termination = Termination::Fixpoint;
            break;
        }
        trace.replacements += sweep_repl;

        auto q = quality(state);
        if (q < best_q) {
            best = state;
            best_q = q;
        }
        if (hit) {
            trace.termination = Termination::Timeout;
            break;
        }
        if (detail::records_signature(state.records) == sig) {
            trace.termination = Termination::Fixpoint;
            break;
        }
    }

    // Anytime guarantee: never return a non-winning profile, and return the
    // best state seen when the last one is worse.
    if (!verify_winning(m, goal, state.profile, InfoMode::PerfectInfo).winning || quality(state) > best_q)
        state = std::move(best);

    trace.final_profile = std::move(state.profile);
    trace.final_records = std::move(state.records);
    return trace;
}

/**
 * Coalition entry point: synthesize a joint perfect-information profile,
 * decompose it per member, and run the agent-alternating sweep loop.
 * Returns nullopt when the perfect-information game is unrealizable.
 */
inline std::optional<OptimizationTrace> optimize_coal(const Model& m, const ReachabilityGoal& goal,
                                                      const OptimizerConfig& cfg,
                                                      const ReplacementObserver& observer = {}) {
    auto synth = synthesize(m, goal, cfg.seed);
    if (!synth) return std::nullopt;
    return optimize(m, goal, *synth, cfg, observer);
}

}  // namespace stratim

#endif
