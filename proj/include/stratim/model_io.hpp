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

#ifndef STRATIM_MODEL_IO_HPP
#define STRATIM_MODEL_IO_HPP

#include <fstream>

#include <json.hpp>

#include "stratim/strategy.hpp"

namespace stratim {

using nlohmann::json;

namespace detail {

inline void require_keys(const json& j, std::initializer_list<const char*> keys, const char* what) {
    for (const char* k : keys)
        if (!j.contains(k)) throw std::runtime_error(std::string(what) + ": missing field \"" + k + "\"");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys)
            if (it.key() == k) known = true;
        if (!known) throw std::runtime_error(std::string(what) + ": unknown field \"" + it.key() + "\"");
    }
}

}  // namespace detail

/**
 * Parse the model wire format. Unknown fields are rejected and the
 * structural validator runs before the model is handed out; a malformed
 * model never escapes this function.
 */
inline Model model_from_json(const json& j) {
    detail::require_keys(j, {"agents", "states", "propositions", "valuation", "protocol", "transitions", "epistemic"},
                         "model");
    Model m;
    m.init(j.at("agents").get<int>(), j.at("states").get<int>());

    for (const auto& p : j.at("propositions")) m.propositions.push_back(p.get<std::string>());
    m.valuation.assign(m.propositions.size(), {});
    for (auto it = j.at("valuation").begin(); it != j.at("valuation").end(); ++it) {
        int idx = m.prop_index(it.key());
        if (idx < 0) throw std::runtime_error("model: valuation names unlisted proposition \"" + it.key() + "\"");
        StateSet states = it.value().get<StateSet>();
        std::sort(states.begin(), states.end());
        m.valuation[static_cast<std::size_t>(idx)] = std::move(states);
    }

    const auto& proto = j.at("protocol");
    if (proto.size() != static_cast<std::size_t>(m.num_agents))
        throw std::runtime_error("model: protocol must list one table per agent");
    int max_action = -1;
    for (AgentId a = 0; a < m.num_agents; ++a) {
        const auto& per_state = proto[static_cast<std::size_t>(a)];
        if (per_state.size() != static_cast<std::size_t>(m.num_states))
            throw std::runtime_error("model: protocol of agent " + std::to_string(a) + " must cover every state");
        for (StateId q = 0; q < m.num_states; ++q) {
            auto acts = per_state[static_cast<std::size_t>(q)].get<std::vector<ActionId>>();
            for (ActionId act : acts) max_action = std::max(max_action, act);
            m.protocol[static_cast<std::size_t>(a)][static_cast<std::size_t>(q)] = std::move(acts);
        }
    }
    m.num_actions = max_action + 1;

    for (StateId q = 0; q < m.num_states; ++q)
        m.joint_succ[static_cast<std::size_t>(q)].assign(static_cast<std::size_t>(m.joint_count(q)), -1);
    for (const auto& t : j.at("transitions")) {
        detail::require_keys(t, {"from", "actions", "to"}, "transition");
        StateId from = t.at("from").get<StateId>();
        StateId to = t.at("to").get<StateId>();
        auto acts = t.at("actions").get<std::vector<ActionId>>();
        if (from < 0 || from >= m.num_states || to < 0 || to >= m.num_states)
            throw std::runtime_error("model: transition endpoint out of range");
        if (acts.size() != static_cast<std::size_t>(m.num_agents))
            throw std::runtime_error("model: transition needs one action per agent");
        std::vector<int> pos(static_cast<std::size_t>(m.num_agents));
        for (AgentId a = 0; a < m.num_agents; ++a) {
            int p = m.action_position(a, from, acts[static_cast<std::size_t>(a)]);
            if (p < 0)
                throw std::runtime_error("model: transition from state " + std::to_string(from) +
                                         " uses an action outside agent " + std::to_string(a) + "'s protocol");
            pos[static_cast<std::size_t>(a)] = p;
        }
        auto& slot = m.joint_succ[static_cast<std::size_t>(from)][static_cast<std::size_t>(m.joint_index(from, pos))];
        if (slot != -1 && slot != to)
            throw std::runtime_error("model: conflicting transitions from state " + std::to_string(from));
        slot = to;
    }

    const auto& epi = j.at("epistemic");
    if (epi.size() != static_cast<std::size_t>(m.num_agents))
        throw std::runtime_error("model: epistemic must list one partition per agent");
    for (AgentId a = 0; a < m.num_agents; ++a) {
        std::vector<StateSet> cells;
        for (const auto& cell : epi[static_cast<std::size_t>(a)]) cells.push_back(cell.get<StateSet>());
        m.set_classes(a, std::move(cells));
    }

    auto violations = validate_model(m);
    if (!violations.empty()) {
        std::string msg = "model validation failed:";
        for (std::size_t i = 0; i < violations.size() && i < 5; ++i) msg += "\n  " + violations[i];
        if (violations.size() > 5) msg += "\n  (+" + std::to_string(violations.size() - 5) + " more)";
        throw std::runtime_error(msg);
    }
    return m;
}

inline json model_to_json(const Model& m) {
    json j;
    j["agents"] = m.num_agents;
    j["states"] = m.num_states;
    j["propositions"] = m.propositions;
    json val = json::object();
    for (std::size_t p = 0; p < m.propositions.size(); ++p) val[m.propositions[p]] = m.valuation[p];
    j["valuation"] = std::move(val);
    json proto = json::array();
    for (AgentId a = 0; a < m.num_agents; ++a) proto.push_back(m.protocol[static_cast<std::size_t>(a)]);
    j["protocol"] = std::move(proto);
    json trans = json::array();
    for (StateId q = 0; q < m.num_states; ++q) {
        const long count = m.joint_count(q);
        for (long joint = 0; joint < count; ++joint) {
            trans.push_back(json{{"from", q},
                                 {"actions", m.joint_actions_at(q, joint)},
                                 {"to", m.joint_succ[static_cast<std::size_t>(q)][static_cast<std::size_t>(joint)]}});
        }
    }
    j["transitions"] = std::move(trans);
    json epi = json::array();
    for (AgentId a = 0; a < m.num_agents; ++a) {
        auto cells = m.classes[static_cast<std::size_t>(a)];
        std::sort(cells.begin(), cells.end(),
                  [](const StateSet& x, const StateSet& y) { return x.front() < y.front(); });
        epi.push_back(cells);
    }
    j["epistemic"] = std::move(epi);
    return j;
}

// ---------------------------------------------------------------------------
// Strategy wire format

inline json profile_to_json(const StrategyProfile& s) {
    json j;
    j["coalition"] = s.coalition;
    json choices = json::array();
    for (StateId q = 0; q < static_cast<StateId>(s.choices.empty() ? 0 : s.choices[0].size()); ++q)
        choices.push_back(json{{"state", q}, {"action", s.joint_at(q)}});
    j["choices"] = std::move(choices);
    return j;
}

inline StrategyProfile profile_from_json(const Model& m, const json& j) {
    detail::require_keys(j, {"coalition", "choices"}, "strategy");
    StrategyProfile s;
    s.coalition = j.at("coalition").get<std::vector<AgentId>>();
    if (s.coalition.empty()) throw std::runtime_error("strategy: empty coalition");
    s.choices.assign(s.coalition.size(), std::vector<ActionId>(static_cast<std::size_t>(m.num_states), -1));
    for (const auto& c : j.at("choices")) {
        detail::require_keys(c, {"state", "action"}, "strategy choice");
        StateId q = c.at("state").get<StateId>();
        auto acts = c.at("action").get<std::vector<ActionId>>();
        if (q < 0 || q >= m.num_states) throw std::runtime_error("strategy: state out of range");
        if (acts.size() != s.coalition.size()) throw std::runtime_error("strategy: one action per coalition member");
        for (std::size_t i = 0; i < s.coalition.size(); ++i) {
            if (m.action_position(s.coalition[i], q, acts[i]) < 0)
                throw std::runtime_error("strategy: illegal action " + std::to_string(acts[i]) + " for agent " +
                                         std::to_string(s.coalition[i]) + " at state " + std::to_string(q));
            s.choices[i][static_cast<std::size_t>(q)] = acts[i];
        }
    }
    for (std::size_t i = 0; i < s.coalition.size(); ++i)
        for (StateId q = 0; q < m.num_states; ++q)
            if (s.choices[i][static_cast<std::size_t>(q)] < 0)
                throw std::runtime_error("strategy: no choice for state " + std::to_string(q));
    return s;
}

inline json partial_to_json(const PartialStrategy& p) {
    json j;
    j["coalition"] = p.coalition;
    j["domain"] = p.domain();
    json choices = json::array();
    for (const auto& [q, joint] : p.choices) choices.push_back(json{{"state", q}, {"action", joint}});
    j["choices"] = std::move(choices);
    return j;
}

inline PartialStrategy partial_from_json(const Model& m, const json& j) {
    detail::require_keys(j, {"coalition", "domain", "choices"}, "partial strategy");
    PartialStrategy p;
    p.coalition = j.at("coalition").get<std::vector<AgentId>>();
    StateSet domain = j.at("domain").get<StateSet>();
    std::sort(domain.begin(), domain.end());
    for (const auto& c : j.at("choices")) {
        detail::require_keys(c, {"state", "action"}, "partial strategy choice");
        StateId q = c.at("state").get<StateId>();
        if (!set_contains(domain, q)) throw std::runtime_error("partial strategy: choice outside declared domain");
        auto acts = c.at("action").get<std::vector<ActionId>>();
        for (std::size_t i = 0; i < p.coalition.size(); ++i)
            if (m.action_position(p.coalition[i], q, acts[i]) < 0)
                throw std::runtime_error("partial strategy: illegal action at state " + std::to_string(q));
        p.choices[q] = std::move(acts);
    }
    for (StateId q : domain)
        if (!p.defined(q)) throw std::runtime_error("partial strategy: domain state without a choice");
    return p;
}

inline json records_to_json(const std::vector<PartialStrategyRecord>& records) {
    json out = json::array();
    for (const auto& rec : records) {
        json conflicts = json::array();
        for (const auto& [a, b] : rec.conflict_pairs) conflicts.push_back(json::array({a, b}));
        out.push_back(json{{"id", rec.info.id},
                           {"agent", rec.info.agent},
                           {"members", rec.info.members},
                           {"sigma", partial_to_json(rec.sigma)},
                           {"in", rec.in_states},
                           {"rdom", rec.rdom},
                           {"out", rec.out_states},
                           {"conflicts", std::move(conflicts)}});
    }
    return out;
}

// ---------------------------------------------------------------------------
// File helpers

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << '\n';
}

inline Model load_model_file(const std::string& path) { return model_from_json(read_json_file(path)); }

}  // namespace stratim

#endif
