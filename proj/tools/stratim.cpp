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

#include <iostream>

#include <CLI11.hpp>

#include "stratim/harness.hpp"

namespace {

using namespace stratim;

// Budget strings: "90s", "1500ms", "2m", or a bare number of seconds.
std::chrono::milliseconds parse_duration(const std::string& text) {
    std::size_t pos = 0;
    double value = std::stod(text, &pos);
    std::string unit = text.substr(pos);
    if (unit == "ms") return std::chrono::milliseconds(static_cast<long>(value));
    if (unit == "m") return std::chrono::milliseconds(static_cast<long>(value * 60000));
    if (unit.empty() || unit == "s") return std::chrono::milliseconds(static_cast<long>(value * 1000));
    throw CLI::ValidationError("duration", "cannot parse duration \"" + text + "\"");
}

struct GoalArgs {
    std::vector<AgentId> coalition{0};
    std::string target = "win";
    StateId initial = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--coalition", coalition, "coalition agents")->delimiter(',');
        cmd->add_option("--target", target, "target proposition");
        cmd->add_option("--initial", initial, "initial state");
    }
    ReachabilityGoal goal() const {
        ReachabilityGoal g{coalition, target, initial};
        std::sort(g.coalition.begin(), g.coalition.end());
        return g;
    }
};

void emit(const json& j, const std::string& out_path) {
    if (out_path.empty()) std::cout << j.dump(2) << '\n';
    else write_json_file(out_path, j);
}

json verdict_to_json(const BaselineVerdict& v) {
    json j{{"method", v.method == BaselineMethod::Brute ? "brute"
                      : v.method == BaselineMethod::LowerApprox ? "lower_approx" : "upper_approx"},
           {"answer", to_string(v.answer)},
           {"elapsed_ms", v.elapsed.count()},
           {"timed_out", v.timed_out}};
    if (v.witness) j["witness"] = profile_to_json(*v.witness);
    return j;
}

json trace_to_json(const OptimizationTrace& trace) {
    json per_sweep = json::array();
    for (const auto& s : trace.per_sweep)
        per_sweep.push_back(json{{"replacements", s.replacements}, {"conflict_pairs", s.conflict_pairs}});
    return json{{"sweeps", trace.sweeps},
                {"replacements", trace.replacements},
                {"rollbacks", trace.rollbacks},
                {"termination", to_string(trace.termination)},
                {"per_sweep", std::move(per_sweep)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"strategy synthesis and iterative improvement for imperfect-information reachability games"};
    app.require_subcommand(1);

    // generate-random ---------------------------------------------------
    auto* gr = app.add_subcommand("generate-random", "generate a random model");
    RandomModelSpec rspec;
    std::string gr_mode = "logarithmic";
    std::string gr_out, gr_spec_out;
    gr->add_option("--states", rspec.n_states, "number of states")->required();
    gr->add_option("--class-mode", gr_mode, "logarithmic|linear");
    gr->add_option("--seed", rspec.seed, "generator seed");
    gr->add_option("--connections", rspec.connections, "connection count (0 = auto)");
    gr->add_option("--actions", rspec.actions, "action count (0 = auto)");
    gr->add_option("--winning", rspec.winning, "winning state count (0 = auto)");
    gr->add_option("--repetitions", rspec.repetitions, "labeling rounds");
    gr->add_option("--class-bound", rspec.class_bound, "epistemic class size bound (0 = auto)");
    gr->add_option("--out", gr_out, "model output file");
    gr->add_option("--spec-out", gr_spec_out, "sidecar file recording all knobs");

    // generate-drone ----------------------------------------------------
    auto* gd = app.add_subcommand("generate-drone", "generate a drone air-quality model");
    DroneModelSpec dspec;
    std::string gd_out, gd_spec_out;
    gd->add_option("--map-size", dspec.map_size, "number of places")->required();
    gd->add_option("--drones", dspec.n_drones, "number of drones");
    gd->add_option("--energy", dspec.initial_energy, "initial energy (-1 = 2 x map size)");
    gd->add_option("--seed", dspec.seed, "generator seed");
    gd->add_option("--confusion", dspec.confusion, "fraction of GPS-confusable places");
    gd->add_option("--extra-edges", dspec.extra_edges, "extra map edges (-1 = auto)");
    gd->add_option("--out", gd_out, "model output file");
    gd->add_option("--spec-out", gd_spec_out, "sidecar file recording all knobs");

    // synth ---------------------------------------------------------------
    auto* sy = app.add_subcommand("synth", "synthesize a perfect-information strategy and its records");
    std::string sy_model, sy_out, sy_records;
    std::uint64_t sy_seed = 0;
    GoalArgs sy_goal;
    sy->add_option("--model", sy_model, "model file")->required();
    sy_goal.attach(sy);
    sy->add_option("--seed", sy_seed, "profile randomization seed");
    sy->add_option("--out", sy_out, "strategy output file");
    sy->add_option("--records", sy_records, "partial-strategy records output file");

    // optimize ------------------------------------------------------------
    auto* op = app.add_subcommand("optimize", "synthesize and iteratively improve a strategy");
    std::string op_model, op_out, op_trace;
    std::string op_synth_budget = "30s", op_opt_budget = "60s";
    OptimizerConfig op_cfg;
    GoalArgs op_goal;
    op->add_option("--model", op_model, "model file")->required();
    op_goal.attach(op);
    op->add_option("--seed", op_cfg.seed, "profile randomization seed");
    op->add_option("--synth-budget", op_synth_budget, "synthesis budget (default 30s)");
    op->add_option("--opt-budget", op_opt_budget, "optimization budget (default 60s)");
    op->add_option("--candidate-budget", op_cfg.candidate_budget, "candidate evaluations per record search");
    op->add_option("--exhaustive-threshold", op_cfg.exhaustive_threshold,
                   "largest candidate space searched exhaustively");
    op->add_option("--max-sweeps", op_cfg.max_sweeps, "sweep cap");
    op->add_flag("--verify-sweeps,!--no-verify-sweeps", op_cfg.verify_each_sweep,
                 "verify and roll back losing sweeps (default on)");
    op->add_option("--out", op_out, "strategy output file");
    op->add_option("--trace", op_trace, "optimization trace output file");

    // verify ----------------------------------------------------------------
    auto* ve = app.add_subcommand("verify", "check a strategy; exit 0 winning-uniform, 1 winning, 2 not winning");
    std::string ve_model, ve_strategy, ve_mode = "imperfect";
    GoalArgs ve_goal;
    ve->add_option("--model", ve_model, "model file")->required();
    ve->add_option("--strategy", ve_strategy, "strategy file")->required();
    ve_goal.attach(ve);
    ve->add_option("--mode", ve_mode, "perfect|imperfect info semantics");

    // brute / approx ----------------------------------------------------
    auto* br = app.add_subcommand("brute", "exhaustive uniform-strategy search");
    std::string br_model, br_out, br_budget = "90s";
    GoalArgs br_goal;
    br->add_option("--model", br_model, "model file")->required();
    br_goal.attach(br);
    br->add_option("--budget", br_budget, "search budget");
    br->add_option("--out", br_out, "verdict output file");

    auto* ap = app.add_subcommand("approx", "sound/complete approximation pair");
    std::string ap_model, ap_out;
    GoalArgs ap_goal;
    ap->add_option("--model", ap_model, "model file")->required();
    ap_goal.attach(ap);
    ap->add_option("--out", ap_out, "verdict output file");

    // bench ----------------------------------------------------------------
    auto* be = app.add_subcommand("bench", "run an experiment suite from a config file");
    std::string be_config, be_out_dir;
    int be_workers = 1;
    bool be_no_timing = false;
    be->add_option("--config", be_config, "suite config JSON")->required();
    be->add_option("--out-dir", be_out_dir, "artifact/report directory")->required();
    be->add_option("--workers", be_workers, "worker threads");
    be->add_flag("--no-timing", be_no_timing, "zero all wall-clock columns");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*gr) {
            rspec.class_size_mode = gr_mode == "linear" ? ClassSizeMode::Linear : ClassSizeMode::Logarithmic;
            auto inst = gen_random(rspec);
            emit(model_to_json(inst.model), gr_out);
            if (!gr_spec_out.empty())
                write_json_file(gr_spec_out, json{{"family", "random"},
                                                  {"n_states", rspec.n_states},
                                                  {"class_mode", to_string(rspec.class_size_mode)},
                                                  {"seed", rspec.seed},
                                                  {"connections", rspec.derived_connections()},
                                                  {"actions", rspec.derived_actions()},
                                                  {"winning", rspec.derived_winning()},
                                                  {"repetitions", rspec.repetitions},
                                                  {"class_bound", rspec.derived_class_bound()}});
        } else if (*gd) {
            auto inst = gen_drone(dspec);
            emit(model_to_json(inst.model), gd_out);
            if (!gd_spec_out.empty())
                write_json_file(gd_spec_out, json{{"family", "drone"},
                                                  {"map_size", dspec.map_size},
                                                  {"n_drones", dspec.n_drones},
                                                  {"initial_energy", dspec.derived_energy()},
                                                  {"seed", dspec.seed},
                                                  {"confusion", dspec.confusion},
                                                  {"extra_edges", dspec.extra_edges}});
        } else if (*sy) {
            Model m = load_model_file(sy_model);
            auto goal = sy_goal.goal();
            check_goal(m, goal);
            auto synth = synthesize(m, goal, sy_seed);
            if (!synth) {
                std::cerr << "unrealizable: no perfect-information winning strategy from state " << goal.initial_state
                          << "\n";
                return 1;
            }
            emit(profile_to_json(synth->profile), sy_out);
            if (!sy_records.empty()) {
                json lists = json::array();
                for (const auto& list : synth->records) lists.push_back(records_to_json(list));
                write_json_file(sy_records, lists.size() == 1 ? lists[0] : lists);
            }
        } else if (*op) {
            Model m = load_model_file(op_model);
            auto goal = op_goal.goal();
            check_goal(m, goal);
            op_cfg.synth_budget = parse_duration(op_synth_budget);
            op_cfg.optimize_budget = parse_duration(op_opt_budget);
            auto trace = optimize_coal(m, goal, op_cfg);
            if (!trace) {
                std::cerr << "unrealizable: no perfect-information winning strategy from state " << goal.initial_state
                          << "\n";
                return 1;
            }
            emit(profile_to_json(trace->final_profile), op_out);
            if (!op_trace.empty()) write_json_file(op_trace, trace_to_json(*trace));
            std::cerr << "sweeps=" << trace->sweeps << " replacements=" << trace->replacements
                      << " termination=" << to_string(trace->termination)
                      << " ep=" << metric_ep(m, goal, trace->final_profile) << "\n";
        } else if (*ve) {
            Model m = load_model_file(ve_model);
            auto goal = ve_goal.goal();
            check_goal(m, goal);
            StrategyProfile s = profile_from_json(m, read_json_file(ve_strategy));
            InfoMode mode = ve_mode == "perfect" ? InfoMode::PerfectInfo : InfoMode::ImperfectInfo;
            auto win = verify_winning(m, goal, s, mode);
            if (!win.winning) {
                std::cout << "not winning; counterexample lasso:";
                for (StateId q : win.lasso) std::cout << ' ' << q;
                std::cout << " (cycle from position " << win.cycle_start << ")\n";
                return 2;
            }
            StateSet reachable = reach(m, initial_class_union(m, goal.coalition, goal.initial_state), s);
            auto uni = verify_uniform(m, goal.coalition, s, reachable);
            if (!uni.uniform) {
                std::cout << "winning but not uniform; " << uni.violations.size() << " violating pair(s), first: agent "
                          << uni.violations[0].agent << " states " << uni.violations[0].q1 << "/"
                          << uni.violations[0].q2 << "\n";
                return 1;
            }
            std::cout << "winning and uniform\n";
            return 0;
        } else if (*br) {
            Model m = load_model_file(br_model);
            auto goal = br_goal.goal();
            check_goal(m, goal);
            auto verdict = brute_force_uniform(m, goal, parse_duration(br_budget));
            emit(verdict_to_json(verdict), br_out);
        } else if (*ap) {
            Model m = load_model_file(ap_model);
            auto goal = ap_goal.goal();
            check_goal(m, goal);
            auto [lower, upper] = approx_bounds(m, goal);
            emit(json{{"lower", verdict_to_json(lower)},
                      {"upper", verdict_to_json(upper)},
                      {"conclusive", approx_conclusive(lower, upper)}},
                 ap_out);
        } else if (*be) {
            SuiteConfig suite = suite_config_from_json(read_json_file(be_config));
            ExperimentReport report = run_suite(suite, be_out_dir, be_workers, be_no_timing);
            namespace fs = std::filesystem;
            fs::create_directories(be_out_dir);
            std::ofstream csv(fs::path(be_out_dir) / "report.csv");
            csv << report_to_csv(report);
            write_json_file((fs::path(be_out_dir) / "report.json").string(), report_to_json(report));
            int failed = 0;
            for (const auto& row : report.rows)
                if (!row.error.empty()) ++failed;
            std::cerr << report.rows.size() << " instance(s), " << failed << " failed\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
