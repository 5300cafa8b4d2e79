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

#ifndef STRATIM_HARNESS_HPP
#define STRATIM_HARNESS_HPP

#include <atomic>
#include <filesystem>
#include <thread>

#include "stratim/baselines.hpp"
#include "stratim/benchgen.hpp"
#include "stratim/metrics.hpp"
#include "stratim/model_io.hpp"
#include "stratim/optimizer.hpp"

namespace stratim {

struct BenchmarkConfig {
    std::string id;
    std::string family;  // "random" | "drone"
    RandomModelSpec random;
    DroneModelSpec drone;
    std::vector<std::uint64_t> seeds;
    OptimizerConfig opt;
    bool run_baselines = false;
    std::chrono::milliseconds baseline_budget{90000};
    double brute_max_bits = 22.0;  // skip brute when the search space is bigger
};

struct SuiteConfig {
    std::string name;
    std::vector<BenchmarkConfig> configurations;
};

struct InstanceRow {
    std::string config;
    std::uint64_t seed = 0;
    std::string error;  // nonempty = the instance failed; other fields best-effort
    bool realizable = false;
    int st = 0;
    long gen_ms = 0, synth_ms = 0, opt_ms = 0;
    int str_before = 0, ep_before = 0;
    int str_after = 0, ep_after = 0;
    int sweeps = 0;
    long replacements = 0;
    std::string termination;
    bool ir = false;  // ep_after == 0 and imperfect-info verification passed
    std::string brute_answer;  // "", "skipped", "true", "false", "inconclusive"
    long brute_ms = 0;
    std::string lower_answer, upper_answer;
    bool approx_conclusive_flag = false;
    long approx_ms = 0;
};

struct AggregateRow {
    std::string config;
    int instances = 0;
    int realizable = 0;
    double mean_st = 0, mean_gen_ms = 0, mean_synth_ms = 0, mean_opt_ms = 0;
    double mean_str_before = 0, mean_ep_before = 0, mean_str_after = 0, mean_ep_after = 0;
    double ir_fraction = 0;
    double conclusive_fraction = 0;
};

struct ExperimentReport {
    std::vector<InstanceRow> rows;
    std::vector<AggregateRow> aggregates;
};

// ---------------------------------------------------------------------------
// Config parsing

inline BenchmarkConfig benchmark_config_from_json(const json& j) {
    BenchmarkConfig c;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        const json& v = it.value();
        if (k == "id") c.id = v.get<std::string>();
        else if (k == "family") c.family = v.get<std::string>();
        else if (k == "seeds") c.seeds = v.get<std::vector<std::uint64_t>>();
        else if (k == "synth_budget_ms") c.opt.synth_budget = std::chrono::milliseconds(v.get<long>());
        else if (k == "opt_budget_ms") c.opt.optimize_budget = std::chrono::milliseconds(v.get<long>());
        else if (k == "candidate_budget") c.opt.candidate_budget = v.get<long>();
        else if (k == "exhaustive_threshold") c.opt.exhaustive_threshold = v.get<long>();
        else if (k == "verify_sweeps") c.opt.verify_each_sweep = v.get<bool>();
        else if (k == "max_sweeps") c.opt.max_sweeps = v.get<int>();
        else if (k == "run_baselines") c.run_baselines = v.get<bool>();
        else if (k == "baseline_budget_ms") c.baseline_budget = std::chrono::milliseconds(v.get<long>());
        else if (k == "brute_max_bits") c.brute_max_bits = v.get<double>();
        else if (k == "random") {
            for (auto rit = v.begin(); rit != v.end(); ++rit) {
                const std::string& rk = rit.key();
                if (rk == "n_states") c.random.n_states = rit.value().get<int>();
                else if (rk == "class_mode")
                    c.random.class_size_mode = rit.value().get<std::string>() == "linear" ? ClassSizeMode::Linear
                                                                                          : ClassSizeMode::Logarithmic;
                else if (rk == "connections") c.random.connections = rit.value().get<int>();
                else if (rk == "actions") c.random.actions = rit.value().get<int>();
                else if (rk == "winning") c.random.winning = rit.value().get<int>();
                else if (rk == "repetitions") c.random.repetitions = rit.value().get<int>();
                else if (rk == "class_bound") c.random.class_bound = rit.value().get<int>();
                else throw std::runtime_error("suite config: unknown random knob \"" + rk + "\"");
            }
        } else if (k == "drone") {
            for (auto dit = v.begin(); dit != v.end(); ++dit) {
                const std::string& dk = dit.key();
                if (dk == "map_size") c.drone.map_size = dit.value().get<int>();
                else if (dk == "n_drones") c.drone.n_drones = dit.value().get<int>();
                else if (dk == "initial_energy") c.drone.initial_energy = dit.value().get<int>();
                else if (dk == "confusion") c.drone.confusion = dit.value().get<double>();
                else if (dk == "extra_edges") c.drone.extra_edges = dit.value().get<int>();
                else throw std::runtime_error("suite config: unknown drone knob \"" + dk + "\"");
            }
        } else {
            throw std::runtime_error("suite config: unknown field \"" + k + "\"");
        }
    }
    if (c.id.empty()) throw std::runtime_error("suite config: configuration without id");
    if (c.family != "random" && c.family != "drone")
        throw std::runtime_error("suite config: family must be \"random\" or \"drone\"");
    return c;
}

inline SuiteConfig suite_config_from_json(const json& j) {
    detail::require_keys(j, {"name", "configurations"}, "suite config");
    SuiteConfig s;
    s.name = j.at("name").get<std::string>();
    for (const auto& c : j.at("configurations")) s.configurations.push_back(benchmark_config_from_json(c));
    return s;
}

// ---------------------------------------------------------------------------
// Running

namespace detail {

struct InstanceArtifacts {
    json model, strategy, trace;
    bool have = false;
};

inline InstanceRow run_instance(const BenchmarkConfig& cfg, std::uint64_t seed, bool no_timing,
                                InstanceArtifacts* artifacts) {
    InstanceRow row;
    row.config = cfg.id;
    row.seed = seed;
    try {
        auto t0 = std::chrono::steady_clock::now();
        GeneratedInstance inst;
        if (cfg.family == "random") {
            RandomModelSpec spec = cfg.random;
            spec.seed = seed;
            inst = gen_random(spec);
        } else {
            DroneModelSpec spec = cfg.drone;
            spec.seed = seed;
            inst = gen_drone(spec);
        }
        auto t1 = std::chrono::steady_clock::now();
        row.gen_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
        row.st = inst.model.num_states;

        OptimizerConfig opt = cfg.opt;
        opt.seed = seed;

        auto synth = synthesize(inst.model, inst.goal, seed);
        auto t2 = std::chrono::steady_clock::now();
        row.synth_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t2 - t1).count();
        row.realizable = synth.has_value();
        if (row.synth_ms > cfg.opt.synth_budget.count()) {
            row.error = "synthesis budget exceeded";
            if (no_timing) row.gen_ms = row.synth_ms = 0;
            return row;
        }

        if (synth) {
            row.str_before = metric_str(inst.model, inst.goal, synth->profile);
            row.ep_before = metric_ep(inst.model, inst.goal, synth->profile);

            auto t3 = std::chrono::steady_clock::now();
            OptimizationTrace trace = optimize(inst.model, inst.goal, *synth, opt);
            auto t4 = std::chrono::steady_clock::now();
            row.opt_ms = std::chrono::duration_cast<std::chrono::milliseconds>(t4 - t3).count();

            row.str_after = metric_str(inst.model, inst.goal, trace.final_profile);
            row.ep_after = metric_ep(inst.model, inst.goal, trace.final_profile);
            row.sweeps = trace.sweeps;
            row.replacements = trace.replacements;
            row.termination = to_string(trace.termination);
            row.ir = row.ep_after == 0 &&
                     verify_winning(inst.model, inst.goal, trace.final_profile, InfoMode::ImperfectInfo).winning;

            if (artifacts) {
                artifacts->model = model_to_json(inst.model);
                artifacts->strategy = profile_to_json(trace.final_profile);
                json per_sweep = json::array();
                for (const auto& s : trace.per_sweep)
                    per_sweep.push_back(json{{"replacements", s.replacements}, {"conflict_pairs", s.conflict_pairs}});
                artifacts->trace = json{{"sweeps", trace.sweeps},
                                        {"replacements", trace.replacements},
                                        {"rollbacks", trace.rollbacks},
                                        {"termination", row.termination},
                                        {"per_sweep", std::move(per_sweep)}};
                artifacts->have = true;
            }
        }

        if (cfg.run_baselines) {
            if (uniform_search_bits(inst.model, inst.goal) <= cfg.brute_max_bits) {
                auto verdict = brute_force_uniform(inst.model, inst.goal, cfg.baseline_budget);
                row.brute_answer = to_string(verdict.answer);
                row.brute_ms = verdict.elapsed.count();
            } else {
                row.brute_answer = "skipped";
            }
            auto t5 = std::chrono::steady_clock::now();
            auto [lower, upper] = approx_bounds(inst.model, inst.goal);
            row.lower_answer = to_string(lower.answer);
            row.upper_answer = to_string(upper.answer);
            row.approx_conclusive_flag = approx_conclusive(lower, upper);
            row.approx_ms =
                std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t5).count();
        }
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    if (no_timing) row.gen_ms = row.synth_ms = row.opt_ms = row.brute_ms = row.approx_ms = 0;
    return row;
}

}  // namespace detail

/**
 * Run every (configuration, seed) instance, optionally in a worker pool.
 * Aggregates are computed over realizable instances only; unrealizable and
 * failed instances stay in the per-instance rows. Deterministic modulo the
 * wall-clock columns; pass no_timing to zero those for byte-exact diffs.
 * When out_dir is nonempty, per-instance model/strategy/trace JSON artifacts
 * are written under out_dir/<config>/<seed>/.
 */
inline ExperimentReport run_suite(const SuiteConfig& suite, const std::string& out_dir = "", int workers = 1,
                                  bool no_timing = false) {
    struct Job {
        const BenchmarkConfig* cfg;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (const auto& cfg : suite.configurations)
        for (std::uint64_t seed : cfg.seeds) jobs.push_back({&cfg, seed});

    ExperimentReport report;
    report.rows.resize(jobs.size());
    std::vector<detail::InstanceArtifacts> artifacts(out_dir.empty() ? 0 : jobs.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= jobs.size()) return;
            report.rows[i] = detail::run_instance(*jobs[i].cfg, jobs[i].seed, no_timing,
                                                  out_dir.empty() ? nullptr : &artifacts[i]);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    if (!out_dir.empty()) {
        namespace fs = std::filesystem;
        for (std::size_t i = 0; i < jobs.size(); ++i) {
            if (!artifacts[i].have) continue;
            fs::path dir = fs::path(out_dir) / jobs[i].cfg->id / std::to_string(jobs[i].seed);
            fs::create_directories(dir);
            write_json_file((dir / "model.json").string(), artifacts[i].model);
            write_json_file((dir / "strategy.json").string(), artifacts[i].strategy);
            write_json_file((dir / "trace.json").string(), artifacts[i].trace);
        }
    }

    for (const auto& cfg : suite.configurations) {
        AggregateRow agg;
        agg.config = cfg.id;
        int conclusive = 0, with_baseline = 0;
        for (const auto& row : report.rows) {
            if (row.config != cfg.id) continue;
            ++agg.instances;
            if (!row.realizable || !row.error.empty()) continue;
            ++agg.realizable;
            agg.mean_st += row.st;
            agg.mean_gen_ms += static_cast<double>(row.gen_ms);
            agg.mean_synth_ms += static_cast<double>(row.synth_ms);
            agg.mean_opt_ms += static_cast<double>(row.opt_ms);
            agg.mean_str_before += row.str_before;
            agg.mean_ep_before += row.ep_before;
            agg.mean_str_after += row.str_after;
            agg.mean_ep_after += row.ep_after;
            agg.ir_fraction += row.ir ? 1 : 0;
            if (!row.lower_answer.empty()) {
                ++with_baseline;
                conclusive += row.approx_conclusive_flag ? 1 : 0;
            }
        }
        if (agg.realizable > 0) {
            double r = agg.realizable;
            agg.mean_st /= r;
            agg.mean_gen_ms /= r;
            agg.mean_synth_ms /= r;
            agg.mean_opt_ms /= r;
            agg.mean_str_before /= r;
            agg.mean_ep_before /= r;
            agg.mean_str_after /= r;
            agg.mean_ep_after /= r;
            agg.ir_fraction /= r;
        }
        agg.conclusive_fraction = with_baseline > 0 ? static_cast<double>(conclusive) / with_baseline : 0.0;
        report.aggregates.push_back(agg);
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report rendering. Column order is fixed; see README.

inline std::string report_to_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "config,seed,st,realizable,gen_ms,synth_ms,opt_ms,str_before,ep_before,str_after,ep_after,"
          "sweeps,replacements,termination,ir,brute_answer,brute_ms,lower_answer,upper_answer,"
          "approx_conclusive,approx_ms,error\n";
    for (const auto& r : report.rows) {
        os << r.config << ',' << r.seed << ',' << r.st << ',' << (r.realizable ? 1 : 0) << ',' << r.gen_ms << ','
           << r.synth_ms << ',' << r.opt_ms << ',' << r.str_before << ',' << r.ep_before << ',' << r.str_after << ','
           << r.ep_after << ',' << r.sweeps << ',' << r.replacements << ',' << r.termination << ','
           << (r.ir ? 1 : 0) << ',' << r.brute_answer << ',' << r.brute_ms << ',' << r.lower_answer << ','
           << r.upper_answer << ',' << (r.approx_conclusive_flag ? 1 : 0) << ',' << r.approx_ms << ',' << r.error
           << '\n';
    }
    // Aggregate rows reuse the per-instance columns: seed = "aggregate",
    // st..ep_after hold means over realizable instances, realizable holds the
    // realizable count, sweeps the instance count, ir the %ir fraction and
    // approx_conclusive the conclusive fraction.
    char buf[64];
    for (const auto& a : report.aggregates) {
        auto num = [&](double v) {
            std::snprintf(buf, sizeof buf, "%.6f", v);
            return std::string(buf);
        };
        os << a.config << ",aggregate," << num(a.mean_st) << ',' << a.realizable << ',' << num(a.mean_gen_ms) << ','
           << num(a.mean_synth_ms) << ',' << num(a.mean_opt_ms) << ',' << num(a.mean_str_before) << ','
           << num(a.mean_ep_before) << ',' << num(a.mean_str_after) << ',' << num(a.mean_ep_after) << ','
           << a.instances << ",,," << num(a.ir_fraction) << ",,,,," << num(a.conclusive_fraction) << ",,\n";
    }
    return os.str();
}

inline json report_to_json(const ExperimentReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back(json{{"config", r.config},
                            {"seed", r.seed},
                            {"st", r.st},
                            {"realizable", r.realizable},
                            {"gen_ms", r.gen_ms},
                            {"synth_ms", r.synth_ms},
                            {"opt_ms", r.opt_ms},
                            {"str_before", r.str_before},
                            {"ep_before", r.ep_before},
                            {"str_after", r.str_after},
                            {"ep_after", r.ep_after},
                            {"sweeps", r.sweeps},
                            {"replacements", r.replacements},
                            {"termination", r.termination},
                            {"ir", r.ir},
                            {"brute_answer", r.brute_answer},
                            {"brute_ms", r.brute_ms},
                            {"lower_answer", r.lower_answer},
                            {"upper_answer", r.upper_answer},
                            {"approx_conclusive", r.approx_conclusive_flag},
                            {"approx_ms", r.approx_ms},
                            {"error", r.error}});
    }
    json aggs = json::array();
    for (const auto& a : report.aggregates) {
        aggs.push_back(json{{"config", a.config},
                            {"instances", a.instances},
                            {"realizable", a.realizable},
                            {"mean_st", a.mean_st},
                            {"mean_gen_ms", a.mean_gen_ms},
                            {"mean_synth_ms", a.mean_synth_ms},
                            {"mean_opt_ms", a.mean_opt_ms},
                            {"mean_str_before", a.mean_str_before},
                            {"mean_ep_before", a.mean_ep_before},
                            {"mean_str_after", a.mean_str_after},
                            {"mean_ep_after", a.mean_ep_after},
                            {"ir_fraction", a.ir_fraction},
                            {"conclusive_fraction", a.conclusive_fraction}});
    }
    return json{{"rows", std::move(rows)}, {"aggregates", std::move(aggs)}};
}

}  // namespace stratim

#endif
