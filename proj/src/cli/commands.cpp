#include "cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "cbo/dynamics.hpp"
#include "cbo/parallel.hpp"
#include "cbo/rng.hpp"

namespace cbo::cli {
namespace {

Objective make_objective(const RunConfig& c) {
    return registry_get(c.objective, c.params.dim, c.objective_params);
}

std::unique_ptr<std::ofstream> open_output(const std::string& path) {
    auto f = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*f) throw std::runtime_error("cannot write '" + path + "'");
    return f;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

RunSummary run_seed_index(const RunConfig& c, std::size_t seed_index,
                          std::vector<StepRecord>* records, const RecordHook& hook) {
    RunSummary s;
    s.seed_index = seed_index;
    s.run_seed = derive_seed(c.seed, seed_index);
    const auto started = std::chrono::steady_clock::now();
    try {
        const Objective objective = make_objective(c);
        StopCriteria stop;
        stop.max_steps = c.max_steps;
        stop.diameter_tol = c.diameter_tol;
        const Trajectory traj = run_from_seed(c.params, objective, c.init_low, c.init_high, stop,
                                              s.run_seed, c.record_stride, c.init_seed, hook);
        const StepRecord& last = traj.records.back();
        s.steps = traj.steps;
        s.stop_reason = std::string(to_string(traj.reason));
        s.final_diameter = last.diameter;
        s.final_consensus = last.consensus_point;
        s.final_objective = last.objective_at_consensus;
        if (objective.known_min_point) {
            double sq = 0.0;
            for (std::size_t l = 0; l < last.consensus_point.size(); ++l) {
                const double u = last.consensus_point[l] - (*objective.known_min_point)[l];
                sq += u * u;
            }
            s.distance_to_minimizer = std::sqrt(sq);
        }
        if (records) *records = traj.records;
    } catch (const Error& e) {
        s.ok = false;
        s.error = e.what();
    }
    s.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return s;
}

int cmd_run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    std::unique_ptr<std::ofstream> positions;
    RecordHook hook;
    if (!c.out_positions.empty()) {
        positions = open_output(c.out_positions);
        *positions << "step,time,particle";
        for (std::size_t l = 1; l <= c.params.dim; ++l) *positions << ",x_" << l;
        *positions << "\n";
        hook = [&](const Ensemble& e, const StepRecord&) {
            for (std::size_t i = 0; i < e.size(); ++i) {
                *positions << e.step() << "," << format_number(e.time()) << "," << i;
                for (std::size_t l = 0; l < e.dim(); ++l) *positions << "," << format_number(e.position(i, l));
                *positions << "\n";
            }
        };
    }
    std::vector<StepRecord> records;
    const RunSummary s = run_seed_index(c, 0, &records, hook);
    if (!s.ok) {
        err << "run failed: " << s.error << "\n";
        if (!c.out_jsonl.empty()) *open_output(c.out_jsonl) << to_json(s).dump() << "\n";
        out << to_json(s).dump() << "\n";
        return failure;
    }

    std::unique_ptr<std::ofstream> csv_file;
    if (!c.out_csv.empty()) csv_file = open_output(c.out_csv);
    std::ostream& csv = csv_file ? *csv_file : out;
    csv << csv_header(c.params.dim) << "\n";
    for (const auto& r : records) csv << csv_row(r) << "\n";

    if (!c.out_jsonl.empty()) {
        auto jl = open_output(c.out_jsonl);
        for (const auto& r : records) *jl << to_json(r).dump() << "\n";
        *jl << to_json(s).dump() << "\n";
    }
    out << to_json(s).dump() << "\n";
    err << fmt::format("seed {} : {} steps, stop {}, L(X*) = {:.6g}, {:.3f} s\n", c.seed, s.steps,
                       s.stop_reason, s.final_objective, s.wall_seconds);
    return ok;
}

int cmd_ensemble(const RunConfig& c, std::size_t n_seeds, unsigned jobs, std::ostream& out,
                 std::ostream& err) {
    if (n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
    std::vector<RunSummary> rows(n_seeds);
    parallel_for_index(n_seeds, jobs, [&](std::size_t k) { rows[k] = run_seed_index(c, k, nullptr); });

    std::vector<double> finals, steps;
    std::size_t successes = 0, with_distance = 0, failed = 0;
    for (const auto& s : rows) {
        if (!s.ok) {
            ++failed;
            err << "seed " << s.seed_index << " failed: " << s.error << "\n";
            continue;
        }
        finals.push_back(s.final_objective);
        steps.push_back(static_cast<double>(s.steps));
        if (s.distance_to_minimizer) {
            ++with_distance;
            if (*s.distance_to_minimizer <= c.success_radius) ++successes;
        }
    }

    nlohmann::ordered_json agg;
    agg["kind"] = "aggregate";
    agg["n_seeds"] = n_seeds;
    agg["succeeded"] = n_seeds - failed;
    agg["failed"] = failed;
    if (!finals.empty()) {
        agg["median_final_objective"] = median(finals);
        agg["min_final_objective"] = *std::min_element(finals.begin(), finals.end());
        double mean_steps = 0.0;
        for (double s : steps) mean_steps += s;
        agg["mean_steps"] = mean_steps / static_cast<double>(steps.size());
    }
    agg["success_radius"] = c.success_radius;
    if (with_distance > 0)
        agg["success_rate"] = static_cast<double>(successes) / static_cast<double>(with_distance);
    else
        agg["success_rate"] = nullptr;

    std::unique_ptr<std::ofstream> jl;
    if (!c.out_jsonl.empty()) jl = open_output(c.out_jsonl);
    for (const auto& s : rows) {
        const std::string line = to_json(s).dump();
        out << line << "\n";
        if (jl) *jl << line << "\n";
    }
    out << agg.dump() << "\n";
    if (jl) *jl << agg.dump() << "\n";

    if (!c.out_csv.empty()) {
        auto csv = open_output(c.out_csv);
        *csv << "seed_index,run_seed,ok,steps,stop_reason,final_diameter,final_objective,"
                "distance_to_minimizer";
        for (std::size_t l = 1; l <= c.params.dim; ++l) *csv << ",cons_" << l;
        *csv << "\n";
        for (const auto& s : rows) {
            *csv << s.seed_index << "," << s.run_seed << "," << (s.ok ? 1 : 0);
            if (!s.ok) {
                *csv << ",,,,,";
                for (std::size_t l = 0; l < c.params.dim; ++l) *csv << ",";
                *csv << "\n";
                continue;
            }
            *csv << "," << s.steps << "," << s.stop_reason << "," << format_number(s.final_diameter)
                 << "," << format_number(s.final_objective) << ","
                 << (s.distance_to_minimizer ? format_number(*s.distance_to_minimizer) : "");
            for (double x : s.final_consensus) *csv << "," << format_number(x);
            *csv << "\n";
        }
    }
    return failed == 0 ? ok : failure;
}

int cmd_verify(const std::string& suite, const VerifyConfig& config,
               const std::string& jsonl_path, std::ostream& out, std::ostream& err) {
    std::vector<TheoremId> ids;
    if (suite == "all") {
        ids = all_theorem_ids();
    } else if (const auto id = parse_theorem_id(suite)) {
        ids = {*id};
    } else {
        throw ConfigError("unknown suite '" + suite + "'");
    }
    std::unique_ptr<std::ofstream> jl;
    if (!jsonl_path.empty()) jl = open_output(jsonl_path);

    std::size_t failed = 0;
    for (TheoremId id : ids) {
        const auto started = std::chrono::steady_clock::now();
        VerificationReport rep;
        try {
            rep = verify_theorem(id, config);
        } catch (const ParamError& e) {
            throw ConfigError(std::string(to_string(id)) + ": " + e.what());
        } catch (const Error& e) {
            err << to_string(id) << ": " << e.what() << "\n";
            ++failed;
            continue;
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        if (rep.verdict == Verdict::fail) ++failed;
        out << report_line(rep) << "\n";
        err << fmt::format("{} took {:.2f} s\n", to_string(id), secs);
        if (jl) *jl << to_json(rep).dump() << "\n";
    }
    return failed == 0 ? ok : failure;
}

int cmd_conditions(const RunConfig& c, std::size_t draws, std::ostream& out) {
    const Objective objective = make_objective(c);
    RngStream rng(derive_seed(c.seed, 0), 2);
    const InitStats stats =
        estimate_init_stats(c.params, objective, c.init_low, c.init_high, draws, rng);
    const ConditionReport rep = check_conditions(c.params, objective, stats);

    out << fmt::format("parameters: lambda={} sigma={} h={} beta={} N={} d={} scheme={}\n",
                       c.params.lambda, c.params.sigma, c.params.h, c.params.beta,
                       c.params.n_particles, c.params.dim, to_string(c.params.scheme));
    for (const auto& chk : rep.checks) {
        const char* status = !chk.applicable ? "n/a " : chk.holds ? "ok  " : "FAIL";
        out << fmt::format("{} {:<26} {:<34} margin={:.6g}\n", status, chk.name, chk.inequality,
                           chk.margin);
    }
    out << fmt::format("decay margin m = {:.17g}\n", rep.decay_margin);
    out << fmt::format("initial data ({} draws): log E exp(-beta L) = {:.6g} (rel SE {:.3g}), "
                       "spread = {:.6g} (SE {:.3g})\n",
                       stats.draws, stats.log_gibbs_expectation, stats.gibbs_rel_std_error,
                       stats.spread, stats.spread_std_error);
    const auto& m = rep.minimizer;
    out << "minimizer condition: " << to_string(m.status);
    if (m.eps_max) out << fmt::format(", estimated eps_max = {:.6g}", *m.eps_max);
    if (m.log_lhs && m.log_rhs)
        out << fmt::format(" (log lhs {:.6g}, log rhs {:.6g})", *m.log_lhs, *m.log_rhs);
    out << "\n";
    if (!m.note.empty()) out << "note: " << m.note << "\n";
    return ok;
}

int cmd_list_objectives(std::ostream& out) {
    for (const auto& info : list_objectives()) {
        std::string params;
        for (const auto& p : info.required_params) params += (params.empty() ? "" : ",") + p;
        out << fmt::format("{:<10} params=[{}]  {}\n", info.name, params, info.description);
    }
    return ok;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Consensus-based optimization simulator and verification harness", "cbo"};
    app.require_subcommand(1);

    std::string config_path;
    std::map<std::string, std::string> overrides;
    // "-h" would clash with the step-size key.
    app.set_help_flag("--help", "print help");
    auto add_keys = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print help");
        sub->add_option("--config", config_path, "key=value config file");
        for (const auto& key : known_keys())
            sub->add_option("--" + key, overrides[key], "overrides config key " + key);
    };

    auto* run = app.add_subcommand("run", "one seeded run, CSV trajectory");
    add_keys(run);

    std::size_t n_seeds = 20;
    unsigned jobs = 1;
    auto* ens = app.add_subcommand("ensemble", "seeds 0..n-1, summary table");
    add_keys(ens);
    ens->add_option("--n-seeds", n_seeds, "number of seeds")->check(CLI::PositiveNumber);
    ens->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

    std::string suite = "all";
    std::optional<std::size_t> runs;
    std::optional<std::int64_t> steps;
    std::vector<double> betas;
    std::optional<std::size_t> sweep_seeds;
    auto* ver = app.add_subcommand("verify", "closed-form checks of the consensus theorems");
    add_keys(ver);
    ver->add_option("--suite", suite,
                    "all, thm31, thm32, thm33, thm34i, thm34ii, thm34iii or laplace");
    ver->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    ver->add_option("--runs", runs, "Monte Carlo paths");
    ver->add_option("--steps", steps, "steps per path");
    ver->add_option("--betas", betas, "inverse temperatures for the laplace sweep")->delimiter(',');
    ver->add_option("--sweep-seeds", sweep_seeds, "seeds per beta in the laplace sweep");

    std::size_t draws = 10000;
    auto* cond = app.add_subcommand("conditions", "parameter-regime and minimizer conditions");
    add_keys(cond);
    cond->add_option("--draws", draws, "initial ensembles drawn for the Monte Carlo estimates");

    auto* list = app.add_subcommand("list-objectives", "registered objectives");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return config_error;
    }

    try {
        if (list->parsed()) return cmd_list_objectives(out);

        KeyValues kv;
        if (!config_path.empty()) kv = read_config_file(config_path);
        for (const auto& key : known_keys()) {
            const auto* sub = app.get_subcommands().front();
            if (sub->count("--" + key) > 0) kv[key] = {overrides[key], "command line"};
        }

        if (ver->parsed()) {
            VerifyConfig vc = build_verify_config(kv);
            vc.jobs = jobs;
            vc.runs = runs;
            vc.steps = steps;
            if (!betas.empty()) vc.betas = betas;
            if (sweep_seeds) vc.sweep_seeds = *sweep_seeds;
            const std::string jsonl = kv.count("out_jsonl") ? kv["out_jsonl"].text : "";
            return cmd_verify(suite, vc, jsonl, out, err);
        }
        const RunConfig rc = build_run_config(kv);
        if (run->parsed()) return cmd_run(rc, out, err);
        if (ens->parsed()) return cmd_ensemble(rc, n_seeds, jobs, out, err);
        if (cond->parsed()) return cmd_conditions(rc, draws, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const ParamError& e) {
        err << "config error: " << e.what() << "\n";
        return config_error;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return failure;
    }
    return failure;
}

}  // namespace cbo::cli
