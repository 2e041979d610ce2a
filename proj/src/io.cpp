#include "cbo/io.hpp"

#include <cmath>
#include <cstdio>

namespace cbo {

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<std::string> csv_columns(std::size_t dim) {
    std::vector<std::string> cols = {"step", "time", "diameter"};
    for (const char* prefix : {"diam_", "min_", "max_", "mean_", "cons_"})
        for (std::size_t l = 1; l <= dim; ++l) cols.push_back(prefix + std::to_string(l));
    for (const char* tail : {"mean_to_cons", "energy", "log_gibbs_mass", "obj_at_cons"})
        cols.emplace_back(tail);
    return cols;
}

std::string csv_header(std::size_t dim) {
    std::string out;
    for (const auto& c : csv_columns(dim)) {
        if (!out.empty()) out += ',';
        out += c;
    }
    return out;
}

std::string csv_row(const StepRecord& r) {
    std::string out = std::to_string(r.step);
    auto put = [&](double x) {
        out += ',';
        out += format_number(x);
    };
    put(r.time);
    put(r.diameter);
    for (const auto* v : {&r.component_diameters, &r.component_min, &r.component_max, &r.mean,
                          &r.consensus_point})
        for (double x : *v) put(x);
    put(r.mean_to_consensus);
    put(r.energy);
    put(r.log_gibbs_mass);
    put(r.objective_at_consensus);
    return out;
}

namespace {

// JSON has no inf/nan; those become null.
nlohmann::ordered_json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return x;
}

}  // namespace

nlohmann::ordered_json to_json(const StepRecord& r) {
    nlohmann::ordered_json j;
    j["kind"] = "step";
    j["step"] = r.step;
    j["time"] = r.time;
    j["diameter"] = r.diameter;
    j["component_diameters"] = r.component_diameters;
    j["component_min"] = r.component_min;
    j["component_max"] = r.component_max;
    j["mean"] = r.mean;
    j["consensus_point"] = r.consensus_point;
    j["mean_to_consensus"] = r.mean_to_consensus;
    j["energy"] = r.energy;
    j["log_gibbs_mass"] = num(r.log_gibbs_mass);
    j["objective_at_consensus"] = r.objective_at_consensus;
    return j;
}

nlohmann::ordered_json to_json(const RunSummary& s) {
    nlohmann::ordered_json j;
    j["kind"] = "summary";
    j["seed_index"] = s.seed_index;
    j["run_seed"] = s.run_seed;
    j["ok"] = s.ok;
    if (!s.ok) {
        j["error"] = s.error;
        return j;
    }
    j["steps"] = s.steps;
    j["stop_reason"] = s.stop_reason;
    j["final_diameter"] = s.final_diameter;
    j["final_consensus"] = s.final_consensus;
    j["final_objective"] = s.final_objective;
    j["distance_to_minimizer"] =
        s.distance_to_minimizer ? num(*s.distance_to_minimizer) : nlohmann::ordered_json();
    return j;
}

nlohmann::ordered_json to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["kind"] = "verification";
    j["id"] = std::string(to_string(r.id));
    j["verdict"] = std::string(to_string(r.verdict));
    j["statistic"] = r.statistic;
    j["oracle"] = num(r.oracle);
    j["estimate"] = num(r.estimate.mean);
    j["std_error"] = num(r.estimate.std_error);
    j["n_samples"] = r.estimate.n_samples;
    j["rule"] = r.rule.describe();
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.parameters) params[k] = num(v);
    j["parameters"] = params;
    j["note"] = r.note;
    return j;
}

std::string report_line(const VerificationReport& r) {
    std::string verdict = r.verdict == Verdict::pass   ? "PASS"
                          : r.verdict == Verdict::fail ? "FAIL"
                                                       : "SKIP";
    std::string out = verdict + " " + std::string(to_string(r.id)) + ": " + r.statistic;
    if (r.verdict != Verdict::hypotheses_unmet) {
        out += " | oracle=" + format_number(r.oracle) + " estimate=" +
               format_number(r.estimate.mean);
        if (r.estimate.std_error > 0.0) out += " se=" + format_number(r.estimate.std_error);
        out += " n=" + std::to_string(r.estimate.n_samples) + " | " + r.rule.describe();
    }
    if (!r.note.empty()) out += " | " + r.note;
    return out;
}

}  // namespace cbo
