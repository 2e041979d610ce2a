#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbo/diagnostics.hpp"
#include "cbo/verify.hpp"

namespace cbo {

/// Decimal with 17 significant digits (round-trips any double).
std::string format_number(double x);

/// step,time,diameter,diam_1..diam_d,min_1..,max_1..,mean_1..,cons_1..,
/// mean_to_cons,energy,log_gibbs_mass,obj_at_cons
std::string csv_header(std::size_t dim);
std::vector<std::string> csv_columns(std::size_t dim);
std::string csv_row(const StepRecord& r);

/// Outcome of one seeded run.
struct RunSummary {
    std::size_t seed_index = 0;
    std::uint64_t run_seed = 0;
    bool ok = true;
    std::string error;  ///< set when !ok
    std::int64_t steps = 0;
    std::string stop_reason;
    double final_diameter = 0.0;
    std::vector<double> final_consensus;
    double final_objective = 0.0;
    std::optional<double> distance_to_minimizer;
    double wall_seconds = 0.0;  ///< not serialized, so JSONL output is reproducible
};

nlohmann::ordered_json to_json(const StepRecord& r);
nlohmann::ordered_json to_json(const RunSummary& s);
nlohmann::ordered_json to_json(const VerificationReport& r);

/// One-line human-readable report.
std::string report_line(const VerificationReport& r);

}  // namespace cbo
