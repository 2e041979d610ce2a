#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "cbo/io.hpp"
#include "cli/config.hpp"

namespace cbo::cli {

enum ExitCode : int { ok = 0, failure = 1, config_error = 2 };

/// One run with seed index 0 of the master seed. CSV goes to out_csv (stdout
/// when unset); step records and the summary go to out_jsonl when set. The
/// summary is always the last line written to `out`.
int cmd_run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Seeds 0..n_seeds-1; one summary line per seed in seed order, then an
/// aggregate line. out_csv, when set, receives a per-seed table.
int cmd_ensemble(const RunConfig& config, std::size_t n_seeds, unsigned jobs, std::ostream& out,
                 std::ostream& err);

/// suite is "all" or a theorem id. Text reports to `out`, JSONL to
/// `jsonl_path` when non-empty. Skips (hypotheses unmet) are not failures.
int cmd_verify(const std::string& suite, const VerifyConfig& config,
               const std::string& jsonl_path, std::ostream& out, std::ostream& err);

int cmd_conditions(const RunConfig& config, std::size_t draws, std::ostream& out);

int cmd_list_objectives(std::ostream& out);

/// Seeded run for one seed index; run errors are reported in the summary.
/// `hook`, when set, sees every recorded ensemble.
RunSummary run_seed_index(const RunConfig& config, std::size_t seed_index,
                          std::vector<StepRecord>* records, const RecordHook& hook = {});

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cbo::cli
