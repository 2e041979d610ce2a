#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cbo/core.hpp"
#include "cbo/objectives.hpp"
#include "cbo/verify.hpp"

namespace cbo::cli {

/// Bad config input. Exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ConfigValue {
    std::string text;
    std::string origin;  ///< "file:line" or "command line"
};
using KeyValues = std::map<std::string, ConfigValue>;

/// Every key a config file or override may set.
const std::vector<std::string>& known_keys();

/// Flat key=value lines; '#' starts a comment, blank lines are skipped.
/// Throws ConfigError with "source:line" on malformed lines, unknown or
/// duplicate keys.
KeyValues parse_config_text(const std::string& text, const std::string& source);
KeyValues read_config_file(const std::string& path);

struct RunConfig {
    std::string objective;
    ObjectiveParams objective_params;
    Params params;
    std::uint64_t seed = 0;
    std::optional<std::uint64_t> init_seed;  ///< shared initial ensemble across seeds
    std::vector<double> init_low;
    std::vector<double> init_high;
    std::int64_t max_steps = 2000;
    double diameter_tol = 1e-3;
    std::int64_t record_stride = 1;
    double success_radius = 0.25;
    std::string out_csv;
    std::string out_jsonl;
    std::string out_positions;  ///< step,time,particle,x_1..x_d at recorded steps
};

/// Defaults are the Rastrigin experiment: N=100, d=2, lambda=1, sigma=1,
/// beta=10, h=0.01, semi_exact scheme, common noise, init box [-2,2]^d.
/// `objective` is required. Throws ConfigError naming the key and where it
/// was set.
RunConfig build_run_config(const KeyValues& kv);

/// lambda, sigma, h, beta, seed from `kv`; other keys are ignored.
VerifyConfig build_verify_config(const KeyValues& kv);

}  // namespace cbo::cli
