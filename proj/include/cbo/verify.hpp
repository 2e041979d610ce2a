#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbo/core.hpp"
#include "cbo/dynamics.hpp"
#include "cbo/objectives.hpp"

namespace cbo {

// ---------------------------------------------------------------------------
// Closed-form oracles
// ---------------------------------------------------------------------------

/// e^{-lambda t} D0: continuous-time diameter bound, exact for pairwise
/// differences when sigma = 0.
double oracle_deterministic_diameter(double d0, double lambda, double t);

/// (1 - lambda h)^n diff0 = E[x^i_n - x^j_n] for the Euler scheme.
/// Throws ParamError unless 0 < lambda h < 1.
double oracle_discrete_mean(double diff0, double lambda, double h, std::int64_t n);

/// (1 - h m)^n sq0 = E|X^i_n - X^j_n|^2 for the Euler scheme, m = decay_margin.
double oracle_discrete_second_moment(double sq0, double lambda, double h, double sigma,
                                     std::int64_t n);

/// -(lambda + sigma^2/2): almost-sure exponential rate of |x^{i,l}_t - x^{j,l}_t|.
double oracle_continuous_exponent(double lambda, double sigma);

// ---------------------------------------------------------------------------
// Monte Carlo machinery
// ---------------------------------------------------------------------------

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

/// Sample mean and standard error (n-1 variance). Throws on fewer than 2 samples.
McEstimate mc_estimate(std::span<const double> samples);

enum class PairwiseStatistic {
    mean_diff,             ///< x^{i,l}_n - x^{j,l}_n
    second_moment,         ///< |X^i_n - X^j_n|^2
    log_diff_slope,        ///< OLS slope of log|x^{i,l}_t - x^{j,l}_t| over a time window
    contraction_exponent,  ///< (1/2n) sum_k [1 - (r_k)^2], r_k the per-step ratio of the difference
    log_rate,              ///< -(1/n) log|x^{i,l}_n - x^{j,l}_n| / |x^{i,l}_0 - x^{j,l}_0|
};
std::string_view to_string(PairwiseStatistic s);

/// Fixed initial ensemble, randomness only in the noise.
struct PairwiseConfig {
    Params params;
    Objective objective;
    Ensemble initial;
    std::size_t i = 0;
    std::size_t j = 1;
    std::size_t component = 0;
    std::int64_t steps = 500;     ///< evaluation step for the endpoint statistics
    double window_start = 1.0;    ///< log-slope window, in time units
    double window_end = 10.0;
    std::uint64_t master_seed = 0;
    unsigned jobs = 1;
};

/// Runs `runs` independent paths; run r draws its noise from
/// RngStream(derive_seed(master_seed, r), 1). Throws ParamError if runs < 2 or
/// the log-slope window holds fewer than 2 steps.
McEstimate estimate_pairwise_statistic(const PairwiseConfig& config, PairwiseStatistic statistic,
                                       std::size_t runs);

/// Per-run values behind estimate_pairwise_statistic, in run order.
std::vector<double> sample_pairwise_statistic(const PairwiseConfig& config,
                                              PairwiseStatistic statistic, std::size_t runs);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

enum class TheoremId { thm31, thm32, thm33, thm34i, thm34ii, thm34iii, laplace };
std::string_view to_string(TheoremId id);
std::optional<TheoremId> parse_theorem_id(std::string_view text);
std::vector<TheoremId> all_theorem_ids();

enum class RuleKind {
    exact_relative,   ///< |est - oracle| <= value * |oracle|
    std_errors,       ///< |est - oracle| <= value * SE
    relative,         ///< |est - oracle| <= value * |oracle|, for fitted rates
    nonincreasing,    ///< est (largest step-up of a sequence) <= value
};

struct ToleranceRule {
    RuleKind kind = RuleKind::exact_relative;
    double value = 1e-12;

    bool accepts(double oracle, const McEstimate& estimate) const;
    std::string describe() const;
};

enum class Verdict { pass, fail, hypotheses_unmet };
std::string_view to_string(Verdict v);

struct VerificationReport {
    TheoremId id = TheoremId::thm33;
    std::string statistic;
    double oracle = 0.0;
    McEstimate estimate;
    ToleranceRule rule;
    Verdict verdict = Verdict::fail;
    std::map<std::string, double> parameters;
    std::string note;

    /// verdict agrees with rule.accepts(oracle, estimate) (or is hypotheses_unmet).
    bool consistent() const;
};

/// Knobs shared by the theorem checks; unset counts/steps use each check's default.
struct VerifyConfig {
    double lambda = 1.0;
    double sigma = 1.0;
    double h = 0.01;
    double beta = 10.0;
    std::uint64_t seed = 0;
    unsigned jobs = 1;
    std::optional<std::size_t> runs;
    std::optional<std::int64_t> steps;
    std::vector<double> betas = {1.0, 10.0, 100.0};
    std::size_t sweep_seeds = 20;
    double success_radius = 0.25;
};

VerificationReport verify_theorem(TheoremId id, const VerifyConfig& config);

// ---------------------------------------------------------------------------
// Inverse-temperature sweep
// ---------------------------------------------------------------------------

struct SweepConfig {
    Params params;
    Objective objective;
    std::vector<double> init_low;
    std::vector<double> init_high;
    StopCriteria stop;
    std::size_t seeds = 20;
    std::uint64_t master_seed = 0;
    double success_radius = 0.25;
    unsigned jobs = 1;
};

struct SweepRow {
    double beta = 0.0;
    double median_final_value = 0.0;  ///< median over seeds of L(X*) at stop
    double min_final_value = 0.0;     ///< estimate of the essential infimum over paths
    double success_rate = 0.0;        ///< fraction with |X* - argmin| <= radius
    double median_steps = 0.0;
    std::size_t runs = 0;
};

/// One row per beta. Seed k uses derive_seed(master_seed, k) for every beta,
/// so rows share initial ensembles. Throws ParamError on fewer than 2 betas or
/// an objective without a known minimizer.
std::vector<SweepRow> beta_sweep(const SweepConfig& config, std::span<const double> betas);

}  // namespace cbo
