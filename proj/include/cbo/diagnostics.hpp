#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cbo/core.hpp"
#include "cbo/objectives.hpp"

namespace cbo {

class RngStream;

/// Observables of one ensemble snapshot. Field order is the CSV column order.
struct StepRecord {
    std::int64_t step = 0;
    double time = 0.0;
    double diameter = 0.0;                    ///< max_{i,j} |X^i - X^j|
    std::vector<double> component_diameters;  ///< max_i x^{i,l} - min_i x^{i,l}
    std::vector<double> component_min;
    std::vector<double> component_max;
    std::vector<double> mean;                 ///< ensemble average
    std::vector<double> consensus_point;      ///< Gibbs-weighted average
    double mean_to_consensus = 0.0;           ///< |mean - consensus|
    double energy = 0.0;                      ///< (1/N) sum_i |X^i - consensus|^2
    double log_gibbs_mass = 0.0;
    double objective_at_consensus = 0.0;
};

/// Exact O(N^2 d) pairwise maximum, from offsets.
double diameter(const Ensemble& e);

/// x^{i,l} - mean_l, from offsets. Row-major N x d.
std::vector<double> deviations_from_mean(const Ensemble& e);

StepRecord record(const Ensemble& e, const GibbsSummary& g, const Objective& objective);

/// m(lambda, h, sigma) = 2 lambda - lambda^2 h - sigma^2
double decay_margin(double lambda, double h, double sigma);

// ---------------------------------------------------------------------------
// Parameter-regime checks
// ---------------------------------------------------------------------------

struct ConditionCheck {
    std::string name;
    std::string inequality;
    bool applicable = true;  ///< false when the hypothesis does not concern this regime
    bool holds = false;
    double margin = 0.0;     ///< rhs - lhs; positive iff the strict inequality holds
};

/// Monte Carlo statistics of the initial distribution.
struct InitStats {
    double log_gibbs_expectation = 0.0;  ///< log E exp(-beta L(X^in))
    double gibbs_rel_std_error = 0.0;    ///< SE of E exp(-beta L) relative to its estimate
    double spread = 0.0;                 ///< sum_l E[max_i (x0^{i,l} - mean0^l)^2]
    double spread_std_error = 0.0;
    std::size_t draws = 0;               ///< number of initial ensembles drawn
};

enum class Feasibility { feasible, infeasible, unknown, hypotheses_unmet };
std::string_view to_string(Feasibility f);

/// Laplace-principle sufficient condition
///
///   (1 - eps) E[exp(-beta L(X^in))] >= (2 lambda + sigma^2)/(2 lambda - sigma^2)
///                                       * C_L * beta * exp(-beta L_m) * spread
///
/// reported through the largest admissible eps (1 - rhs/E); feasible iff it is > 0.
struct MinimizerCondition {
    Feasibility status = Feasibility::unknown;
    std::optional<double> eps_max;
    std::optional<double> log_lhs;  ///< log E exp(-beta L(X^in))
    std::optional<double> log_rhs;  ///< log of the right-hand side without (1 - eps)
    std::string note;
};

struct ConditionReport {
    std::vector<ConditionCheck> checks;
    double decay_margin = 0.0;
    MinimizerCondition minimizer;
    std::optional<InitStats> init_stats;

    const ConditionCheck* find(std::string_view name) const;
};

/// Draws `draws` uniform initial ensembles of p.n_particles particles in
/// [low, high] and estimates InitStats.
InitStats estimate_init_stats(const Params& p, const Objective& objective,
                              std::span<const double> low, std::span<const double> high,
                              std::size_t draws, RngStream& rng);

/// Scheme and consensus hypotheses, plus the minimizer condition when
/// `init` is given and the objective carries curvature and minimum metadata.
ConditionReport check_conditions(const Params& p, const Objective& objective,
                                 const std::optional<InitStats>& init);

}  // namespace cbo
