#pragma once

#include <chrono>
#include <functional>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cbo/core.hpp"
#include "cbo/diagnostics.hpp"
#include "cbo/objectives.hpp"
#include "cbo/rng.hpp"

namespace cbo {

/// L(X^i) for every particle. Throws NumericError naming the particle when a
/// value is NaN or infinite.
std::vector<double> evaluate(const Ensemble& e, const Objective& objective);

/// One step given the Gibbs summary of `e` and the step's normals (layout as
/// draw_step_noise; ignored for the deterministic scheme).
///
/// Every scheme moves a particle's deviation from the consensus point by a
/// multiplicative factor,
///
///     X^i_{n+1} - X*_n = (X^i_n - X*_n) * f^l
///
///     euler:          f = 1 - lambda h + sigma sqrt(h) Z
///     semi_exact:     f = exp(-lambda h) (1 + sigma sqrt(h) w)
///     deterministic:  f = 1 - lambda h
///
/// Under common noise this only moves the origin and rescales the component;
/// independent noise rewrites the raw offsets around X*_n.
Ensemble advance(const Ensemble& e, const Params& p, const GibbsSummary& g,
                 std::span<const double> noise);

Ensemble step_euler(const Ensemble& e, const Params& p, const Objective& objective,
                    RngStream& rng);
Ensemble step_semi_exact(const Ensemble& e, const Params& p, const Objective& objective,
                         RngStream& rng);
Ensemble step_deterministic(const Ensemble& e, const Params& p, const Objective& objective);

/// Dispatches on p.scheme.
Ensemble step(const Ensemble& e, const Params& p, const Objective& objective, RngStream& rng);

struct StopCriteria {
    std::int64_t max_steps = 1000;
    double diameter_tol = 0.0;  ///< stop once diameter < tol
    std::optional<std::chrono::duration<double>> wall_limit;
};

enum class StopReason { max_steps, diameter, wall_time };
std::string_view to_string(StopReason reason);

struct Trajectory {
    std::vector<StepRecord> records;
    Ensemble final_state;
    StopReason reason = StopReason::max_steps;
    std::int64_t steps = 0;
};

/// Sees the ensemble behind every record as it is taken.
using RecordHook = std::function<void(const Ensemble&, const StepRecord&)>;

/// Iterates the configured scheme from `init` until a criterion fires.
/// Records every `record_stride`-th step plus the final one. Step errors are
/// rethrown with the step index in the message.
Trajectory run(const Ensemble& init, const Params& p, const Objective& objective,
               const StopCriteria& stop, RngStream& rng, std::int64_t record_stride = 1,
               const RecordHook& hook = {});

/// N x d i.i.d. uniform coordinates in the box [low, high], particle-major.
Ensemble init_uniform(const Params& p, std::span<const double> low,
                      std::span<const double> high, RngStream& rng);

/// Stream layout of a seeded run: initial positions come from stream 0 and
/// step noise from stream 1 of `run_seed`. `init_seed`, when set, replaces
/// `run_seed` for the initial positions only.
Trajectory run_from_seed(const Params& p, const Objective& objective,
                         std::span<const double> low, std::span<const double> high,
                         const StopCriteria& stop, std::uint64_t run_seed,
                         std::int64_t record_stride = 1,
                         std::optional<std::uint64_t> init_seed = std::nullopt,
                         const RecordHook& hook = {});

}  // namespace cbo
