#include "cbo/dynamics.hpp"

#include <cmath>
#include <string>

#include "cbo/gibbs.hpp"

namespace cbo {
namespace {

void require_shape(const Ensemble& e, const Params& p) {
    if (e.size() != p.n_particles || e.dim() != p.dim)
        throw ParamError("ensemble shape " + std::to_string(e.size()) + "x" +
                         std::to_string(e.dim()) + " does not match params " +
                         std::to_string(p.n_particles) + "x" + std::to_string(p.dim));
}

void require_scheme(const Params& p, Scheme expected) {
    if (p.scheme != expected)
        throw ParamError("params scheme is " + std::string(to_string(p.scheme)) + ", expected " +
                         std::string(to_string(expected)));
}

Ensemble step_with(const Ensemble& e, const Params& p, const Objective& objective,
                   RngStream* rng) {
    require_shape(e, p);
    const auto values = evaluate(e, objective);
    const GibbsSummary g = summarize(e, values, p.beta);
    std::vector<double> noise;
    if (p.scheme != Scheme::deterministic) noise = draw_step_noise(*rng, p);
    return advance(e, p, g, noise);
}

}  // namespace

std::vector<double> evaluate(const Ensemble& e, const Objective& objective) {
    std::vector<double> values(e.size());
    std::vector<double> x(e.dim());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e.position_into(i, x);
        values[i] = objective(x);
        if (!std::isfinite(values[i]))
            throw NumericError("objective '" + objective.name + "' is not finite at particle " +
                                   std::to_string(i),
                               i);
    }
    return values;
}

Ensemble advance(const Ensemble& e, const Params& p, const GibbsSummary& g,
                 std::span<const double> noise) {
    require_shape(e, p);
    const std::size_t n = e.size();
    const std::size_t d = e.dim();
    const auto& c = g.consensus_offset;
    if (c.size() != d) throw ParamError("gibbs summary dimension mismatch");

    const double sigma = p.effective_sigma();
    const double lh = p.lambda * p.h;
    const double noise_scale = sigma * std::sqrt(p.h);
    const bool stochastic = p.scheme != Scheme::deterministic;
    const bool common = p.noise_mode == NoiseMode::common;
    if (stochastic) {
        const std::size_t expected = common ? d : n * d;
        if (noise.size() != expected) throw ParamError("noise block has the wrong length");
    }

    const double relax = p.scheme == Scheme::semi_exact ? std::exp(-lh) : 1.0 - lh;
    auto factor = [&](double z) {
        switch (p.scheme) {
            case Scheme::euler: return 1.0 - lh + noise_scale * z;
            case Scheme::semi_exact: return relax * (1.0 + noise_scale * z);
            case Scheme::deterministic: break;
        }
        return relax;
    };

    const auto& cr = g.consensus_raw;
    if (cr.size() != d) throw ParamError("gibbs summary dimension mismatch");

    std::vector<double> origin(e.origin().begin(), e.origin().end());
    std::vector<double> scale(e.scale().begin(), e.scale().end());
    std::vector<double> raw(e.raw().begin(), e.raw().end());

    for (std::size_t l = 0; l < d; ++l) {
        // A collapsed component is a fixed point of every scheme; leave it bit-exact.
        bool collapsed = true;
        for (std::size_t i = 1; i < n && collapsed; ++i) collapsed = e.raw(i, l) == e.raw(0, l);
        if (collapsed) continue;

        if (!stochastic || common) {
            // X' = X* + f (X - X*) with one f for the whole component.
            const double f = stochastic ? factor(noise[l]) : relax;
            origin[l] += (1.0 - f) * c[l];
            scale[l] *= f;
        } else {
            origin[l] += c[l];
            for (std::size_t i = 0; i < n; ++i)
                raw[i * d + l] = (raw[i * d + l] - cr[l]) * factor(noise[i * d + l]);
        }

        // Exact power-of-two rebalancing keeps the scale away from underflow.
        constexpr int kShift = 256;
        if (scale[l] != 0.0 && std::abs(scale[l]) < std::ldexp(1.0, -kShift)) {
            scale[l] = std::ldexp(scale[l], kShift);
            for (std::size_t i = 0; i < n; ++i) raw[i * d + l] = std::ldexp(raw[i * d + l], -kShift);
        }
    }
    return Ensemble(n, d, std::move(origin), std::move(scale), std::move(raw), e.step() + 1, p.h);
}

Ensemble step_euler(const Ensemble& e, const Params& p, const Objective& objective,
                    RngStream& rng) {
    require_scheme(p, Scheme::euler);
    return step_with(e, p, objective, &rng);
}

Ensemble step_semi_exact(const Ensemble& e, const Params& p, const Objective& objective,
                         RngStream& rng) {
    require_scheme(p, Scheme::semi_exact);
    return step_with(e, p, objective, &rng);
}

Ensemble step_deterministic(const Ensemble& e, const Params& p, const Objective& objective) {
    require_scheme(p, Scheme::deterministic);
    return step_with(e, p, objective, nullptr);
}

Ensemble step(const Ensemble& e, const Params& p, const Objective& objective, RngStream& rng) {
    return step_with(e, p, objective, &rng);
}

std::string_view to_string(StopReason reason) {
    switch (reason) {
        case StopReason::max_steps: return "max_steps";
        case StopReason::diameter: return "diameter";
        case StopReason::wall_time: return "wall_time";
    }
    return "?";
}

Trajectory run(const Ensemble& init, const Params& p, const Objective& objective,
               const StopCriteria& stop, RngStream& rng, std::int64_t record_stride,
               const RecordHook& hook) {
    validate_params(p);
    require_shape(init, p);
    if (stop.max_steps < 1) throw ParamError("max_steps must be >= 1");
    if (!(stop.diameter_tol >= 0.0)) throw ParamError("diameter_tol must be >= 0");
    if (record_stride < 1) throw ParamError("record_stride must be >= 1");

    using clock = std::chrono::steady_clock;
    const auto started = clock::now();

    Trajectory traj;
    Ensemble cur = init;
    for (std::int64_t n = 0;; ++n) {
        try {
            const auto values = evaluate(cur, objective);
            const GibbsSummary g = summarize(cur, values, p.beta);

            std::optional<StopReason> reason;
            if (stop.diameter_tol > 0.0 && diameter(cur) < stop.diameter_tol)
                reason = StopReason::diameter;
            else if (n >= stop.max_steps)
                reason = StopReason::max_steps;
            else if (stop.wall_limit && clock::now() - started >= *stop.wall_limit)
                reason = StopReason::wall_time;

            if (reason || n % record_stride == 0) {
                traj.records.push_back(record(cur, g, objective));
                if (hook) hook(cur, traj.records.back());
            }
            if (reason) {
                traj.reason = *reason;
                traj.steps = n;
                break;
            }

            std::vector<double> noise;
            if (p.scheme != Scheme::deterministic) noise = draw_step_noise(rng, p);
            cur = advance(cur, p, g, noise);
        } catch (const NumericError& err) {
            throw NumericError("step " + std::to_string(cur.step()) + ": " + err.what(),
                               err.index());
        }
    }
    traj.final_state = std::move(cur);
    return traj;
}

Ensemble init_uniform(const Params& p, std::span<const double> low,
                      std::span<const double> high, RngStream& rng) {
    validate_params(p);
    if (low.size() != p.dim || high.size() != p.dim)
        throw ParamError("init box must have one bound per dimension");
    for (std::size_t l = 0; l < p.dim; ++l) {
        if (!std::isfinite(low[l]) || !std::isfinite(high[l]) || !(low[l] < high[l]))
            throw ParamError("degenerate init box in dimension " + std::to_string(l));
    }
    std::vector<double> x(p.n_particles * p.dim);
    for (std::size_t i = 0; i < p.n_particles; ++i)
        for (std::size_t l = 0; l < p.dim; ++l) x[i * p.dim + l] = rng.uniform(low[l], high[l]);
    return Ensemble::from_positions(p.n_particles, p.dim, std::move(x), 0, p.h);
}

Trajectory run_from_seed(const Params& p, const Objective& objective,
                         std::span<const double> low, std::span<const double> high,
                         const StopCriteria& stop, std::uint64_t run_seed,
                         std::int64_t record_stride, std::optional<std::uint64_t> init_seed,
                         const RecordHook& hook) {
    RngStream init_rng(init_seed.value_or(run_seed), 0);
    RngStream noise_rng(run_seed, 1);
    const Ensemble init = init_uniform(p, low, high, init_rng);
    return run(init, p, objective, stop, noise_rng, record_stride, hook);
}

}  // namespace cbo
