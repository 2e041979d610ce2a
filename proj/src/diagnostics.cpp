#include "cbo/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "cbo/dynamics.hpp"
#include "cbo/gibbs.hpp"
#include "cbo/rng.hpp"

namespace cbo {

double diameter(const Ensemble& e) {
    double best = 0.0;
    for (std::size_t i = 0; i < e.size(); ++i)
        for (std::size_t j = i + 1; j < e.size(); ++j)
            best = std::max(best, e.squared_distance(i, j));
    return std::sqrt(best);
}

std::vector<double> deviations_from_mean(const Ensemble& e) {
    const std::size_t n = e.size();
    const std::size_t d = e.dim();
    std::vector<double> mean(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < d; ++l) mean[l] += e.raw(i, l);
    for (double& m : mean) m /= static_cast<double>(n);

    const auto scale = e.scale();
    std::vector<double> dev(n * d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < d; ++l) dev[i * d + l] = scale[l] * (e.raw(i, l) - mean[l]);
    return dev;
}

StepRecord record(const Ensemble& e, const GibbsSummary& g, const Objective& objective) {
    const std::size_t n = e.size();
    const std::size_t d = e.dim();
    const auto origin = e.origin();
    const auto scale = e.scale();

    StepRecord r;
    r.step = e.step();
    r.time = e.time();
    r.diameter = diameter(e);
    r.component_diameters.resize(d);
    r.component_min.resize(d);
    r.component_max.resize(d);
    r.mean.resize(d);

    // Raw units throughout; the scale is applied once per component.
    std::vector<double> mean_raw(d, 0.0);
    for (std::size_t l = 0; l < d; ++l) {
        double lo = e.raw(0, l);
        double hi = lo;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = e.raw(i, l);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
            mean_raw[l] += x;
        }
        mean_raw[l] /= static_cast<double>(n);
        const double s = scale[l];
        r.component_diameters[l] = std::abs(s) * (hi - lo);
        r.component_min[l] = origin[l] + std::min(s * lo, s * hi);
        r.component_max[l] = origin[l] + std::max(s * lo, s * hi);
        r.mean[l] = origin[l] + s * mean_raw[l];
    }

    r.consensus_point = g.consensus_point;
    double gap = 0.0;
    for (std::size_t l = 0; l < d; ++l) {
        const double u = scale[l] * (mean_raw[l] - g.consensus_raw[l]);
        gap += u * u;
    }
    r.mean_to_consensus = std::sqrt(gap);

    double energy = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < d; ++l) {
            const double u = scale[l] * (e.raw(i, l) - g.consensus_raw[l]);
            energy += u * u;
        }
    r.energy = energy / static_cast<double>(n);
    r.log_gibbs_mass = g.log_mass;
    r.objective_at_consensus = objective(g.consensus_point);
    return r;
}

double decay_margin(double lambda, double h, double sigma) {
    return 2.0 * lambda - lambda * lambda * h - sigma * sigma;
}

std::string_view to_string(Feasibility f) {
    switch (f) {
        case Feasibility::feasible: return "feasible";
        case Feasibility::infeasible: return "infeasible";
        case Feasibility::unknown: return "unknown";
        case Feasibility::hypotheses_unmet: return "hypotheses_unmet";
    }
    return "?";
}

const ConditionCheck* ConditionReport::find(std::string_view name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

InitStats estimate_init_stats(const Params& p, const Objective& objective,
                              std::span<const double> low, std::span<const double> high,
                              std::size_t draws, RngStream& rng) {
    if (draws < 2) throw ParamError("init stats need at least 2 draws");
    const std::size_t n = p.n_particles;
    const std::size_t d = p.dim;

    std::vector<double> values;
    values.reserve(draws * n);
    double spread_sum = 0.0;
    double spread_sq = 0.0;
    for (std::size_t k = 0; k < draws; ++k) {
        const Ensemble e = init_uniform(p, low, high, rng);
        const auto v = evaluate(e, objective);
        values.insert(values.end(), v.begin(), v.end());

        const auto dev = deviations_from_mean(e);
        double s = 0.0;
        for (std::size_t l = 0; l < d; ++l) {
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, dev[i * d + l] * dev[i * d + l]);
            s += worst;
        }
        spread_sum += s;
        spread_sq += s * s;
    }

    InitStats st;
    st.draws = draws;
    const double m = static_cast<double>(draws);
    st.spread = spread_sum / m;
    st.spread_std_error =
        std::sqrt(std::max(0.0, (spread_sq - m * st.spread * st.spread) / (m - 1.0)) / m);

    st.log_gibbs_expectation = gibbs_mass_log(values, p.beta);
    // Relative SE of the sample mean of exp(-beta L), in shifted units.
    const double lo = *std::min_element(values.begin(), values.end());
    double s1 = 0.0;
    double s2 = 0.0;
    for (double v : values) {
        const double w = std::exp(-p.beta * (v - lo));
        s1 += w;
        s2 += w * w;
    }
    const double cnt = static_cast<double>(values.size());
    const double mean_w = s1 / cnt;
    const double var_w = std::max(0.0, (s2 - cnt * mean_w * mean_w) / (cnt - 1.0));
    st.gibbs_rel_std_error = std::sqrt(var_w / cnt) / mean_w;
    return st;
}

ConditionReport check_conditions(const Params& p, const Objective& objective,
                                 const std::optional<InitStats>& init) {
    validate_params(p);
    const double lambda = p.lambda;
    const double sigma = p.effective_sigma();
    const double h = p.h;
    const bool stochastic = sigma > 0.0;

    ConditionReport rep;
    rep.decay_margin = decay_margin(lambda, h, sigma);
    rep.init_stats = init;

    rep.checks.push_back({"lambda_positive", "lambda > 0", true, lambda > 0.0, lambda});
    rep.checks.push_back({"step_below_inverse_rate", "h < 1/lambda", true, h < 1.0 / lambda,
                          1.0 / lambda - h});

    const double noise_gap = 2.0 * lambda - sigma * sigma;
    rep.checks.push_back(
        {"drift_dominates_noise", "2 lambda > sigma^2", stochastic, noise_gap > 0.0, noise_gap});
    const double h_bound = noise_gap / lambda;
    rep.checks.push_back({"step_below_moment_bound", "h < (2 lambda - sigma^2)/lambda",
                          stochastic, noise_gap > 0.0 && h < h_bound, h_bound - h});
    rep.checks.push_back({"decay_margin_positive", "m = 2 lambda - lambda^2 h - sigma^2 > 0",
                          stochastic, rep.decay_margin > 0.0, rep.decay_margin});

    MinimizerCondition& mc = rep.minimizer;
    if (!(noise_gap > 0.0)) {
        mc.status = Feasibility::hypotheses_unmet;
        mc.note = "requires 2 lambda > sigma^2";
        return rep;
    }
    if (!objective.curvature_bound || !objective.known_min_value) {
        mc.status = Feasibility::unknown;
        mc.note = "objective lacks curvature bound or known minimum";
        return rep;
    }
    if (!init) {
        mc.status = Feasibility::unknown;
        mc.note = "no initial-data statistics";
        return rep;
    }

    const double c_l = *objective.curvature_bound;
    const double l_m = *objective.known_min_value;
    mc.log_lhs = init->log_gibbs_expectation;
    if (c_l <= 0.0 || init->spread <= 0.0) {
        // Right-hand side vanishes: every eps in (0, 1) works.
        mc.status = Feasibility::feasible;
        mc.eps_max = 1.0;
    } else {
        const double log_rhs = std::log((2.0 * lambda + sigma * sigma) / noise_gap) +
                               std::log(c_l) + std::log(p.beta) - p.beta * l_m +
                               std::log(init->spread);
        mc.log_rhs = log_rhs;
        // 1 - exp(x) loses digits near 0; expm1 does not.
        const double eps = -std::expm1(log_rhs - *mc.log_lhs);
        mc.eps_max = eps;
        mc.status = eps > 0.0 ? Feasibility::feasible : Feasibility::infeasible;
    }
    if (!(l_m > 0.0))
        mc.note = "minimum value L_m = " + std::to_string(l_m) +
                  " is not > 0 as the condition assumes; verdict is indicative";
    return rep;
}

}  // namespace cbo
