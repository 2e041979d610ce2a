#include "cbo/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace cbo {
namespace {

struct ShiftedSum {
    double min_value;
    double sum;  // sum_k exp(-beta (L_k - min)), in [1, N]
};

void check_inputs(std::span<const double> values, double beta) {
    if (values.empty()) throw ParamError("gibbs: no objective values");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw ParamError("gibbs: beta must be > 0");
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!std::isfinite(values[k]))
            throw NumericError("gibbs: objective value at index " + std::to_string(k) +
                                   " is not finite",
                               k);
    }
}

ShiftedSum shifted_sum(std::span<const double> values, double beta) {
    check_inputs(values, beta);
    const double lo = *std::min_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += std::exp(-beta * (v - lo));
    return {lo, sum};
}

}  // namespace

std::vector<double> gibbs_weights(std::span<const double> values, double beta) {
    const auto [lo, sum] = shifted_sum(values, beta);
    std::vector<double> w(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        w[k] = std::exp(-beta * (values[k] - lo)) / sum;
    return w;
}

double gibbs_mass_log(std::span<const double> values, double beta) {
    const auto [lo, sum] = shifted_sum(values, beta);
    return -beta * lo + std::log(sum / static_cast<double>(values.size()));
}

double gibbs_free_energy(std::span<const double> values, double beta) {
    const auto [lo, sum] = shifted_sum(values, beta);
    // sum/N <= 1, so the correction is >= 0
    return lo - std::log(sum / static_cast<double>(values.size())) / beta;
}

std::vector<double> consensus_raw(const Ensemble& ensemble, std::span<const double> weights) {
    const std::size_t n = ensemble.size();
    const std::size_t d = ensemble.dim();
    if (weights.size() != n)
        throw ParamError("consensus: weight count " + std::to_string(weights.size()) +
                         " != ensemble size " + std::to_string(n));

    const std::size_t pivot = static_cast<std::size_t>(
        std::max_element(weights.begin(), weights.end()) - weights.begin());

    std::vector<double> c(d);
    for (std::size_t l = 0; l < d; ++l) {
        const double ref = ensemble.raw(pivot, l);
        double acc = 0.0;
        double lo = ref;
        double hi = ref;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = ensemble.raw(k, l);
            acc += weights[k] * (x - ref);
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        c[l] = std::clamp(ref + acc, lo, hi);
    }
    return c;
}

std::vector<double> consensus_offset(const Ensemble& ensemble, std::span<const double> weights) {
    std::vector<double> c = consensus_raw(ensemble, weights);
    const auto scale = ensemble.scale();
    for (std::size_t l = 0; l < c.size(); ++l) c[l] *= scale[l];
    return c;
}

std::vector<double> consensus_point(const Ensemble& ensemble, std::span<const double> weights) {
    std::vector<double> c = consensus_offset(ensemble, weights);
    const auto origin = ensemble.origin();
    for (std::size_t l = 0; l < c.size(); ++l) c[l] += origin[l];
    return c;
}

GibbsSummary summarize(const Ensemble& ensemble, std::span<const double> values, double beta) {
    if (values.size() != ensemble.size())
        throw ParamError("gibbs: value count != ensemble size");
    GibbsSummary g;
    g.weights = gibbs_weights(values, beta);
    g.log_mass = gibbs_mass_log(values, beta);
    g.consensus_raw = consensus_raw(ensemble, g.weights);
    const auto origin = ensemble.origin();
    const auto scale = ensemble.scale();
    const std::size_t d = ensemble.dim();
    g.consensus_offset.resize(d);
    g.consensus_point.resize(d);
    for (std::size_t l = 0; l < d; ++l) {
        g.consensus_offset[l] = scale[l] * g.consensus_raw[l];
        g.consensus_point[l] = origin[l] + g.consensus_offset[l];
    }
    return g;
}

}  // namespace cbo
