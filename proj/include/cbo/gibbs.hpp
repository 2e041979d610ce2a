#pragma once

#include <span>
#include <vector>

#include "cbo/core.hpp"

namespace cbo {

/// psi_k = exp(-beta L_k) / sum_j exp(-beta L_j).
///
/// The minimum value is subtracted inside the exponent, so the largest term is
/// exactly 1 and nothing underflows to an all-zero vector for large beta*L.
/// Throws NumericError (index = offending slot) on NaN/inf values and
/// ParamError on beta <= 0 or empty input.
std::vector<double> gibbs_weights(std::span<const double> values, double beta);

/// log((1/N) sum_k exp(-beta L_k)) via the same shifted sum.
double gibbs_mass_log(std::span<const double> values, double beta);

/// -(1/beta) log M, computed as min L - log(S/N)/beta without round-tripping
/// through beta*min L. Lies in [min L, min L + log(N)/beta].
double gibbs_free_energy(std::span<const double> values, double beta);

/// sum_k psi_k raw(k, .) in the ensemble's raw offset units.
/// The particle with the largest weight serves as the pivot, so identical
/// particles or a one-hot weight reproduce the input exactly, and each
/// component is clamped to the particle range.
std::vector<double> consensus_raw(const Ensemble& ensemble, std::span<const double> weights);

/// sum_k psi_k (X^k - origin), i.e. scale * consensus_raw.
std::vector<double> consensus_offset(const Ensemble& ensemble, std::span<const double> weights);

/// X* = sum_k psi_k X^k in absolute coordinates.
std::vector<double> consensus_point(const Ensemble& ensemble, std::span<const double> weights);

/// Weights, consensus point and log Gibbs mass from precomputed objective values.
GibbsSummary summarize(const Ensemble& ensemble, std::span<const double> values, double beta);

}  // namespace cbo
