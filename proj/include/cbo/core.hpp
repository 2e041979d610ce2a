#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cbo {

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Out-of-domain model constants or shapes.
class ParamError : public Error {
public:
    using Error::Error;
};

/// A non-finite value surfaced during evaluation; `index()` names the particle
/// (or input slot) it came from.
class NumericError : public Error {
public:
    NumericError(const std::string& what, std::size_t index)
        : Error(what), index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

// ---------------------------------------------------------------------------
// Params
// ---------------------------------------------------------------------------

enum class NoiseMode { common, independent };
enum class Scheme { euler, semi_exact, deterministic };

std::string_view to_string(NoiseMode mode);
std::string_view to_string(Scheme scheme);
std::optional<NoiseMode> parse_noise_mode(std::string_view text);
std::optional<Scheme> parse_scheme(std::string_view text);

/// Model and scheme constants. Defaults are the Rastrigin experiment values
/// (N=100, d=2, beta=10, lambda=1, h=0.01, sigma=1).
struct Params {
    double lambda = 1.0;  ///< drift rate [1/time]
    double sigma = 1.0;   ///< noise intensity [1/sqrt(time)]
    double beta = 10.0;   ///< inverse temperature
    double h = 0.01;      ///< time step
    std::size_t n_particles = 100;
    std::size_t dim = 2;
    NoiseMode noise_mode = NoiseMode::common;
    Scheme scheme = Scheme::euler;

    /// sigma, or 0 when the scheme is deterministic.
    double effective_sigma() const noexcept {
        return scheme == Scheme::deterministic ? 0.0 : sigma;
    }
};

/// Returns `p` unchanged, or throws ParamError naming the first violated field.
Params validate_params(const Params& p);

// ---------------------------------------------------------------------------
// Ensemble
// ---------------------------------------------------------------------------

/// N particles in R^d at step n, time n*h.
///
/// Coordinates are held as x^{i,l} = origin[l] + scale[l] * raw(i, l). Under
/// common noise every scheme multiplies all deviations of a component by one
/// factor, so a step only touches origin and scale and the raw offsets stay
/// fixed. Pairwise differences scale[l] * (raw(i,l) - raw(j,l)) therefore keep
/// full relative precision long after the swarm has collapsed.
class Ensemble {
public:
    Ensemble() = default;

    /// Throws ParamError on shape mismatch, NumericError on non-finite coordinates.
    Ensemble(std::size_t n, std::size_t d, std::vector<double> origin,
             std::vector<double> scale, std::vector<double> raw, std::int64_t step, double h);

    /// Unit scale.
    Ensemble(std::size_t n, std::size_t d, std::vector<double> origin,
             std::vector<double> offsets, std::int64_t step, double h);

    /// Row-major N x d absolute coordinates; origin is zero.
    static Ensemble from_positions(std::size_t n, std::size_t d,
                                   std::vector<double> positions,
                                   std::int64_t step = 0, double h = 0.0);

    std::size_t size() const noexcept { return n_; }
    std::size_t dim() const noexcept { return d_; }
    std::int64_t step() const noexcept { return step_; }
    double time() const noexcept { return time_; }
    double h() const noexcept { return h_; }

    double position(std::size_t i, std::size_t l) const noexcept {
        return origin_[l] + offset(i, l);
    }
    void position_into(std::size_t i, std::span<double> out) const;
    /// Row-major N x d absolute coordinates.
    std::vector<double> positions() const;

    std::span<const double> origin() const noexcept { return origin_; }
    std::span<const double> scale() const noexcept { return scale_; }
    std::span<const double> raw() const noexcept { return raw_; }
    double raw(std::size_t i, std::size_t l) const noexcept { return raw_[i * d_ + l]; }

    /// x^{i,l} - origin[l]
    double offset(std::size_t i, std::size_t l) const noexcept {
        return scale_[l] * raw_[i * d_ + l];
    }

    /// x^{i,l} - x^{j,l}
    double difference(std::size_t i, std::size_t j, std::size_t l) const noexcept {
        return scale_[l] * (raw_[i * d_ + l] - raw_[j * d_ + l]);
    }
    /// |X^i - X^j|^2
    double squared_distance(std::size_t i, std::size_t j) const noexcept;

private:
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<double> origin_;
    std::vector<double> scale_;
    std::vector<double> raw_;
    std::int64_t step_ = 0;
    double h_ = 0.0;
    double time_ = 0.0;
};

// ---------------------------------------------------------------------------
// GibbsSummary
// ---------------------------------------------------------------------------

struct GibbsSummary {
    std::vector<double> weights;           ///< psi_k, sums to 1
    std::vector<double> consensus_raw;     ///< X* in the raw offset units of its ensemble
    std::vector<double> consensus_offset;  ///< X* - origin of the ensemble it was built from
    std::vector<double> consensus_point;   ///< X*, absolute
    double log_mass = 0.0;                 ///< log((1/N) sum_k exp(-beta L_k))
};

}  // namespace cbo
