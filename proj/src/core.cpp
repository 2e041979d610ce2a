#include "cbo/core.hpp"

#include <cmath>

#include "cbo/rng.hpp"

namespace cbo {

std::string_view to_string(NoiseMode mode) {
    switch (mode) {
        case NoiseMode::common: return "common";
        case NoiseMode::independent: return "independent";
    }
    return "?";
}

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::euler: return "euler";
        case Scheme::semi_exact: return "semi_exact";
        case Scheme::deterministic: return "deterministic";
    }
    return "?";
}

std::optional<NoiseMode> parse_noise_mode(std::string_view text) {
    if (text == "common") return NoiseMode::common;
    if (text == "independent") return NoiseMode::independent;
    return std::nullopt;
}

std::optional<Scheme> parse_scheme(std::string_view text) {
    if (text == "euler") return Scheme::euler;
    if (text == "semi_exact") return Scheme::semi_exact;
    if (text == "deterministic") return Scheme::deterministic;
    return std::nullopt;
}

Params validate_params(const Params& p) {
    // Negated comparisons so NaN fails too.
    if (!(p.lambda > 0.0) || !std::isfinite(p.lambda))
        throw ParamError("lambda must be finite and > 0");
    if (!(p.beta > 0.0) || !std::isfinite(p.beta))
        throw ParamError("beta must be finite and > 0");
    if (!(p.h > 0.0) || !std::isfinite(p.h))
        throw ParamError("h must be finite and > 0");
    if (!(p.sigma >= 0.0) || !std::isfinite(p.sigma))
        throw ParamError("sigma must be finite and >= 0");
    if (p.n_particles == 0) throw ParamError("n_particles must be >= 1");
    if (p.dim == 0) throw ParamError("dim must be >= 1");
    return p;
}

Ensemble::Ensemble(std::size_t n, std::size_t d, std::vector<double> origin,
                   std::vector<double> scale, std::vector<double> raw, std::int64_t step,
                   double h)
    : n_(n),
      d_(d),
      origin_(std::move(origin)),
      scale_(std::move(scale)),
      raw_(std::move(raw)),
      step_(step),
      h_(h),
      time_(static_cast<double>(step) * h) {
    if (n_ == 0 || d_ == 0) throw ParamError("ensemble needs n >= 1 and d >= 1");
    if (origin_.size() != d_) throw ParamError("ensemble origin size != dim");
    if (scale_.size() != d_) throw ParamError("ensemble scale size != dim");
    if (raw_.size() != n_ * d_) throw ParamError("ensemble offsets size != n * dim");
    if (step_ < 0) throw ParamError("ensemble step must be >= 0");
    for (std::size_t l = 0; l < d_; ++l)
        if (!std::isfinite(origin_[l]) || !std::isfinite(scale_[l]))
            throw ParamError("ensemble origin or scale is not finite");
    for (std::size_t k = 0; k < raw_.size(); ++k)
        if (!std::isfinite(raw_[k]) || !std::isfinite(position(k / d_, k % d_)))
            throw NumericError("non-finite coordinate for particle " +
                                   std::to_string(k / d_),
                               k / d_);
}

Ensemble::Ensemble(std::size_t n, std::size_t d, std::vector<double> origin,
                   std::vector<double> offsets, std::int64_t step, double h)
    : Ensemble(n, d, std::move(origin), std::vector<double>(d, 1.0), std::move(offsets), step,
               h) {}

Ensemble Ensemble::from_positions(std::size_t n, std::size_t d,
                                  std::vector<double> positions, std::int64_t step,
                                  double h) {
    return Ensemble(n, d, std::vector<double>(d, 0.0), std::move(positions), step, h);
}

void Ensemble::position_into(std::size_t i, std::span<double> out) const {
    for (std::size_t l = 0; l < d_; ++l) out[l] = position(i, l);
}

std::vector<double> Ensemble::positions() const {
    std::vector<double> out(n_ * d_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t l = 0; l < d_; ++l) out[i * d_ + l] = position(i, l);
    return out;
}

double Ensemble::squared_distance(std::size_t i, std::size_t j) const noexcept {
    double s = 0.0;
    for (std::size_t l = 0; l < d_; ++l) {
        const double diff = difference(i, j, l);
        s += diff * diff;
    }
    return s;
}

std::vector<double> draw_step_noise(RngStream& rng, const Params& p) {
    const std::size_t count =
        p.noise_mode == NoiseMode::common ? p.dim : p.n_particles * p.dim;
    std::vector<double> z(count);
    for (double& v : z) v = rng.normal();
    return z;
}

}  // namespace cbo
