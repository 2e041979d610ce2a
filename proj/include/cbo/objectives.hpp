#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cbo {

/// An objective L: R^d -> R plus what is known about it.
struct Objective {
    std::string name;
    std::size_t dim = 0;
    std::function<double(std::span<const double>)> eval;
    std::optional<std::vector<double>> known_min_point;
    std::optional<double> known_min_value;
    /// C_L: bound on the Hessian spectral norm and on every |d^2 L / dx_l^2|.
    std::optional<double> curvature_bound;

    double operator()(std::span<const double> x) const { return eval(x); }
};

/// sum_i [(x_i - B)^2 - 10 cos(2 pi (x_i - B)) + 10] + C
double rastrigin(std::span<const double> x, double shift, double offset);

/// sum_i x_i^2
double sphere(std::span<const double> x);

/// Sup over R^d of |d^2/dx_l^2 rastrigin| = 2 + 40 pi^2 (diagonal Hessian).
double rastrigin_curvature_bound();

struct ObjectiveInfo {
    std::string name;
    std::vector<std::string> required_params;
    std::string description;
};

using ObjectiveParams = std::map<std::string, double>;

/// Registered objectives in alphabetical order.
std::vector<ObjectiveInfo> list_objectives();

/// Builds a registered objective. Throws ParamError on an unknown name, a
/// missing required parameter, an unexpected parameter, or dim == 0.
Objective registry_get(const std::string& name, std::size_t dim, const ObjectiveParams& params);

}  // namespace cbo
