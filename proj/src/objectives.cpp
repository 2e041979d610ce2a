#include "cbo/objectives.hpp"

#include <cmath>
#include <numbers>

#include "cbo/core.hpp"

namespace cbo {

double rastrigin(std::span<const double> x, double shift, double offset) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double s = 0.0;
    for (double xi : x) {
        const double u = xi - shift;
        s += u * u - 10.0 * std::cos(two_pi * u) + 10.0;
    }
    return s + offset;
}

double sphere(std::span<const double> x) {
    double s = 0.0;
    for (double xi : x) s += xi * xi;
    return s;
}

double rastrigin_curvature_bound() {
    return 2.0 + 40.0 * std::numbers::pi * std::numbers::pi;
}

namespace {

struct Entry {
    ObjectiveInfo info;
    Objective (*make)(std::size_t dim, const ObjectiveParams& params);
};

Objective make_rastrigin(std::size_t dim, const ObjectiveParams& params) {
    const double b = params.at("B");
    const double c = params.at("C");
    Objective obj;
    obj.name = "rastrigin";
    obj.dim = dim;
    obj.eval = [b, c](std::span<const double> x) { return rastrigin(x, b, c); };
    obj.known_min_point = std::vector<double>(dim, b);
    obj.known_min_value = c;
    obj.curvature_bound = rastrigin_curvature_bound();
    return obj;
}

Objective make_sphere(std::size_t dim, const ObjectiveParams&) {
    Objective obj;
    obj.name = "sphere";
    obj.dim = dim;
    obj.eval = [](std::span<const double> x) { return sphere(x); };
    obj.known_min_point = std::vector<double>(dim, 0.0);
    obj.known_min_value = 0.0;
    obj.curvature_bound = 2.0;
    return obj;
}

// Keep sorted by name.
const std::vector<Entry>& registry() {
    static const std::vector<Entry> entries = {
        {{"rastrigin", {"B", "C"}, "sum (x_i-B)^2 - 10 cos(2 pi (x_i-B)) + 10, plus C; argmin (B,..,B)"},
         &make_rastrigin},
        {{"sphere", {}, "sum x_i^2; argmin origin"}, &make_sphere},
    };
    return entries;
}

}  // namespace

std::vector<ObjectiveInfo> list_objectives() {
    std::vector<ObjectiveInfo> out;
    for (const auto& e : registry()) out.push_back(e.info);
    return out;
}

Objective registry_get(const std::string& name, std::size_t dim, const ObjectiveParams& params) {
    if (dim == 0) throw ParamError("objective dim must be >= 1");
    for (const auto& e : registry()) {
        if (e.info.name != name) continue;
        for (const auto& key : e.info.required_params) {
            auto it = params.find(key);
            if (it == params.end())
                throw ParamError("objective '" + name + "' requires parameter '" + key + "'");
            if (!std::isfinite(it->second))
                throw ParamError("objective parameter '" + key + "' must be finite");
        }
        for (const auto& [key, value] : params) {
            bool known = false;
            for (const auto& r : e.info.required_params) known = known || r == key;
            if (!known)
                throw ParamError("objective '" + name + "' does not take parameter '" + key + "'");
        }
        return e.make(dim, params);
    }
    throw ParamError("unknown objective '" + name + "'");
}

}  // namespace cbo
