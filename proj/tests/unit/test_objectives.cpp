#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cbo/core.hpp"
#include "cbo/objectives.hpp"

using namespace cbo;

TEST_CASE("rastrigin hand values") {
    const std::vector<double> at_b = {1.5, 1.5, 1.5};
    CHECK(rastrigin(at_b, 1.5, 0.25) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(rastrigin(std::vector<double>{1, 1}, 0, 0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(rastrigin(std::vector<double>{0.5}, 0, 0) == doctest::Approx(20.25).epsilon(1e-14));
}

TEST_CASE("sphere hand values") {
    CHECK(sphere(std::vector<double>{0, 0, 0}) == 0.0);
    CHECK(sphere(std::vector<double>{3, 4}) == 25.0);
}

TEST_CASE("registry builds objectives with metadata") {
    const Objective r = registry_get("rastrigin", 2, {{"B", 0.0}, {"C", 0.0}});
    REQUIRE(r.known_min_value);
    CHECK(*r.known_min_value == 0.0);
    CHECK(*r.known_min_point == std::vector<double>{0, 0});
    CHECK(*r.curvature_bound == doctest::Approx(2 + 40 * std::numbers::pi * std::numbers::pi));

    const Objective shifted = registry_get("rastrigin", 3, {{"B", 1.25}, {"C", 2.0}});
    CHECK(std::abs(shifted(*shifted.known_min_point) - *shifted.known_min_value) < 1e-12);

    const Objective s = registry_get("sphere", 5, {});
    CHECK(*s.known_min_point == std::vector<double>(5, 0.0));
    CHECK(*s.known_min_value == 0.0);
    CHECK(*s.curvature_bound >= 0.0);
}

TEST_CASE("registry errors") {
    CHECK_THROWS_AS(registry_get("nope", 2, {}), ParamError);
    CHECK_THROWS_AS(registry_get("rastrigin", 2, {{"B", 0.0}}), ParamError);
    CHECK_THROWS_AS(registry_get("sphere", 2, {{"B", 0.0}}), ParamError);
    CHECK_THROWS_AS(registry_get("sphere", 0, {}), ParamError);
}

TEST_CASE("objective list is alphabetical") {
    const auto list = list_objectives();
    REQUIRE(list.size() >= 2);
    for (std::size_t k = 1; k < list.size(); ++k) CHECK(list[k - 1].name < list[k].name);
    CHECK(list[0].name == "rastrigin");
    CHECK(list[1].name == "sphere");
}

TEST_CASE("rastrigin translation covariance and lower bound") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int k = 0; k < 100000; ++k) {
        std::vector<double> x = {u(gen), u(gen), u(gen)};
        const double b = u(gen) / 5, c = u(gen);
        CHECK(rastrigin(x, b, c) >= c);
        if (k % 100 == 0) {
            const double s = u(gen);
            std::vector<double> xs = x;
            for (auto& xi : xs) xi += s;
            CHECK(std::abs(rastrigin(xs, b + s, c) - rastrigin(x, b, c)) < 1e-10);
        }
    }
}

TEST_CASE("central differences stay under the curvature bound") {
    const Objective r = registry_get("rastrigin", 2, {{"B", 0.3}, {"C", 0.0}});
    const double bound = *r.curvature_bound;
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(-5, 5);
    const double eps = 1e-3;  // the cosine term's truncation error only shrinks |d2|
    for (int k = 0; k < 10000; ++k) {
        std::vector<double> x = {u(gen), u(gen)};
        for (std::size_t l = 0; l < 2; ++l) {
            auto xp = x, xm = x;
            xp[l] += eps;
            xm[l] -= eps;
            const double d2 = (r(xp) - 2 * r(x) + r(xm)) / (eps * eps);
            CHECK(std::abs(d2) <= bound + 1e-6);
        }
    }
}
