#include <doctest.h>

#include <cmath>
#include <random>

#include "cbo/diagnostics.hpp"
#include "cbo/dynamics.hpp"
#include "cbo/gibbs.hpp"

using namespace cbo;

namespace {

Params params(Scheme s, std::size_t n, std::size_t d, double sigma = 1.0) {
    Params p;
    p.scheme = s;
    p.n_particles = n;
    p.dim = d;
    p.sigma = sigma;
    return p;
}

Ensemble random_ensemble(std::mt19937_64& gen, std::size_t n, std::size_t d) {
    std::uniform_real_distribution<double> u(-2, 2);
    std::vector<double> x(n * d);
    for (auto& v : x) v = u(gen);
    return Ensemble::from_positions(n, d, x);
}

const Objective& rastrigin3() {
    static const Objective obj = registry_get("rastrigin", 3, {{"B", 0.0}, {"C", 0.0}});
    return obj;
}

}  // namespace

TEST_CASE("identical particles are a fixed point of every scheme") {
    const auto e = Ensemble::from_positions(4, 3, std::vector<double>{0.3, -1.1, 2.0, 0.3, -1.1, 2.0,
                                                                      0.3, -1.1, 2.0, 0.3, -1.1, 2.0});
    RngStream rng(3, 1);
    for (Scheme s : {Scheme::euler, Scheme::semi_exact, Scheme::deterministic}) {
        const Ensemble next = step(e, params(s, 4, 3), rastrigin3(), rng);
        CHECK(next.positions() == e.positions());
        CHECK(next.step() == 1);
    }
}

TEST_CASE("a single particle never moves") {
    const auto e = Ensemble::from_positions(1, 3, {0.5, 1.5, -0.25});
    Params p = params(Scheme::euler, 1, 3);
    RngStream rng(1, 1);
    StopCriteria stop;
    stop.max_steps = 50;
    const Trajectory t = run(e, p, rastrigin3(), stop, rng);
    CHECK(t.reason == StopReason::max_steps);
    CHECK(t.steps == 50);
    CHECK(t.final_state.positions() == e.positions());
    for (const auto& r : t.records) CHECK(r.diameter == 0.0);
}

TEST_CASE("sigma = 0 contracts toward the consensus point by the scheme factor") {
    std::mt19937_64 gen(1);
    const auto e = random_ensemble(gen, 10, 3);
    const auto g = summarize(e, evaluate(e, rastrigin3()), 10.0);
    RngStream rng(0, 1);
    for (auto [s, factor] : {std::pair{Scheme::semi_exact, std::exp(-0.01)},
                             std::pair{Scheme::euler, 0.99}, std::pair{Scheme::deterministic, 0.99}}) {
        const Ensemble next = step(e, params(s, 10, 3, 0.0), rastrigin3(), rng);
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t l = 0; l < 3; ++l) {
                const double expect = g.consensus_point[l] + factor * (e.position(i, l) - g.consensus_point[l]);
                CHECK(next.position(i, l) == doctest::Approx(expect).epsilon(1e-13));
            }
    }
}

TEST_CASE("scheme-specific steppers reject a mismatched scheme") {
    std::mt19937_64 gen(1);
    const auto e = random_ensemble(gen, 3, 3);
    RngStream rng(0, 1);
    CHECK_THROWS_AS(step_euler(e, params(Scheme::semi_exact, 3, 3), rastrigin3(), rng), ParamError);
    CHECK_THROWS_AS(step_semi_exact(e, params(Scheme::euler, 3, 3), rastrigin3(), rng), ParamError);
    CHECK_THROWS_AS(step_deterministic(e, params(Scheme::euler, 3, 3), rastrigin3()), ParamError);
    CHECK_THROWS_AS(step(e, params(Scheme::euler, 4, 3), rastrigin3(), rng), ParamError);
}

TEST_CASE("euler step equals the literal consensus-form update") {
    // The consensus form's noise term carries sigma sqrt(h) (X* - X^i) Z; with -Z it is the
    // deviation form used by step_euler, an equality in law.
    std::mt19937_64 gen(17);
    for (NoiseMode mode : {NoiseMode::common, NoiseMode::independent}) {
        Params p = params(Scheme::euler, 9, 3);
        p.noise_mode = mode;
        for (int trial = 0; trial < 50; ++trial) {
            const auto e = random_ensemble(gen, 9, 3);
            RngStream rng(trial, 1);
            RngStream copy = rng;
            const auto z = draw_step_noise(copy, p);
            const Ensemble next = step_euler(e, p, rastrigin3(), rng);

            const auto psi = gibbs_weights(evaluate(e, rastrigin3()), p.beta);
            const auto x = e.positions();
            for (std::size_t i = 0; i < 9; ++i)
                for (std::size_t l = 0; l < 3; ++l) {
                    double drift = 0, noise = 0;
                    const double zl = mode == NoiseMode::common ? z[l] : z[i * 3 + l];
                    for (std::size_t k = 0; k < 9; ++k) {
                        drift += psi[k] * (x[k * 3 + l] - x[i * 3 + l]);
                        noise += psi[k] * (x[k * 3 + l] - x[i * 3 + l]) * (-zl);
                    }
                    const double literal =
                        x[i * 3 + l] + p.lambda * p.h * drift + p.sigma * std::sqrt(p.h) * noise;
                    CHECK(std::abs(next.position(i, l) - literal) < 1e-10);
                }
        }
    }
}

TEST_CASE("semi-exact step follows relax-then-kick with the old consensus point") {
    std::mt19937_64 gen(23);
    Params p = params(Scheme::semi_exact, 6, 3);
    const auto e = random_ensemble(gen, 6, 3);
    RngStream rng(2, 1);
    RngStream copy = rng;
    const auto w = draw_step_noise(copy, p);
    const auto g = summarize(e, evaluate(e, rastrigin3()), p.beta);
    const Ensemble next = step_semi_exact(e, p, rastrigin3(), rng);
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t l = 0; l < 3; ++l) {
            const double c = g.consensus_point[l];
            const double hat = c + (e.position(i, l) - c) * std::exp(-p.lambda * p.h);
            const double expect = hat + p.sigma * std::sqrt(p.h) * (hat - c) * w[l];
            CHECK(std::abs(next.position(i, l) - expect) < 1e-12);
        }
}

TEST_CASE("deviation ratios stay fixed under common noise") {
    std::mt19937_64 gen(31);
    for (Scheme s : {Scheme::euler, Scheme::semi_exact}) {
        Params p = params(s, 10, 3);
        Ensemble e = random_ensemble(gen, 10, 3);
        const auto dev0 = deviations_from_mean(e);
        RngStream rng(4, 1);
        for (int n = 1; n <= 1000; ++n) {
            e = step(e, p, rastrigin3(), rng);
            if (n % 100) continue;
            const auto dev = deviations_from_mean(e);
            for (std::size_t l = 0; l < 3; ++l)
                for (std::size_t i = 1; i < 10; ++i) {
                    const double r0 = dev0[i * 3 + l] / dev0[l];
                    const double r = dev[i * 3 + l] / dev[l];
                    CHECK(std::abs(r - r0) <= 1e-9 * std::abs(r0));
                }
        }
    }
}

TEST_CASE("run honours max_steps and stride") {
    std::mt19937_64 gen(5);
    Params p = params(Scheme::semi_exact, 5, 3);
    RngStream rng(0, 1);
    StopCriteria stop;
    stop.max_steps = 37;
    const Trajectory t = run(random_ensemble(gen, 5, 3), p, rastrigin3(), stop, rng, 10);
    CHECK(t.steps == 37);
    CHECK(t.final_state.step() == 37);
    REQUIRE(t.records.size() == 5);
    CHECK(t.records.back().step == 37);
    for (std::size_t k = 0; k + 1 < t.records.size(); ++k) CHECK(t.records[k].step == int(10 * k));

    stop.max_steps = 0;
    CHECK_THROWS_AS(run(random_ensemble(gen, 5, 3), p, rastrigin3(), stop, rng), ParamError);
}

TEST_CASE("diameter stop fires at the first step below tolerance") {
    // Diameter 4 * 0.99^n first drops below 1e-6 at n = 1513.
    Params p = params(Scheme::deterministic, 2, 1, 0.0);
    const Objective obj = registry_get("sphere", 1, {});
    RngStream rng(0, 1);
    StopCriteria stop;
    stop.max_steps = 100000;
    stop.diameter_tol = 1e-6;
    const Trajectory t = run(Ensemble::from_positions(2, 1, {-2, 2}), p, obj, stop, rng);
    CHECK(t.reason == StopReason::diameter);
    const auto n = static_cast<std::int64_t>(std::ceil(std::log(4 / 1e-6) / -std::log(0.99)));
    CHECK(n == 1513);
    CHECK(t.steps == n);
}

TEST_CASE("wall-time limit stops the run") {
    Params p = params(Scheme::semi_exact, 2, 1);
    const Objective obj = registry_get("sphere", 1, {});
    RngStream rng(0, 1);
    StopCriteria stop;
    stop.max_steps = 1000000000;
    stop.wall_limit = std::chrono::duration<double>(0.0);
    const Trajectory t = run(Ensemble::from_positions(2, 1, {-2, 2}), p, obj, stop, rng);
    CHECK(t.reason == StopReason::wall_time);
}

TEST_CASE("Gibbs sandwich holds at every recorded step") {
    std::mt19937_64 gen(6);
    Params p = params(Scheme::semi_exact, 30, 3);
    RngStream rng(0, 1);
    StopCriteria stop;
    stop.max_steps = 300;
    const Ensemble init = random_ensemble(gen, 30, 3);
    const Trajectory t = run(init, p, rastrigin3(), stop, rng);
    CHECK(t.records.size() == 301);
    Ensemble e = init;
    RngStream replay(0, 1);
    for (const auto& r : t.records) {
        const auto v = evaluate(e, rastrigin3());
        const double lo = *std::min_element(v.begin(), v.end());
        const double f = -r.log_gibbs_mass / p.beta;
        CHECK(lo <= f + 1e-12 * std::max(1.0, lo));
        CHECK(f <= lo + std::log(30.0) / p.beta + 1e-12 * std::max(1.0, lo));
        if (r.step < t.steps) e = step(e, p, rastrigin3(), replay);
    }
}

TEST_CASE("non-finite objective values are reported with step and particle") {
    Objective bad;
    bad.name = "bad";
    bad.dim = 1;
    bad.eval = [](std::span<const double> x) { return x[0] > 1.5 ? NAN : x[0] * x[0]; };
    Params p = params(Scheme::semi_exact, 3, 1);
    RngStream rng(0, 1);
    StopCriteria stop;
    try {
        run(Ensemble::from_positions(3, 1, {0, 1, 2}), p, bad, stop, rng);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(e.index() == 2);
        CHECK(std::string(e.what()).find("step 0") != std::string::npos);
    }
}

TEST_CASE("seeded runs replay bit for bit") {
    Params p = params(Scheme::euler, 20, 2);
    const Objective obj = registry_get("rastrigin", 2, {{"B", 0.0}, {"C", 0.0}});
    const std::vector<double> lo(2, -2.0), hi(2, 2.0);
    StopCriteria stop;
    stop.max_steps = 200;
    const auto a = run_from_seed(p, obj, lo, hi, stop, 99);
    const auto b = run_from_seed(p, obj, lo, hi, stop, 99);
    CHECK(a.final_state.positions() == b.final_state.positions());
    const auto c = run_from_seed(p, obj, lo, hi, stop, 100);
    CHECK(a.final_state.positions() != c.final_state.positions());
    const auto d = run_from_seed(p, obj, lo, hi, stop, 100, 1, 99);
    CHECK(d.records.front().mean == a.records.front().mean);
}

TEST_CASE("uniform initialization") {
    Params p = params(Scheme::euler, 100000, 2);
    const std::vector<double> lo = {-2, 1}, hi = {2, 5};
    RngStream rng(8, 0);
    const Ensemble e = init_uniform(p, lo, hi, rng);
    double m0 = 0, m1 = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
        CHECK(e.position(i, 0) >= -2);
        CHECK(e.position(i, 0) < 2);
        CHECK(e.position(i, 1) >= 1);
        CHECK(e.position(i, 1) < 5);
        m0 += e.position(i, 0) / 1e5;
        m1 += e.position(i, 1) / 1e5;
    }
    const double sd_mean = 4 / std::sqrt(12.0) / std::sqrt(1e5);
    CHECK(std::abs(m0 - 0) < 4 * sd_mean);
    CHECK(std::abs(m1 - 3) < 4 * sd_mean);
    CHECK_THROWS_AS(init_uniform(p, std::vector<double>{0, 0}, std::vector<double>{0, 1}, rng), ParamError);
    CHECK_THROWS_AS(init_uniform(p, std::vector<double>{0}, std::vector<double>{1}, rng), ParamError);
}
