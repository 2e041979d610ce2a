#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cbo/diagnostics.hpp"
#include "cbo/verify.hpp"

using namespace cbo;

namespace {

PairwiseConfig pair_config(Scheme s, double sigma, std::int64_t steps) {
    PairwiseConfig c;
    c.params.scheme = s;
    c.params.sigma = sigma;
    c.params.n_particles = 2;
    c.params.dim = 1;
    c.objective = registry_get("sphere", 1, {});
    c.initial = Ensemble::from_positions(2, 1, {0.5, -0.5});
    c.steps = steps;
    return c;
}

// E log|a + b Z| by composite Simpson on [-12, 12], splitting at the root.
double expected_log_abs(double a, double b) {
    const double root = -a / b;
    auto f = [&](double z) {
        return std::log(std::abs(a + b * z)) * std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
    };
    auto simpson = [&](double lo, double hi, int n) {
        const double dz = (hi - lo) / n;
        double s = f(lo) + f(hi);
        for (int k = 1; k < n; ++k) s += f(lo + k * dz) * (k % 2 ? 4 : 2);
        return s * dz / 3;
    };
    // Substitution z = root +- u^2 removes the log singularity at the root.
    auto near = [&](double sign, double width) {
        const int n = 20000;
        const double du = std::sqrt(width) / n;
        double s = 0;
        for (int k = 0; k < n; ++k) {
            const double u = (k + 0.5) * du;
            s += f(root + sign * u * u) * 2 * u * du;
        }
        return s;
    };
    return simpson(-12, root - 1e-2, 200000) + near(-1, 1e-2) + near(1, 1e-2) +
           simpson(root + 1e-2, 12, 200000);
}

}  // namespace

TEST_CASE("closed-form oracles") {
    CHECK(oracle_deterministic_diameter(4, 1, 0) == 4);
    CHECK(oracle_deterministic_diameter(4, 1, std::log(2.0)) == doctest::Approx(2).epsilon(1e-15));
    CHECK(oracle_discrete_mean(0.7, 1, 0.01, 0) == 0.7);
    CHECK(oracle_discrete_mean(1, 1, 0.01, 100) == doctest::Approx(0.366032341273229).epsilon(1e-13));
    CHECK_THROWS_AS(oracle_discrete_mean(1, 1, 1.0, 3), ParamError);
    CHECK_THROWS_AS(oracle_discrete_mean(1, 1, 0.01, -1), ParamError);
    CHECK(oracle_continuous_exponent(1, 0) == -1);
    CHECK(oracle_continuous_exponent(1, 1) == -1.5);
    CHECK(oracle_continuous_exponent(1, 2) == -3);
    CHECK(oracle_discrete_second_moment(1, 1, 0.01, 1, 1) == doctest::Approx(1 - 0.01 * 0.99));
}

TEST_CASE("second-moment oracle at sigma = 0 is the squared mean oracle") {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int k = 0; k < 100; ++k) {
        const double lambda = 0.1 + 4 * u(gen);
        const double h = u(gen) / lambda;
        const std::int64_t n = static_cast<std::int64_t>(u(gen) * 300);
        const double mean = oracle_discrete_mean(1, lambda, h, n);
        const double sq = oracle_discrete_second_moment(1, lambda, h, 0, n);
        CHECK(std::abs(sq - mean * mean) <= 1e-12 * std::max(1e-300, mean * mean));
    }
}

TEST_CASE("moment factor matches E[(1 - lambda h + sigma sqrt(h) Z)^2]") {
    RngStream rng(5, 0);
    std::vector<double> samples(1000000);
    const double lambda = 1, sigma = 1, h = 0.01;
    for (auto& s : samples) {
        const double f = 1 - lambda * h + sigma * std::sqrt(h) * rng.normal();
        s = f * f;
    }
    const McEstimate est = mc_estimate(samples);
    CHECK(std::abs(est.mean - (1 - h * decay_margin(lambda, h, sigma))) <= 3 * est.std_error);
}

TEST_CASE("mc_estimate") {
    const McEstimate e = mc_estimate(std::vector<double>{1, 2, 3, 4});
    CHECK(e.mean == 2.5);
    CHECK(e.std_error == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
    CHECK(e.n_samples == 4);
    CHECK_THROWS_AS(mc_estimate(std::vector<double>{1}), ParamError);
}

TEST_CASE("noise-free pairwise statistic has zero standard error") {
    auto c = pair_config(Scheme::euler, 0.0, 100);
    const McEstimate e = estimate_pairwise_statistic(c, PairwiseStatistic::mean_diff, 5);
    CHECK(e.std_error == 0.0);
    CHECK(std::abs(e.mean - oracle_discrete_mean(1, 1, 0.01, 100)) <= 1e-12 * e.mean);
}

TEST_CASE("pairwise statistic preconditions") {
    auto c = pair_config(Scheme::euler, 1.0, 100);
    CHECK_THROWS_AS(estimate_pairwise_statistic(c, PairwiseStatistic::mean_diff, 1), ParamError);
    c.window_start = 1.0;
    c.window_end = 1.0;
    CHECK_THROWS_AS(estimate_pairwise_statistic(c, PairwiseStatistic::log_diff_slope, 10), ParamError);
    c = pair_config(Scheme::euler, 1.0, 100);
    c.j = 0;
    CHECK_THROWS_AS(estimate_pairwise_statistic(c, PairwiseStatistic::mean_diff, 10), ParamError);
}

TEST_CASE("parallel and serial estimates agree exactly") {
    auto c = pair_config(Scheme::euler, 1.0, 200);
    const auto a = sample_pairwise_statistic(c, PairwiseStatistic::second_moment, 64);
    c.jobs = 4;
    const auto b = sample_pairwise_statistic(c, PairwiseStatistic::second_moment, 64);
    CHECK(a == b);
}

TEST_CASE("semi-exact log slope at sigma = 1") {
    auto c = pair_config(Scheme::semi_exact, 1.0, 0);
    const McEstimate e = estimate_pairwise_statistic(c, PairwiseStatistic::log_diff_slope, 100);
    CHECK(std::abs(e.mean + 1.5) <= 0.05 * 1.5);
}

TEST_CASE("euler second moment matches its oracle") {
    // Light-tailed horizon; the n = 500 case is exercised by the acceptance suite.
    auto c = pair_config(Scheme::euler, 1.0, 100);
    const McEstimate e = estimate_pairwise_statistic(c, PairwiseStatistic::second_moment, 10000);
    CHECK(std::abs(e.mean - oracle_discrete_second_moment(1, 1, 0.01, 1, 100)) <= 3 * e.std_error);
}

TEST_CASE("log rate converges to the Lyapunov exponent, not hm/2") {
    auto c = pair_config(Scheme::euler, 1.0, 5000);
    const McEstimate rate = estimate_pairwise_statistic(c, PairwiseStatistic::log_rate, 100);
    const double lyapunov = -expected_log_abs(0.99, 0.1);
    CHECK(lyapunov == doctest::Approx(0.015233).epsilon(1e-3));
    CHECK(std::abs(rate.mean - lyapunov) <= 3 * rate.std_error);

    const McEstimate y = estimate_pairwise_statistic(c, PairwiseStatistic::contraction_exponent, 100);
    CHECK(std::abs(y.mean - 0.5 * 0.01 * 0.99) <= 0.1 * 0.5 * 0.01 * 0.99);
}

TEST_CASE("tolerance rules") {
    const ToleranceRule exact{RuleKind::exact_relative, 1e-12};
    CHECK(exact.accepts(1.0, {1.0 + 5e-13, 0, 1}));
    CHECK_FALSE(exact.accepts(1.0, {1.0 + 5e-12, 0, 1}));
    const ToleranceRule mc{RuleKind::std_errors, 3};
    CHECK(mc.accepts(0.0, {0.29, 0.1, 100}));
    CHECK_FALSE(mc.accepts(0.0, {0.31, 0.1, 100}));
    const ToleranceRule rel{RuleKind::relative, 0.1};
    CHECK(rel.accepts(-1.5, {-1.4, 0.01, 100}));
    CHECK_FALSE(rel.accepts(-1.5, {-1.3, 0.01, 100}));
    const ToleranceRule trend{RuleKind::nonincreasing, 0};
    CHECK(trend.accepts(0, {-0.2, 0, 3}));
    CHECK_FALSE(trend.accepts(0, {0.2, 0, 3}));
    CHECK_FALSE(mc.describe().empty());
}

TEST_CASE("theorem id names round-trip") {
    for (TheoremId id : all_theorem_ids()) CHECK(parse_theorem_id(to_string(id)) == id);
    CHECK_FALSE(parse_theorem_id("thm99").has_value());
}

TEST_CASE("exact deterministic checks pass") {
    VerifyConfig cfg;
    for (TheoremId id : {TheoremId::thm31, TheoremId::thm33}) {
        const auto rep = verify_theorem(id, cfg);
        CHECK(rep.verdict == Verdict::pass);
        CHECK(rep.consistent());
        CHECK(rep.estimate.std_error == 0.0);
    }
}

TEST_CASE("hypotheses unmet are reported, not failed") {
    VerifyConfig cfg;
    cfg.sigma = 2;
    const auto rep = verify_theorem(TheoremId::thm34ii, cfg);
    CHECK(rep.verdict == Verdict::hypotheses_unmet);
    CHECK(rep.note.find("2 lambda > sigma^2") != std::string::npos);
    CHECK(verify_theorem(TheoremId::thm34iii, cfg).verdict == Verdict::hypotheses_unmet);
    CHECK(verify_theorem(TheoremId::laplace, cfg).verdict == Verdict::hypotheses_unmet);
    cfg.sigma = 0;
    CHECK(verify_theorem(TheoremId::thm34i, cfg).verdict == Verdict::hypotheses_unmet);
    cfg = VerifyConfig{};
    cfg.h = 1.5;
    CHECK(verify_theorem(TheoremId::thm33, cfg).verdict == Verdict::hypotheses_unmet);
}

TEST_CASE("mean decay report") {
    VerifyConfig cfg;
    cfg.runs = 2000;
    const auto rep = verify_theorem(TheoremId::thm34i, cfg);
    CHECK(rep.consistent());
    CHECK(rep.oracle == doctest::Approx(std::pow(0.99, 500)));
    CHECK(rep.estimate.n_samples == 2000);
    CHECK(rep.verdict == Verdict::pass);
}

TEST_CASE("beta sweep on the sphere succeeds for every beta") {
    SweepConfig sc;
    sc.params.scheme = Scheme::semi_exact;
    sc.objective = registry_get("sphere", 2, {});
    sc.init_low = {-2, -2};
    sc.init_high = {2, 2};
    sc.stop.max_steps = 3000;
    sc.stop.diameter_tol = 1e-6;
    const std::vector<double> betas = {1, 30};
    const auto rows = beta_sweep(sc, betas);
    REQUIRE(rows.size() == 2);
    for (const auto& r : rows) {
        CHECK(r.success_rate == 1.0);
        CHECK(r.runs == 20);
        CHECK(r.min_final_value <= r.median_final_value);
    }
    CHECK_THROWS_AS(beta_sweep(sc, std::vector<double>{10}), ParamError);
    Objective anon = sc.objective;
    anon.known_min_point.reset();
    sc.objective = anon;
    CHECK_THROWS_AS(beta_sweep(sc, betas), ParamError);
}
