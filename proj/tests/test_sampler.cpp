#include <doctest.h>

#include <cmath>
#include <random>

#include "betafluct/errors.hpp"
#include "betafluct/sampler.hpp"

using namespace betafluct;

TEST_SUITE("sampler") {

TEST_CASE("chain configuration validation") {
    ChainConfig c;
    c.n = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ChainConfig{};
    c.beta = -1.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = ChainConfig{};
    c.burn_in = c.steps + 1;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("identical seed and configuration give bit-identical batches") {
    ChainConfig c;
    c.n = 8;
    c.steps = 400;
    c.burn_in = 100;
    c.chains = 2;
    c.seed = 42;
    const auto a = mcmc_sample(c), b = mcmc_sample(c);
    CHECK(a.chains == b.chains);
    CHECK(a.acceptance_rate == b.acceptance_rate);
    CHECK(a.acceptance_rate > 0.0);
    CHECK(a.acceptance_rate < 1.0);
    CHECK(gbe_sample(20, 1.0, 50, 3, 2).chains == gbe_sample(20, 1.0, 50, 3, 2).chains);
    c.seed = 43;
    CHECK(mcmc_sample(c).chains != a.chains);
}

TEST_CASE("tridiagonal model: trace variance 2/beta and exact mean of sum lambda^2") {
    // Var sum lambda = 2/beta and E sum lambda^2 = n + 2/beta - 1 hold exactly at finite n
    for (double beta : {1.0, 2.0, 4.0}) {
        const auto batch = gbe_sample(30, beta, 4000, 11);
        const auto s1 = empirical_stats(batch, TestFunction::polynomial({0, 1}), beta);
        CHECK(std::abs(s1.variance - 2.0 / beta) < 4 * s1.se_variance);
        const auto s2 = empirical_stats(batch, TestFunction::polynomial({0, 0, 1}), beta);
        CHECK(std::abs(s2.mean - (30 + 2.0 / beta - 1)) < 4 * s2.se_mean);
    }
}

TEST_CASE("Metropolis chain agrees in law with the exact sampler (two-sample KS)") {
    ChainConfig c;
    c.n = 12;
    c.beta = 2.0;
    c.burn_in = 1000;
    c.steps = 1000 + 12 * 2000;
    c.chains = 2;
    c.seed = 5;
    const auto m = mcmc_sample(c);
    const auto g = gbe_sample(12, 2.0, 4000, 9);
    const auto h = TestFunction::polynomial({0, 0, 1});
    const auto ks = ks_two_sample(linear_statistic(m, h), linear_statistic(g, h));
    CHECK(ks.p_value > 0.01);
    CHECK(m.acceptance_rate > 0.2);
    CHECK(m.acceptance_rate < 0.6);
}

TEST_CASE("permuting the initial configuration does not change the law") {
    ChainConfig c;
    c.n = 10;
    c.beta = 1.0;
    c.burn_in = 500;
    c.steps = 500 + 10 * 1500;
    c.seed = 21;
    for (int i = 0; i < 10; ++i) c.init.push_back(-1.8 + 0.4 * i);
    const auto a = mcmc_sample(c);
    std::reverse(c.init.begin(), c.init.end());
    std::swap(c.init[2], c.init[7]);
    c.seed = 22;
    const auto b = mcmc_sample(c);
    const auto h = TestFunction::polynomial({0, 1, 1});
    CHECK(ks_two_sample(linear_statistic(a, h), linear_statistic(b, h)).p_value > 0.01);
}

TEST_CASE("KS statistic and p-value against the Kolmogorov series") {
    // samples with known D: x = 0..9, y = 5..14 gives D = 0.5
    std::vector<double> x, y;
    for (int i = 0; i < 10; ++i) {
        x.push_back(i);
        y.push_back(i + 5);
    }
    const auto r = ks_two_sample(x, y);
    CHECK(r.statistic == doctest::Approx(0.5));
    // Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2) with the effective-size correction
    const double ne = 5.0, lam = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * 0.5;
    double q = 0.0;
    for (int j = 1; j <= 100; ++j) q += 2 * ((j % 2) ? 1 : -1) * std::exp(-2.0 * j * j * lam * lam);
    CHECK(r.p_value == doctest::Approx(q).epsilon(1e-10));
    CHECK(ks_two_sample(x, x).p_value == doctest::Approx(1.0));
}

TEST_CASE("too few effective samples is an error") {
    const auto b = gbe_sample(10, 2.0, 50, 1);
    CHECK_THROWS_AS(empirical_stats(b, TestFunction::polynomial({0, 1}), 2.0), InsufficientDataError);
}

TEST_CASE("quadratic fit recovers the curvature") {
    std::vector<double> t, z;
    for (int i = -10; i <= 10; ++i) {
        t.push_back(0.1 * i);
        z.push_back(std::exp(0.7 * 0.01 * i * i));
    }
    const auto f = quadratic_fit(t, z);
    CHECK(f.coefficient == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(f.max_residual < 1e-12);
}

}
