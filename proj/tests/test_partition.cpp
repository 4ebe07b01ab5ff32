#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "betafluct/errors.hpp"
#include "betafluct/partition.hpp"

using namespace betafluct;

namespace {

const double pi = std::acos(-1.0);

// Mehta integral with the substitution x = sqrt(n beta/2) lambda
double mehta_log(long n, double beta) {
    const double nb = static_cast<double>(n);
    double s = 0.5 * nb * std::log(2 * pi) - (0.5 * nb + 0.25 * beta * nb * (nb - 1)) * std::log(0.5 * nb * beta);
    for (long j = 1; j <= n; ++j) s += std::lgamma(1 + 0.5 * beta * j) - std::lgamma(1 + 0.5 * beta);
    return s - std::lgamma(nb + 1);
}

const EquilibriumMeasure& gaussian() {
    static const EquilibriumMeasure eq = solve_equilibrium(Potential::polynomial({0, 0, 0.5}), 1, Support{{{-2, 2}}});
    return eq;
}

const EquilibriumMeasure& quartic() {
    static const EquilibriumMeasure eq =
        solve_equilibrium(Potential::polynomial({0, 0, 0.5, 0, 0.25}), 1, Support{{{-1.3, 1.3}}});
    return eq;
}

}  // namespace

TEST_SUITE("partition") {

TEST_CASE("Gaussian partition function against the Mehta integral") {
    for (double beta : {1.0, 2.0, 4.0, 0.7})
        for (long n : {1L, 5L, 64L}) CHECK(log_gaussian_partition(n, beta) == doctest::Approx(mehta_log(n, beta)).epsilon(1e-12));
    // n = 1: int exp(-beta l^2/4) dl = sqrt(4 pi/beta)
    CHECK(log_gaussian_partition(1, 2.0) == doctest::Approx(0.5 * std::log(2 * pi)).epsilon(1e-14));
    // n = 2, beta = 2 by direct quadrature of exp(-(l1^2 + l2^2)) (l1 - l2)^2 / 2
    using boost::math::quadrature::gauss_kronrod;
    auto inner = [](double x) {
        return gauss_kronrod<double, 61>::integrate(
            [x](double y) { return std::exp(-x * x - y * y) * (x - y) * (x - y); }, -9.0, 9.0, 5, 1e-14);
    };
    const double q2 = gauss_kronrod<double, 61>::integrate(inner, -9.0, 9.0, 5, 1e-14) / 2.0;
    CHECK(log_gaussian_partition(2, 2.0) == doctest::Approx(std::log(q2)).epsilon(1e-12));
}

TEST_CASE("c_beta and the fitted constants") {
    CHECK(c_beta(2.0) == doctest::Approx(-1.0 / 12));
    CHECK(c_beta(1.0) == doctest::Approx(c_beta(4.0)) );
    // beta = 2 constant is zeta'(-1) = 1/12 - log A (Glaisher)
    CHECK(fitted_c1(2.0) == doctest::Approx(-0.16542114370045092).epsilon(1e-7));
}

TEST_CASE("semicircle entropy is 1/2 - log 2 pi") {
    CHECK(entropy(gaussian()) == doctest::Approx(0.5 - std::log(2 * pi)).epsilon(1e-10));
    CHECK(entropy_term(100, 1.0, entropy(gaussian())) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("Gaussian residual decays like 1/n") {
    auto residual = [](long n, double beta) {
        const double pred = 0.5 * beta * double(n) * double(n) * (-0.75) + F_beta(n, beta).value;
        return log_gaussian_partition(n, beta) - pred;
    };
    for (double beta : {1.0, 2.0, 4.0}) {
        const double r256 = residual(256, beta), r512 = residual(512, beta);
        CHECK(std::abs(r256) < 0.05 / 256);
        CHECK(std::abs(512 * r512 - 256 * r256) < 1e-3);
    }
    CHECK(std::abs(residual(256, 2.0)) < 1e-6);
}

TEST_CASE("interval constant vanishes for the Gaussian and is beta <-> 4/beta symmetric") {
    for (double beta : {1.0, 2.0, 4.0}) CHECK(std::abs(r_beta(gaussian(), beta).value) < 1e-9);
    const double r1 = r_beta(quartic(), 1.0).value, r4 = r_beta(quartic(), 4.0).value;
    CHECK(r1 == doctest::Approx(r4).epsilon(1e-7));
}

TEST_CASE("contour and collapsed representations agree; beta = 2 closed forms") {
    const auto r = r_beta(quartic(), 2.0);
    CHECK(std::abs(r.imag) < 1e-10);
    CHECK(r.value == doctest::Approx(r_beta_reduced(quartic(), 2.0).value).epsilon(1e-8));
    CHECK(r.value == doctest::Approx(r_two_closed_form(quartic(), KernelNormalization::covariant)).epsilon(1e-6));
    RBetaOptions lit;
    lit.norm = KernelNormalization::literal;
    CHECK(r_beta(quartic(), 2.0, lit).value ==
          doctest::Approx(r_two_closed_form(quartic(), KernelNormalization::literal)).epsilon(1e-6));
}

TEST_CASE("one-cut expansion reproduces the exact Gaussian value") {
    const MultiCutModel m = build_model(gaussian());
    for (double beta : {1.0, 2.0, 4.0}) {
        const auto rep = log_partition(m, 64, beta);
        CHECK(rep.total == doctest::Approx(log_gaussian_partition(64, beta)).epsilon(1e-6));
        const auto rep2 = log_partition_at(rep, m, 128);
        CHECK(rep2.total == doctest::Approx(log_gaussian_partition(128, beta)).epsilon(1e-7));
    }
    CHECK_THROWS_AS(log_partition(m, 5, 2.0), DomainError);
}

}
