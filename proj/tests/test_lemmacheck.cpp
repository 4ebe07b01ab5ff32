#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "betafluct/errors.hpp"
#include "betafluct/lemmacheck.hpp"

using namespace betafluct;

namespace {

const double pi = std::acos(-1.0);

// 24 int_x^X (2t + t cos t - 3 sin t)/t^5 dt plus the 16/X^3 tail of the non-oscillating part
double factor_by_quadrature(double x) {
    const double X = 4000.0;
    auto f = [](double t) { return (2 * t + t * std::cos(t) - 3 * std::sin(t)) / std::pow(t, 5); };
    double s = 0.0;
    for (double a = x; a < X; a += 2.0) {
        s += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, std::min(a + 2.0, X), 0, 1e-15);
    }
    return 24.0 * s + 16.0 / (X * X * X);
}

}  // namespace

TEST_SUITE("lemmas") {

TEST_CASE("smoothed kernel: value at zero, log branch, continuity at the knot") {
    const KernelA ka{0.5};
    CHECK(kernel_a(0.0, ka) == doctest::Approx(std::log(2.0) + 13.0 / 12.0));
    CHECK(kernel_a(0.8, ka) == doctest::Approx(std::log(1 / 0.8)));
    CHECK(kernel_a(-0.8, ka) == doctest::Approx(std::log(1 / 0.8)));
    const auto j = knot_jumps(ka);
    for (int m = 0; m < 4; ++m) CHECK(std::abs(j[m]) < 1e-12);
    CHECK(j[4] == doctest::Approx(-24.0 / std::pow(0.5, 4)));
    const auto fd = knot_jumps_fd(ka);
    CHECK(std::abs(fd[0]) < 1e-12);
    CHECK(std::abs(fd[1]) < 1e-6);
    // derivatives of the inner branch near 0: a(l) - a(0) ~ -3 l^2 / d^2
    const double h = 1e-4;
    CHECK((kernel_a(h, ka) - kernel_a(0.0, ka)) / (h * h) == doctest::Approx(-3.0 / 0.25).epsilon(1e-3));
}

TEST_CASE("Fourier factor against direct quadrature") {
    for (double x : {0.05, 0.7, 3.0, 11.0, 40.0, 60.0}) CHECK(sine_transform_factor(x) == doctest::Approx(factor_by_quadrature(x)).epsilon(1e-8));
    // small-x limit pi/2 (the correction is linear in x): the transform behaves like pi/k
    CHECK(sine_transform_factor(1e-10) == doctest::Approx(pi / 2).epsilon(1e-9));
    CHECK(fourier_ratio(1e-4, KernelA{0.5}) < 1.0);
}

TEST_CASE("sine tail against tanh-sinh on a finite range plus the asymptotic remainder") {
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double x : {1.0, 5.0}) {
        double s = 0.0;
        for (double a = x; a < 400.0; a += 5.0) s += ts.integrate([](double t) { return std::sin(t) / std::pow(t, 5); }, a, a + 5.0);
        CHECK(sine_tail(x) == doctest::Approx(s).epsilon(1e-7));
    }
}

TEST_CASE("spectral gap certificate") {
    const auto g = spectral_gap(KernelA{0.5});
    CHECK(g.min_fourier > 0.0);
    CHECK(g.delta1 > 0.0);
    CHECK(g.delta1_refined == doctest::Approx(g.delta1).epsilon(1e-2));
}

TEST_CASE("single-interval log integral: quadrature vs -pi zeta^k / k") {
    const Interval s{-1.0, -0.05};
    for (int k : {1, 3, 10}) {
        for (double lam : {0.0, 0.2}) {
            const auto r = single_integral(s, lam, k, 0.02);
            CHECK(r.quadrature == doctest::Approx(r.closed_form).epsilon(1e-9));
        }
    }
    // k = 1 on [-1,1]: int log|l - mu| mu / sqrt(1 - mu^2) = -pi zeta, zeta = l - sqrt(l^2 - 1)
    const auto r = single_integral(Interval{-1.0, 1.0}, 3.0, 1, 0.0);
    CHECK(r.closed_form == doctest::Approx(-pi * (3.0 - std::sqrt(8.0))).epsilon(1e-12));
    CHECK_THROWS_AS(single_integral(s, -0.5, 1, 0.02), DomainError);
}

TEST_CASE("cross coefficients: symmetry, reduction and decay") {
    const Interval s1{-1.0, -0.05}, s2{0.05, 1.0};
    const auto a = cross_coeff(s1, s2, 2, 3, 0.02), b = cross_coeff(s2, s1, 3, 2, 0.02);
    CHECK(a.quadrature == doctest::Approx(b.quadrature).epsilon(1e-12));
    CHECK(a.quadrature == doctest::Approx(a.reduced).epsilon(1e-8));
    CHECK_THROWS_AS(cross_coeff(s1, Interval{-0.5, 1.0}, 1, 1, 0.02), DomainError);
    const auto d = cross_decay(s1, s2, 0.02);
    CHECK(d.slope < 0.0);
    CHECK(d.r2 > 0.99);
}

}
