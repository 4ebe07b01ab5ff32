#include <doctest.h>

#include <cmath>

#include "betafluct/equilibrium.hpp"
#include "betafluct/errors.hpp"

using namespace betafluct;

namespace {

const double pi = std::acos(-1.0);

EquilibriumMeasure gaussian() { return solve_equilibrium(Potential::polynomial({0, 0, 0.5}), 1, Support{{{-1.5, 2.5}}}); }

EquilibriumMeasure two_cut() {
    return solve_equilibrium(Potential::polynomial({0, 0, -2, 0, 0.25}), 2, Support{{{-2.6, -1.2}, {1.1, 2.4}}});
}

}  // namespace

TEST_SUITE("equilibrium") {

TEST_CASE("Gaussian potential gives the semicircle law") {
    const auto eq = gaussian();
    CHECK(eq.support.intervals[0].a == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(eq.support.intervals[0].b == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(eq.energy == doctest::Approx(-0.75).epsilon(1e-10));
    for (double x : {-1.9, -0.4, 0.0, 1.3}) CHECK(density(eq, x) == doctest::Approx(std::sqrt(4 - x * x) / (2 * pi)).epsilon(1e-10));
    // g(z) = (z - sqrt(z^2 - 4))/2
    const cd z(0.7, 0.9);
    const cd g = 0.5 * (z - std::sqrt(z - 2.0) * std::sqrt(z + 2.0));
    CHECK(std::abs(stieltjes(eq, z) - g) < 1e-10);
}

TEST_CASE("scaled Gaussian: support 2 sigma, energy shifted by log sigma") {
    const double s = 1.7;
    const auto eq = solve_equilibrium(Potential::polynomial({0, 0, 0.5 / (s * s)}), 1, Support{{{-2, 2}}});
    CHECK(eq.support.intervals[0].b == doctest::Approx(2 * s).epsilon(1e-10));
    CHECK(eq.energy == doctest::Approx(-0.75 + std::log(s)).epsilon(1e-10));
}

TEST_CASE("one-cut quartic endpoint from the algebraic equation 12 g a^4 + a^2 = 1") {
    const double g = 0.25;
    const auto eq = solve_equilibrium(Potential::polynomial({0, 0, 0.5, 0, g}), 1, Support{{{-1.3, 1.3}}});
    const double a2 = (-1 + std::sqrt(1 + 48 * g)) / (24 * g);
    CHECK(eq.support.intervals[0].b == doctest::Approx(2 * std::sqrt(a2)).epsilon(1e-10));
    CHECK(integrate_density(eq, [](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two-cut quartic support, masses and effective potential") {
    const auto eq = two_cut();
    CHECK(eq.support.intervals[0].a == doctest::Approx(-std::sqrt(6.0)).epsilon(1e-10));
    CHECK(eq.support.intervals[0].b == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-10));
    CHECK(eq.support.intervals[1].a == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(eq.support.intervals[1].b == doctest::Approx(std::sqrt(6.0)).epsilon(1e-10));
    CHECK(eq.masses[0] == doctest::Approx(0.5).epsilon(1e-10));
    // rho = |lambda| sqrt((6 - l^2)(l^2 - 2)) / (2 pi) for V = l^4/4 - 2 l^2
    for (double x : {-2.2, 1.5, 2.0}) {
        const double ref = std::abs(x) * std::sqrt((6 - x * x) * (x * x - 2)) / (2 * pi);
        CHECK(density(eq, x) == doctest::Approx(ref).epsilon(1e-9));
    }
    for (double x : {-2.3, -1.6, 1.5, 2.1}) CHECK(std::abs(effective_potential(eq, x)) < 1e-8);
    for (double x : {-3.0, -1.0, 0.0, 0.9, 2.7}) CHECK(effective_potential(eq, x) < 0.0);
}

TEST_CASE("critical quartic is rejected as a two-cut model") {
    CHECK_THROWS_AS(solve_equilibrium(Potential::polynomial({0, 0, -1, 0, 0.25}), 2, Support{{{-2.2, -0.5}, {0.5, 2.2}}}),
                    ModelAssumptionError);
}

TEST_CASE("invalid inputs") {
    CHECK_THROWS(Potential::polynomial({0, 0, 0, -1}));
    CHECK_THROWS(Support{{{1.0, 0.0}}}.validate());
    CHECK_THROWS(Support{{{-1.0, 1.0}, {0.5, 2.0}}}.validate());
}

TEST_CASE("rescale maps the support into (-1, 1) and keeps masses") {
    const auto eq = two_cut();
    const auto r = rescale(eq, 0.05);
    CHECK(r.eq.support.intervals.back().b <= 0.95 + 1e-12);
    CHECK(r.eq.support.intervals.front().a >= -0.95 - 1e-12);
    CHECK(r.eq.masses[1] == doctest::Approx(eq.masses[1]).epsilon(1e-12));
}

}
