#include <doctest.h>

#include <cmath>

#include "betafluct/chebops.hpp"
#include "betafluct/chebyshev.hpp"
#include "betafluct/errors.hpp"
#include "betafluct/fluctuation.hpp"

using namespace betafluct;

namespace {

const EquilibriumMeasure& gaussian() {
    static const EquilibriumMeasure eq = solve_equilibrium(Potential::polynomial({0, 0, 0.5}), 1, Support{{{-2, 2}}});
    return eq;
}

const MultiCutModel& two_cut_model() {
    static const MultiCutModel m = build_model(
        solve_equilibrium(Potential::polynomial({0, 0, -2, 0, 0.25}), 2, Support{{{-2.6, -1.2}, {1.1, 2.4}}}));
    return m;
}

const MultiCutModel& asymmetric_model() {
    static const MultiCutModel m = build_model(
        solve_equilibrium(Potential::polynomial({0, 0.3, -2, 0, 0.25}), 2, Support{{{-2.6, -1.2}, {1.1, 2.4}}}));
    return m;
}

// log of sum over k1 (k2 = s - k1) of the lattice weights, by direct enumeration
double brute_log_theta(const ThetaParams& p, int R) {
    const Eigen::Matrix2d Qi = p.Q.inverse();
    double mx = -INFINITY;
    std::vector<double> ex;
    for (int k1 = -R; k1 <= R; ++k1) {
        const Eigen::Vector2d D(k1 - p.e[0], static_cast<double>(p.s - k1) - p.e[1]);
        const double v = -0.5 * p.beta * D.dot(Qi * D) + 0.5 * p.beta * D.dot(p.x) + (0.5 * p.beta - 1.0) * D.dot(p.t);
        ex.push_back(v);
        mx = std::max(mx, v);
    }
    double s = 0.0;
    for (double v : ex) s += std::exp(v - mx);
    return mx + std::log(s);
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("log-kernel inversion identities by independent quadrature") {
    for (auto [a, b] : {std::pair{-2.0, 2.0}, std::pair{-std::sqrt(6.0), -std::sqrt(2.0)}, std::pair{std::sqrt(2.0), std::sqrt(6.0)}}) {
        const auto r = dl_identity_check(a, b, 20);
        CHECK(r.DL < 1e-8);
        CHECK(r.LD < 1e-8);
    }
}

TEST_CASE("spectral matrices: Dbar Lhat = -1 off the constant mode") {
    const Support s{{{-0.9, -0.3}, {0.2, 0.8}}};
    const int M = 16;
    const Eigen::MatrixXd P = build_Dbar(s, M).m * build_Lhat(s, M).m;
    for (int i = 0; i < 2 * (M + 1); ++i) {
        const double expect = (i % (M + 1) == 0) ? 0.0 : -1.0;
        CHECK(P(i, i) == doctest::Approx(expect));
    }
}

TEST_CASE("cross-interval block matches the closed-form mode potential") {
    const Support s{{{-0.9, -0.3}, {0.2, 0.8}}};
    const int M = 12;
    const OperatorMatrix Lt = build_Ltilde(s, M);
    // density mode k' = 3 on interval 1, evaluated on interval 0 at x
    ChebSeries v = ChebSeries::from_stacked(ChebSeries::Kind::density, s.intervals, Eigen::VectorXd::Zero(2 * (M + 1)));
    v.coeffs[1][3] = 1.0;
    const ChebSeries Lv = ChebSeries::from_stacked(ChebSeries::Kind::function, s.intervals, Lt.m * v.stacked());
    for (double x : {-0.85, -0.6, -0.31}) CHECK(Lv(x) == doctest::Approx(log_mode_potential(3, 0.5, 0.3, x)).epsilon(1e-10));
}

}

TEST_SUITE("fluctuation") {

TEST_CASE("Gaussian variances follow (1/2beta) sum k a_k^2") {
    // lambda = 2 T1, lambda^2 = 2 + 2 T2, lambda^3 = 6 T1 + 2 T3 in x = lambda/2
    for (double beta : {1.0, 2.0, 4.0}) {
        CHECK(onecut_predict(gaussian(), TestFunction::polynomial({0, 1}), beta).variance() == doctest::Approx(2.0 / beta));
        CHECK(onecut_predict(gaussian(), TestFunction::polynomial({0, 0, 1}), beta).variance() == doctest::Approx(4.0 / beta));
        CHECK(onecut_predict(gaussian(), TestFunction::polynomial({0, 0, 0, 1}), beta).variance() == doctest::Approx(24.0 / beta));
    }
}

TEST_CASE("Gaussian mean shift equals the exact finite-n correction 2/beta - 1 for lambda^2") {
    // E sum lambda^2 = n + 2/beta - 1 exactly, by scaling of the Gaussian partition function
    for (double beta : {1.0, 2.0, 4.0}) {
        const auto p = onecut_predict(gaussian(), TestFunction::polynomial({0, 0, 1}), beta);
        CHECK(p.mean() == doctest::Approx(2.0 / beta - 1.0).epsilon(1e-12));
        CHECK(p.equilibrium_mean == doctest::Approx(1.0).epsilon(1e-12));
    }
    // odd statistics have no shift
    CHECK(std::abs(onecut_predict(gaussian(), TestFunction::polynomial({0, 0, 0, 1}), 1.0).mean()) < 1e-12);
}

TEST_CASE("two-cut structure: Q, psi and the lattice sum") {
    const auto& m = two_cut_model();
    CHECK((m.Q - m.Q.transpose()).norm() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.Q);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    CHECK(m.psi_residual < 1e-8);

    Eigen::VectorXd mu(2);
    mu << m.eq.masses[0], m.eq.masses[1];
    for (long n : {100L, 101L}) {
        ThetaParams p = theta_offsets(mu, n);
        p.Q = m.Q;
        p.beta = 2.0;
        p.t = I_functional(m, m.log_rho_bar);
        CHECK(std::abs(log_theta_fixed(p, 8) - log_theta_fixed(p, 12)) < 1e-12);
        CHECK(theta_eval(p).log_value == doctest::Approx(brute_log_theta(p, 40)).epsilon(1e-12));
    }
}

TEST_CASE("lattice sum against direct enumeration with tilt and linear term") {
    const auto& m = asymmetric_model();
    Eigen::VectorXd mu(2);
    mu << m.eq.masses[0], m.eq.masses[1];
    ThetaParams p = theta_offsets(mu, 117);
    p.Q = m.Q;
    p.beta = 1.0;
    p.x = Eigen::Vector2d(0.3, -0.1);
    p.t = Eigen::Vector2d(-0.2, 0.4);
    CHECK(theta_eval(p).log_value == doctest::Approx(brute_log_theta(p, 40)).epsilon(1e-12));
}

TEST_CASE("equal fractional parts give identical lattice contributions") {
    const auto& m = two_cut_model();
    const auto a = multicut_mean_var(m, TestFunction::polynomial({0, 1}), 100, 2.0);
    const auto b = multicut_mean_var(m, TestFunction::polynomial({0, 1}), 138, 2.0);
    CHECK(a.var_theta == b.var_theta);
    CHECK(a.mean_theta == b.mean_theta);
}

TEST_CASE("theta variance: non-Gaussian for lambda, zero after projecting out psi") {
    const auto& m = asymmetric_model();
    std::vector<double> v;
    for (long n = 100; n <= 140; ++n) v.push_back(multicut_mean_var(m, TestFunction::polynomial({0, 1}), n, 2.0).var_theta);
    CHECK(*std::min_element(v.begin(), v.end()) > 0.0);
    CHECK(*std::max_element(v.begin(), v.end()) - *std::min_element(v.begin(), v.end()) > 1e-3);
    const auto h = project_out_psi(m, TestFunction::polynomial({0, 1}),
                                   {TestFunction::polynomial({0, 0, 0, 1}), TestFunction::polynomial({0, 0, 1})});
    const auto p = multicut_mean_var(m, h, 101, 2.0);
    CHECK(p.I.cwiseAbs().maxCoeff() < 1e-9);
    CHECK(p.var_theta < 1e-9);
    CHECK(p.gaussian);
}

TEST_CASE("log Z[t h] is quadratic for one cut, with the predicted curvature") {
    const auto p = onecut_predict(gaussian(), TestFunction::polynomial({0, 1}), 2.0);
    // log E exp{t beta (N - EN)/2} = (beta t/2)^2 Var/2 for a Gaussian N
    for (double t : {-1.0, 0.5, 1.0}) CHECK(p.log_Z(t) == doctest::Approx(0.5 * t * t * p.variance()).epsilon(1e-10));
}

}
