#pragma once

#include <map>
#include <string>
#include <vector>

#include "betafluct/polynomial.hpp"
#include "betafluct/potential.hpp"

namespace betafluct {

struct Interval {
    double a = 0.0, b = 0.0;
    double center() const { return 0.5 * (a + b); }
    double half() const { return 0.5 * (b - a); }
    bool contains(double x) const { return x >= a && x <= b; }
};

struct Support {
    std::vector<Interval> intervals;
    int q() const { return static_cast<int>(intervals.size()); }
    void validate() const;  // strict ordering a_1 < b_1 < a_2 < ...
    int locate(double x) const;  // interval index containing x, or -1
};

// lambda_new = s * lambda_old + t
struct ScaleRecord {
    double s = 1.0, t = 0.0;
    bool identity() const { return s == 1.0 && t == 0.0; }
};

struct EquilibriumMeasure {
    Potential V;
    Support support;
    Polynomial P;
    std::vector<double> masses;
    double v_star = 0.0;  // value of v on the support
    double energy = 0.0;
    ScaleRecord scale;  // map applied relative to the caller's original coordinates
    std::map<std::string, double> residuals;
    int modes = 64;  // Chebyshev resolution of the per-interval density factors

    int q() const { return support.q(); }
    // sign of P on interval i (0-based): (-1)^{q-1-i}
    double sign(int i) const;
    // principal branch X^{1/2}(z) = prod sqrt(z-a) sqrt(z-b) ~ z^q
    cd sqrtX(cd z) const;
    double abs_X(double x) const;
    // |R_i| = |X| / |(x-a_i)(x-b_i)|
    double abs_R(int i, double x) const;
    // rho on interval i written as (1/2pi) P_i(x) sqrt|X_i(x)| with P_i = |P| sqrt|R_i|
    double effective_P(int i, double x) const;
    // F_i = pi rho sqrt|X_i|, so rho = F_i / (pi sqrt|X_i|)
    double smooth_factor(int i, double x) const;
    // Chebyshev coefficients of F_i on interval i
    const std::vector<double>& smooth_coeffs(int i) const { return F_coeffs[i]; }
    // Logarithmic potential int log|x - mu| rho(mu) dmu
    double log_potential(double x) const;

    std::vector<std::vector<double>> F_coeffs;
};

struct SolveOptions {
    double tol = 1e-12;
    int max_iter = 200;
};

Support solve_support(const Potential& V, int q, const Support& init, const SolveOptions& opt = {});
Polynomial compute_P(const Potential& V, const Support& s);
// Residuals of the endpoint equations (moments then gap conditions).
std::vector<double> endpoint_residuals(const Potential& V, const Support& s);

// Assemble the measure on a solved support; enforces regularity (throws ModelAssumptionError).
EquilibriumMeasure build_equilibrium(const Potential& V, const Support& s, int modes = 64);
EquilibriumMeasure solve_equilibrium(const Potential& V, int q, const Support& init,
                                     const SolveOptions& opt = {});

double density(const EquilibriumMeasure& eq, double x);
std::vector<double> masses(const EquilibriumMeasure& eq);
double effective_potential(const EquilibriumMeasure& eq, double x);  // v(x) - v*
double energy(const EquilibriumMeasure& eq);
// g(z) = int rho(mu)/(z - mu) dmu by quadrature
cd stieltjes(const EquilibriumMeasure& eq, cd z);
// int f rho
double integrate_density(const EquilibriumMeasure& eq, const std::function<double(double)>& f,
                         int nodes = 256);

struct RescaleResult {
    EquilibriumMeasure eq;
    ScaleRecord record;
};
// Map the support into (-1+margin, 1-margin) when it is not already inside.
RescaleResult rescale(const EquilibriumMeasure& eq, double margin = 0.05);

}  // namespace betafluct
