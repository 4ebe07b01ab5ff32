#pragma once

#include <functional>
#include <string>
#include <vector>

#include "betafluct/chebops.hpp"
#include "betafluct/equilibrium.hpp"

namespace betafluct {

// c_beta = beta/24 - 1/4 + 1/(6 beta)
double c_beta(double beta);

// Exact log(Q_{n,beta}/n!) for V = lambda^2/2 from the Gaussian product formula.
double log_gaussian_partition(long n, double beta);

// Constant term of the Gaussian expansion, fitted once per beta from the exact product
// (three-point Richardson fit in 1/n at n = 1024, 2048, 4096) and cached.
double fitted_c1(double beta);

struct FBeta {
    double value = 0.0;      // linear + logarithmic + constant terms
    double c_beta = 0.0;
    double c1 = 0.0;         // fitted constant included in value
};

// n(beta/2-1)(log(n beta/2) - 1/2) + n log(2 pi/Gamma(beta/2)) + c_beta log n + c1.
FBeta F_beta(long n, double beta);
// n(beta/2-1)(log(n beta/2) - 1/2) + n log(sqrt(2 pi)/Gamma(beta/2)) - c_beta log n, no constant.
double F_beta_uncorrected(long n, double beta);

// (log rho, rho) with the edge singularity expanded exactly in Chebyshev modes.
double entropy(const EquilibriumMeasure& eq, int M = 64);
// n(beta/2 - 1)((log rho, rho) - 1/2 + log 2 pi); zero for the semicircle law.
double entropy_term(long n, double beta, double entropy_value);
// n(beta/2 - 1)((log rho, rho) - 1 - log 2 pi)
double entropy_term_uncorrected(long n, double beta, double entropy_value);

// One-cut data on [a,b] for the interpolation V_t = V0 + t (V - V0), V0 = 2(z-c)^2/d^2.
// P is the analytic continuation of 2 pi rho / sqrt|X| off the interval.
struct OneCutBlock {
    double a = -1.0, b = 1.0;
    std::function<cd(cd)> P, dP;     // P and P'
    std::function<cd(cd)> V;         // V up to an additive constant
    std::vector<double> P_coeffs;    // coefficients of P when it is a polynomial, else empty
    double R_cap = 4.0;              // largest admissible Bernstein radius

    double center() const { return 0.5 * (a + b); }
    double half() const { return 0.5 * (b - a); }
    double P0() const { return 4.0 / (half() * half()); }
};

OneCutBlock onecut_block(const EquilibriumMeasure& eq);
// Interval alpha of a multi-cut measure, normalized to unit mass (rho_alpha / mu_alpha).
OneCutBlock multicut_block(const EquilibriumMeasure& eq, int alpha);

enum class KernelNormalization {
    covariant,  // loop-equation normalization, two-point term (2/beta) d^2/(4 X^2), prefactor beta/2
    literal     // two-point term X^{-2}, prefactor 1
};

// u^(0)(z,t) = (2/beta - 1)[-J/(2 pi X^{1/2}) + (z-c)/(2X) - 1/(2X^{1/2})],
// J = int (log P_t)'(l) sqrt|X(l)| / (z - l) dl.
cd u0(const OneCutBlock& blk, cd z, double t, double beta, int nodes = 512);
// derivative of u0 in z
cd u0_prime(const OneCutBlock& blk, cd z, double t, double beta, int nodes = 512);
// u^(1)(z,t) = K_t[(u0)^2 - (2/beta-1) u0' + kappa X^{-2}], K_t by contour quadrature.
cd u1(const OneCutBlock& blk, cd z, double t, double beta, KernelNormalization norm = KernelNormalization::covariant,
      int nodes = 512);

struct RBetaOptions {
    KernelNormalization norm = KernelNormalization::covariant;
    int min_nodes = 128;
    int max_nodes = 1024;
    double contour_tol = 1e-9;
    int t_points = 33;          // odd; compared against the half grid
    double t_tol = 1e-7;
};

struct RBetaResult {
    double value = 0.0;
    double imag = 0.0;          // residual imaginary part
    double contour_drift = 0.0;
    double t_drift = 0.0;
    int nodes = 0;
    double R_inner = 0.0, R_outer = 0.0;
};

// Constant term r_beta of the one-cut expansion by the nested contour representation.
RBetaResult r_beta(const OneCutBlock& blk, double beta, const RBetaOptions& opt = {});
RBetaResult r_beta(const EquilibriumMeasure& eq, double beta, const RBetaOptions& opt = {});
// Same quantity after collapsing the outer contour onto the polynomial part W of (V - V0)/X^{1/2};
// requires a polynomial potential.
RBetaResult r_beta_reduced(const EquilibriumMeasure& eq, double beta, const RBetaOptions& opt = {});
// -(1/24) log(P(a)P(b)/P0^2) (covariant) or -(2/(3(b-a)^2)) log(P(a)P(b)/P0^2) (literal).
double r_two_closed_form(const EquilibriumMeasure& eq, KernelNormalization norm);

struct ExpansionTerm {
    std::string name;
    std::string label;   // descriptive role
    double value = 0.0;
};

struct ExpansionReport {
    long n = 0;
    double beta = 2.0;
    int q = 1;
    double term_n2 = 0.0;     // (beta/2) n^2 E
    double term_F = 0.0;      // F_beta(n) including the fitted constant
    double term_n = 0.0;      // entropy term
    double term_logn = 0.0;   // c_beta (q-1) log n
    double term_r = 0.0;      // sum r_beta[rho_a/mu_a] + c_beta sum log mu_a
    double term_det = 0.0;    // -(1/2) log det(1 - Dbar Ltilde)
    double term_nu = 0.0;     // (2/beta)(beta/2-1)^2 (Ltilde G nu, nu)
    double term_theta = 0.0;  // log Theta(0; {n mu})
    double total = 0.0;

    double c_beta = 0.0, c1 = 0.0, energy = 0.0, entropy = 0.0;
    std::vector<double> r_blocks;
    double det = 1.0, det_drift = 0.0;
    double r_contour_drift = 0.0, r_t_drift = 0.0;
    // uncorrected variants of the F and entropy terms, for comparison
    double term_F_uncorrected = 0.0, term_n_uncorrected = 0.0;

    std::vector<ExpansionTerm> terms() const;
};

struct PartitionOptions {
    RBetaOptions r;
};

ExpansionReport log_partition(const MultiCutModel& model, long n, double beta, const PartitionOptions& opt = {});
// Reuses the n-independent pieces of a report for another n.
ExpansionReport log_partition_at(const ExpansionReport& base, const MultiCutModel& model, long n);

}  // namespace betafluct
