#pragma once

#include <array>
#include <vector>

#include "betafluct/equilibrium.hpp"

namespace betafluct {

// Smoothed log kernel a(lambda): log(1/d) - a0(lambda/d) + a0(1) on [0,d], log(1/lambda) beyond,
// a0(x) = (3/4)x^4 - (8/3)x^3 + 3x^2.
struct KernelA {
    double d = 0.5;
};

double kernel_a(double lambda, const KernelA& ka);  // even in lambda
// m-th derivative (m = 0..4) of the inner or outer branch at lambda
double kernel_a_branch_derivative(double lambda, int m, bool inner, const KernelA& ka);
// inner minus outer branch derivative at the knot, orders 0..4
std::array<double, 5> knot_jumps(const KernelA& ka);
// one-sided finite-difference estimates of the same jumps, orders 0..2
std::array<double, 3> knot_jumps_fd(const KernelA& ka, double h = 1e-4);

// 24 int_x^inf (2t + t cos t - 3 sin t)/t^5 dt = 16/x^3 - 24 sin x/x^4 + 24 int_x^inf sin t/t^5 dt
double sine_transform_factor(double x);
// int_x^inf sin t / t^5 dt (quadrature up to 50, asymptotic series beyond)
double sine_tail(double x);
// Full-line Fourier transform of a(|lambda|): 2 sine_transform_factor(k d)/k.
double fourier_a(double k, const KernelA& ka);
// a-hat(k) / (pi/k)
double fourier_ratio(double k, const KernelA& ka);

struct GapEstimate {
    double delta1 = 0.0;          // 1 - sup ratio over the grid
    double k_at_sup = 0.0;
    bool sup_at_grid_edge = false;
    double min_fourier = 0.0;     // min a-hat over the grid
    double k_at_min = 0.0;
    double tail_k4 = 0.0;         // k^4 a-hat(k) at the top of the grid
    double delta1_refined = 0.0;  // same estimate on a doubled grid
};
// Log grid on [kmin, kmax] plus golden-section refinement around the supremum.
GapEstimate spectral_gap(const KernelA& ka, double kmin = 1e-3, double kmax = 1e3, int points = 10000);

// int log|lambda - mu| T_k(x(mu)) |X(mu)|^{-1/2} dmu over the interval s (enlarged by eps),
// lambda outside it: quadrature against the closed form -pi zeta^k / k (k >= 1).
struct SingleIntegral {
    double quadrature = 0.0;
    double closed_form = 0.0;
    double alternate_form = 0.0;  // d (zeta^{k-1} - zeta^{k+1}) / (4k sqrt(z^2-1))
};
SingleIntegral single_integral(const Interval& s, double lambda, int k, double eps);

// L_{k,s;k',s'} = int int T_k(x) T_k'(x') log|lambda - mu| |X|^{-1/2}|X'|^{-1/2} over the enlarged intervals.
struct CrossCoefficient {
    double quadrature = 0.0;      // 2D Gauss-Chebyshev
    double reduced = 0.0;         // 1D quadrature of the closed-form single integral
};
CrossCoefficient cross_coeff(const Interval& s1, const Interval& s2, int k, int kp, double eps);

struct DecayFit {
    double slope = 0.0, intercept = 0.0, r2 = 0.0;
    std::vector<double> values;   // |L_{k,k}| for k = 1..kmax
};
// Regression of log|L_{k,s;k,s'}| on 2k, k = 1..kmax.
DecayFit cross_decay(const Interval& s1, const Interval& s2, double eps, int kmax = 20);

struct LemmaCertificate {
    KernelA kernel;
    GapEstimate gap;
    std::array<double, 5> jumps{};
    double continuity_max = 0.0;       // max |jump| over orders 0..3
    DecayFit decay;
    double single_integral_rel = 0.0;  // max relative quadrature vs closed-form disagreement, k <= 30
    double cross_reduction_rel = 0.0;  // max 2D vs reduced disagreement relative to |L|
    double symmetry = 0.0;             // max |L_{k,s;k',s'} - L_{k',s';k,s}|
    double alternate_ratio = 0.0;        // alternate_form / closed_form (constant in k)
};
LemmaCertificate lemma_certificate(const KernelA& ka, const Interval& s1, const Interval& s2, double eps);

}  // namespace betafluct
