#pragma once

#include <Eigen/Dense>
#include <vector>

#include "betafluct/chebops.hpp"

namespace betafluct {

struct ThetaParams {
    Eigen::MatrixXd Q;      // positive definite
    double beta = 2.0;
    Eigen::VectorXd e;      // fractional parts of n mu_alpha
    long s = 0;             // sum of e (an integer)
    Eigen::VectorXd x;      // linear term
    Eigen::VectorXd t;      // tilt
    int radius = 8;
};

// Offsets e and s from n and the masses; near-integers snapped and e quantized to 2^-36
// so that equal fractional-part vectors give bit-identical sums.
ThetaParams theta_offsets(const Eigen::VectorXd& masses, long n);

struct ThetaValue {
    double log_value = 0.0;
    double phase = 0.0;     // zero for real arguments
    int radius = 0;         // cutoff actually used
    double drift = 0.0;     // |log Theta(R) - log Theta(R+4)|
};

// Lattice sum over k in Z^q, sum k = s, |k_alpha| <= R, of
// exp{-(beta/2)(Q^{-1} D, D) + (beta/2)(D, x) + (beta/2 - 1)(D, t)}, D = k - e.
// The cutoff grows from p.radius until the drift under R -> R+4 is below 1e-10.
ThetaValue theta_eval(const ThetaParams& p);
// Same sum at a fixed cutoff.
double log_theta_fixed(const ThetaParams& p, int radius);

struct ThetaMoments {
    double mean = 0.0;
    double variance = 0.0;
};
// Mean and variance of (D, v) under the normalized lattice weights.
ThetaMoments theta_moments(const ThetaParams& p, const Eigen::VectorXd& v);

struct CLTPrediction {
    double mean_shift = 0.0;   // smooth O(1) mean correction of N[h] - n (h, rho)
    double mean_theta = 0.0;
    double var_smooth = 0.0;
    double var_theta = 0.0;
    bool gaussian = true;
    long n = 0;
    double beta = 2.0;
    double equilibrium_mean = 0.0;  // (h, rho)
    // data for log Z[t h]
    double quad = 0.0;      // (G Dbar h, h)
    double lin = 0.0;       // (G nu, h)
    Eigen::VectorXd I;      // I[h]
    ThetaParams theta;      // x = 0, tilt set

    double mean() const { return mean_shift + mean_theta; }
    double variance() const { return var_smooth + var_theta; }
    // log Z[t h] (centered at n (h, rho))
    double log_Z(double t) const;
};

CLTPrediction onecut_predict(const EquilibriumMeasure& eq, const TestFunction& h, double beta, int M = 64);
double multicut_logZ(const MultiCutModel& model, const TestFunction& h, long n, double beta);
CLTPrediction multicut_mean_var(const MultiCutModel& model, const TestFunction& h, long n, double beta);

// h - sum_j c_j g_j with c chosen so that (h, psi^(alpha)) = 0 for every alpha (needs q functions g_j).
TestFunction project_out_psi(const MultiCutModel& model, const TestFunction& h, const std::vector<TestFunction>& g);

}  // namespace betafluct
