#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "betafluct/equilibrium.hpp"
#include "betafluct/potential.hpp"

namespace betafluct {

// Per-interval Chebyshev data on lambda = c + d cos(theta).
//   function: h = sum_k c_k T_k
//   density:  v = (1/pi) |X_i|^{-1/2} sum_k w_k T_k, X_i = (lambda-a_i)(lambda-b_i)
struct ChebSeries {
    enum class Kind { function, density };
    Kind kind = Kind::function;
    std::vector<Interval> intervals;
    std::vector<Eigen::VectorXd> coeffs;
    bool tail_warning = false;

    int q() const { return static_cast<int>(intervals.size()); }
    int M() const { return coeffs.empty() ? 0 : static_cast<int>(coeffs[0].size()) - 1; }
    // function value, or the density value (0 outside the support)
    double operator()(double x) const;
    // density only: pi sqrt|X_i| v on interval i, the bounded factor
    double smooth_part(int i, double x) const;

    Eigen::VectorXd stacked() const;
    static ChebSeries from_stacked(Kind kind, const std::vector<Interval>& intervals, const Eigen::VectorXd& v);
    ChebSeries operator+(const ChebSeries& o) const;
    ChebSeries operator*(double s) const;
};

// Function coefficients at M+1 Lobatto points per interval.
ChebSeries cheb_transform(const std::function<double(double)>& f, const Support& s, int M);
// Density whose smooth factor pi sqrt|X_i| v is F on interval i.
ChebSeries density_from_smooth(const std::function<double(int, double)>& F, const Support& s, int M);
// (v, h) = int v h for a density v and a function h on the same intervals.
double pair(const ChebSeries& density, const ChebSeries& function);

struct OperatorMatrix {
    enum class Role { Lhat, Ltilde, Dbar, G };
    Role role;
    int q = 1, M = 0;
    Eigen::MatrixXd m;  // index alpha * (M+1) + k
};

OperatorMatrix build_Lhat(const Support& s, int M);
OperatorMatrix build_Ltilde(const Support& s, int M);
OperatorMatrix build_Dbar(const Support& s, int M);

// L f with f a density; same_interval restricts to the diagonal blocks.
ChebSeries apply_L(const ChebSeries& f, bool same_interval);
// D_i h: function data on interval i -> density on interval i (other blocks zero).
ChebSeries apply_D(const ChebSeries& h, int interval);
// D applied to every interval.
ChebSeries apply_D(const ChebSeries& h);
// (D h, h)
double quad_form_barD(const ChebSeries& h);

// nu as a density series: endpoint masses, arcsine part and -(1/2) D log P_i per interval.
ChebSeries nu_functional(const EquilibriumMeasure& eq, int M);
// log rho on each interval (smooth part plus the exact expansion of (1/2)log(1-x^2)).
ChebSeries log_density_series(const EquilibriumMeasure& eq, int M);
// rho as a density series
ChebSeries density_series(const EquilibriumMeasure& eq, int M);

struct MultiCutModel {
    EquilibriumMeasure eq;      // rescaled so that the support lies in (-1,1)
    EquilibriumMeasure original;
    ScaleRecord scale;          // lambda_model = s lambda_original + t
    int M = 64;
    OperatorMatrix Lhat, Ltilde, Dbar, G;
    Eigen::MatrixXd Q, Qinv;
    std::vector<ChebSeries> psi;
    ChebSeries nu;
    ChebSeries log_rho;         // log rho
    ChebSeries log_rho_bar;     // log(rho_i / mu_i) on interval i
    double psi_residual = 0.0;
    double Q_asymmetry = 0.0;
    double G_drift = 0.0;       // max element drift of G between M/2 and M

    int q() const { return eq.q(); }
    // h given in original coordinates -> function series on the model support
    ChebSeries function_series(const TestFunction& h) const;
};

struct ModelOptions {
    int M = 64;
    double drift_tol = 1e-8;
    int max_M = 512;
    double margin = 0.05;
};

MultiCutModel build_model(const EquilibriumMeasure& eq, const ModelOptions& opt = {});

// psi^(alpha) on a rescaled model support: -(L psi^(alpha)) = delta on sigma_alpha'.
std::vector<ChebSeries> solve_psi(const EquilibriumMeasure& eq, int M, double* residual = nullptr);
Eigen::MatrixXd build_Q(const std::vector<ChebSeries>& psi, double* asymmetry = nullptr);
OperatorMatrix resolvent_G(const OperatorMatrix& Dbar, const OperatorMatrix& Ltilde);
// I[h] = Q^{-1} (h, psi)
Eigen::VectorXd I_functional(const MultiCutModel& model, const ChebSeries& h);
Eigen::VectorXd I_functional(const MultiCutModel& model, const TestFunction& h);
double det_one_minus_DLtilde(const MultiCutModel& model);

// Independent-route residuals of the two log-kernel inversion identities on [a,b]:
//   D L v = -v + (1/pi)(v,1) |X|^{-1/2} for v = T_k |X|^{-1/2}/pi,
//   L D v = -v + (1/pi)(v,|X|^{-1/2})   for v = T_k,
// k = 0..kmax, sup over interior points. L by tanh-sinh quadrature, D by PV quadrature.
struct IdentityResidual {
    double DL = 0.0;
    double LD = 0.0;
};
IdentityResidual dl_identity_check(double a, double b, int kmax);

}  // namespace betafluct
