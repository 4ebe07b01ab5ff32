#pragma once

#include <functional>
#include <vector>

namespace betafluct {

// Coefficients c_0..c_M of the interpolant of f on [-1,1] at the M+1 Chebyshev-Lobatto points.
std::vector<double> cheb_lobatto_coeffs(const std::function<double(double)>& f, int M);

// Same, from samples f(cos(pi j / M)), j = 0..M.
std::vector<double> cheb_lobatto_from_samples(const std::vector<double>& samples);

// Logarithmic potential int log|lambda - mu| w(mu) dmu of the weighted mode
// w = T_k((mu-c)/d) / (pi sqrt(d^2 - (mu-c)^2)) on [c-d, c+d], for any real lambda.
double log_mode_potential(int k, double c, double d, double lambda);

}  // namespace betafluct
