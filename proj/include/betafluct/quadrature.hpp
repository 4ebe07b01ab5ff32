#pragma once

#include <functional>
#include <vector>

#include "betafluct/polynomial.hpp"

namespace betafluct {

struct NodesWeights {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre on [-1,1].
NodesWeights gauss_legendre(int n);
// Gauss-Chebyshev, weight (1-x^2)^{-1/2}: x_j = cos((2j+1)pi/(2n)), w_j = pi/n.
NodesWeights gauss_chebyshev_first(int n);
// Gauss-Chebyshev, weight (1-x^2)^{1/2}.
NodesWeights gauss_chebyshev_second(int n);

// Closed elliptic contour center + a cos(t) + i b sin(t), counter-clockwise.
struct Contour {
    cd center = 0.0;
    double semi_major = 1.0;  // along the real axis
    double semi_minor = 1.0;
    int nodes = 512;

    cd point(double theta) const;
    cd tangent(double theta) const;  // d(point)/d(theta)
};

// Default contour around [a,b]: semi-axes 1.5x the half-length, 512 nodes.
Contour default_contour(double a, double b);
// Bernstein ellipse c + (d/2)(R w + 1/(R w)), |w| = 1, around [c-d, c+d].
Contour bernstein_ellipse(double a, double b, double R, int nodes);

// Trapezoid rule with exactly contour.nodes points.
cd contour_trapezoid(const std::function<cd(cd)>& g, const Contour& contour);

struct ContourResult {
    cd value;
    double drift;  // |I_2N - I_N| relative to max(1, |I_2N|)
    int nodes;
};

// Trapezoid with node doubling until drift < tol; throws AccuracyError past max_nodes.
ContourResult contour_integral(const std::function<cd(cd)>& g, const Contour& contour,
                               double tol = 1e-10, int max_nodes = 1 << 16);

struct PvRule {
    int nodes = 64;  // Gauss-Legendre nodes per side of the singular point
};

// PV int_a^b f(mu)/(lambda0 - mu) dmu, theta-variable with singularity subtraction.
double pv_integral(const std::function<double(double)>& f, double a, double b, double lambda0,
                   const PvRule& rule = {});

// int_a^b f(l) |(l-a)(b-l)|^{-1/2} dl by n-point Gauss-Chebyshev.
double integrate_inv_sqrt(const std::function<double(double)>& f, double a, double b, int n);
// int_a^b f(l) |(l-a)(b-l)|^{1/2} dl by n-point Gauss-Chebyshev of the second kind.
double integrate_sqrt(const std::function<double(double)>& f, double a, double b, int n);

}  // namespace betafluct
