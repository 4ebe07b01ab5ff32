#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "betafluct/polynomial.hpp"

namespace betafluct {

// Confining polynomial potential V (even degree, positive leading coefficient).
class Potential {
public:
    Potential() = default;
    explicit Potential(Polynomial v, double analyticity_margin = 10.0);
    static Potential polynomial(std::vector<double> coeffs, double analyticity_margin = 10.0);

    const Polynomial& poly() const { return v_; }
    const Polynomial& derivative_poly() const { return dv_; }
    double analyticity_margin() const { return margin_; }
    bool growth_check() const { return growth_ok_; }

    double operator()(double x) const { return v_(x); }
    double derivative(double x) const { return dv_(x); }

    // lambda -> V((lambda - t)/s), the potential seen after the map lambda -> s*lambda + t.
    Potential affine_pullback(double s, double t) const;

private:
    Polynomial v_, dv_;
    double margin_ = 10.0;
    bool growth_ok_ = false;
};

// V(z) for complex z; throws DomainError off the analyticity strip.
cd eval_potential(const Potential& p, cd z);

// Smooth real test function h: polynomial, per-interval Chebyshev data, or a callable.
class TestFunction {
public:
    static TestFunction polynomial(std::vector<double> coeffs);
    static TestFunction callable(std::function<double(double)> f, std::string label = "callable");
    // Chebyshev coefficients on each interval [a_alpha, b_alpha]; zero outside them.
    static TestFunction chebyshev(std::vector<std::array<double, 2>> intervals,
                                  std::vector<std::vector<double>> coeffs);

    double operator()(double x) const;
    bool is_polynomial() const { return kind_ == Kind::polynomial; }
    const Polynomial& poly() const { return poly_; }
    const std::string& label() const { return label_; }

    // lambda' -> h((lambda' - t)/s)
    TestFunction affine_pullback(double s, double t) const;
    TestFunction operator*(double s) const;
    TestFunction operator+(const TestFunction& o) const;

    // sup-norms of h^{(m)}, m = 0..6, over [a,b] (cached per interval).
    std::array<double, 7> smoothness_norms(double a, double b) const;

private:
    enum class Kind { polynomial, callable, chebyshev };
    Kind kind_ = Kind::polynomial;
    Polynomial poly_;
    std::function<double(double)> fn_;
    std::vector<std::array<double, 2>> intervals_;
    std::vector<std::vector<double>> cheb_;
    std::string label_;
    struct Cache;
    std::shared_ptr<Cache> cache_;
};

// Value of sum_k c_k T_k(x) by Clenshaw recurrence.
double chebyshev_eval(const std::vector<double>& c, double x);

}  // namespace betafluct
