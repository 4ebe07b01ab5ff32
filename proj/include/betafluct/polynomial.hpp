#pragma once

#include <complex>
#include <vector>

namespace betafluct {

using cd = std::complex<double>;

// Real polynomial, coefficients stored lowest degree first.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    const std::vector<double>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    double leading() const { return c_.empty() ? 0.0 : c_.back(); }
    bool is_zero() const { return c_.empty(); }

    double operator()(double x) const;
    cd operator()(cd z) const;

    Polynomial derivative() const;
    Polynomial antiderivative() const;  // zero constant term
    // x -> p(s * x + t)
    Polynomial compose_affine(double s, double t) const;

    std::vector<cd> roots() const;

    Polynomial operator+(const Polynomial& o) const;
    Polynomial operator-(const Polynomial& o) const;
    Polynomial operator*(const Polynomial& o) const;
    Polynomial operator*(double s) const;

private:
    void trim();
    std::vector<double> c_;
};

}  // namespace betafluct
