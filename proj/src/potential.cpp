#include "betafluct/potential.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "betafluct/errors.hpp"

namespace betafluct {

namespace {

// Confinement up to an additive constant: the excess V - 2(1+eps)log(1+|x|) must be
// bounded below on the sampled window and rising at its edges.
bool check_growth(const Polynomial& v) {
    if (v.degree() < 2 || v.degree() % 2 != 0 || v.leading() <= 0.0) return false;
    double scale = 1.0;
    for (const cd& r : v.derivative().roots()) scale = std::max(scale, 1.0 + std::abs(r));
    const double eps = 0.01, L = 10.0 * scale;
    auto excess = [&](double x) { return v(x) - 2.0 * (1.0 + eps) * std::log1p(std::abs(x)); };
    double lo = excess(0.0);
    const int m = 2000;
    for (int i = 0; i <= m; ++i) lo = std::min(lo, excess(-L + 2.0 * L * i / m));
    const double h = L * 1e-3;
    bool rising = excess(L) > excess(L - h) && excess(-L) > excess(-L + h);
    return std::isfinite(lo) && rising && excess(L) > lo && excess(-L) > lo;
}

}  // namespace

Potential::Potential(Polynomial v, double analyticity_margin)
    : v_(std::move(v)), dv_(v_.derivative()), margin_(analyticity_margin) {
    if (!(margin_ > 0.0)) throw DomainError("Potential: analyticity margin must be positive");
    growth_ok_ = check_growth(v_);
    if (!growth_ok_) throw DomainError("Potential: V must grow faster than 2 log|x| at infinity");
}

Potential Potential::polynomial(std::vector<double> coeffs, double analyticity_margin) {
    return Potential(Polynomial(std::move(coeffs)), analyticity_margin);
}

Potential Potential::affine_pullback(double s, double t) const {
    return Potential(v_.compose_affine(1.0 / s, -t / s), margin_ * s);
}

cd eval_potential(const Potential& p, cd z) {
    if (std::abs(z.imag()) > p.analyticity_margin())
        throw DomainError("eval_potential: point outside the analyticity strip");
    if (z.imag() == 0.0) return cd(p(z.real()), 0.0);
    return p.poly()(z);
}

double chebyshev_eval(const std::vector<double>& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) {
        double b0 = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return (c.empty() ? 0.0 : c[0]) + x * b1 - b2;
}

struct TestFunction::Cache {
    std::mutex mu;
    std::map<std::pair<double, double>, std::array<double, 7>> norms;
};

TestFunction TestFunction::polynomial(std::vector<double> coeffs) {
    TestFunction h;
    h.kind_ = Kind::polynomial;
    h.poly_ = Polynomial(std::move(coeffs));
    h.label_ = "polynomial";
    h.cache_ = std::make_shared<Cache>();
    return h;
}

TestFunction TestFunction::callable(std::function<double(double)> f, std::string label) {
    TestFunction h;
    h.kind_ = Kind::callable;
    h.fn_ = std::move(f);
    h.label_ = std::move(label);
    h.cache_ = std::make_shared<Cache>();
    return h;
}

TestFunction TestFunction::chebyshev(std::vector<std::array<double, 2>> intervals,
                                     std::vector<std::vector<double>> coeffs) {
    if (intervals.size() != coeffs.size())
        throw DomainError("TestFunction::chebyshev: one coefficient vector per interval");
    TestFunction h;
    h.kind_ = Kind::chebyshev;
    h.intervals_ = std::move(intervals);
    h.cheb_ = std::move(coeffs);
    h.label_ = "chebyshev";
    h.cache_ = std::make_shared<Cache>();
    return h;
}

double TestFunction::operator()(double x) const {
    switch (kind_) {
        case Kind::polynomial:
            return poly_(x);
        case Kind::callable:
            return fn_(x);
        case Kind::chebyshev:
            for (std::size_t i = 0; i < intervals_.size(); ++i) {
                auto [a, b] = intervals_[i];
                if (x >= a && x <= b) {
                    double u = (2.0 * x - a - b) / (b - a);
                    return chebyshev_eval(cheb_[i], u);
                }
            }
            return 0.0;
    }
    return 0.0;
}

TestFunction TestFunction::affine_pullback(double s, double t) const {
    if (kind_ == Kind::polynomial) {
        TestFunction h = polynomial(poly_.compose_affine(1.0 / s, -t / s).coeffs());
        h.label_ = label_;
        return h;
    }
    if (kind_ == Kind::chebyshev) {
        auto iv = intervals_;
        for (auto& e : iv) e = {s * e[0] + t, s * e[1] + t};
        TestFunction h = chebyshev(std::move(iv), cheb_);
        h.label_ = label_;
        return h;
    }
    TestFunction self = *this;
    return callable([self, s, t](double x) { return self((x - t) / s); }, label_);
}

TestFunction TestFunction::operator*(double s) const {
    if (kind_ == Kind::polynomial) {
        TestFunction h = polynomial((poly_ * s).coeffs());
        h.label_ = label_;
        return h;
    }
    TestFunction self = *this;
    return callable([self, s](double x) { return s * self(x); }, label_);
}

TestFunction TestFunction::operator+(const TestFunction& o) const {
    if (kind_ == Kind::polynomial && o.kind_ == Kind::polynomial)
        return polynomial((poly_ + o.poly_).coeffs());
    TestFunction a = *this, b = o;
    return callable([a, b](double x) { return a(x) + b(x); }, label_ + "+" + o.label_);
}

std::array<double, 7> TestFunction::smoothness_norms(double a, double b) const {
    {
        std::lock_guard<std::mutex> lock(cache_->mu);
        auto it = cache_->norms.find({a, b});
        if (it != cache_->norms.end()) return it->second;
    }
    std::array<double, 7> out{};
    const int grid = 512;
    if (kind_ == Kind::polynomial) {
        Polynomial p = poly_;
        for (int m = 0; m <= 6; ++m) {
            double s = 0.0;
            for (int i = 0; i <= grid; ++i) s = std::max(s, std::abs(p(a + (b - a) * i / grid)));
            out[m] = s;
            p = p.derivative();
        }
    } else {
        // Chebyshev interpolant on the interval, differentiated spectrally.
        const int M = 128;
        const double c = 0.5 * (a + b), d = 0.5 * (b - a);
        std::vector<double> vals(M + 1), coef(M + 1, 0.0);
        for (int j = 0; j <= M; ++j) vals[j] = (*this)(c + d * std::cos(std::numbers::pi * j / M));
        for (int k = 0; k <= M; ++k) {
            double s = 0.0;
            for (int j = 0; j <= M; ++j) {
                double w = (j == 0 || j == M) ? 0.5 : 1.0;
                s += w * vals[j] * std::cos(std::numbers::pi * j * k / M);
            }
            coef[k] = s * 2.0 / M * ((k == 0 || k == M) ? 0.5 : 1.0);
        }
        for (int m = 0; m <= 6; ++m) {
            double s = 0.0;
            for (int i = 0; i <= grid; ++i) s = std::max(s, std::abs(chebyshev_eval(coef, -1.0 + 2.0 * i / grid)));
            out[m] = s * std::pow(1.0 / d, m);
            // derivative recurrence c'_{k-1} = c'_{k+1} + 2k c_k
            std::vector<double> dc(coef.size(), 0.0);
            for (int k = static_cast<int>(coef.size()) - 1; k >= 1; --k)
                dc[k - 1] = (k + 1 < static_cast<int>(coef.size()) ? dc[k + 1] : 0.0) + 2.0 * k * coef[k];
            dc[0] *= 0.5;
            coef = dc;
        }
    }
    std::lock_guard<std::mutex> lock(cache_->mu);
    cache_->norms[{a, b}] = out;
    return out;
}

}  // namespace betafluct
