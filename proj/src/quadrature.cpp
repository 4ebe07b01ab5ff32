#include "betafluct/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "betafluct/errors.hpp"

namespace betafluct {

namespace {

constexpr double pi = std::numbers::pi;

NodesWeights compute_gauss_legendre(int n) {
    NodesWeights r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // final derivative at converged x
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = -x;
        r.w[i] = w;
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

}  // namespace

NodesWeights gauss_legendre(int n) {
    if (n < 1) throw DomainError("gauss_legendre: n must be positive");
    static std::mutex mu;
    static std::map<int, NodesWeights> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    return cache.emplace(n, compute_gauss_legendre(n)).first->second;
}

NodesWeights gauss_chebyshev_first(int n) {
    NodesWeights r;
    r.x.resize(n);
    r.w.assign(n, pi / n);
    for (int j = 0; j < n; ++j) r.x[j] = std::cos((2.0 * j + 1.0) * pi / (2.0 * n));
    return r;
}

NodesWeights gauss_chebyshev_second(int n) {
    NodesWeights r;
    r.x.resize(n);
    r.w.resize(n);
    for (int j = 1; j <= n; ++j) {
        double th = j * pi / (n + 1.0);
        r.x[j - 1] = std::cos(th);
        double s = std::sin(th);
        r.w[j - 1] = pi / (n + 1.0) * s * s;
    }
    return r;
}

cd Contour::point(double theta) const {
    return center + cd(semi_major * std::cos(theta), semi_minor * std::sin(theta));
}

cd Contour::tangent(double theta) const {
    return cd(-semi_major * std::sin(theta), semi_minor * std::cos(theta));
}

Contour default_contour(double a, double b) {
    double h = 0.5 * (b - a);
    return Contour{cd(0.5 * (a + b), 0.0), 1.5 * h, 1.5 * h, 512};
}

Contour bernstein_ellipse(double a, double b, double R, int nodes) {
    if (!(R > 1.0)) throw DomainError("bernstein_ellipse: R must exceed 1");
    double d = 0.5 * (b - a);
    return Contour{cd(0.5 * (a + b), 0.0), 0.5 * d * (R + 1.0 / R), 0.5 * d * (R - 1.0 / R), nodes};
}

cd contour_trapezoid(const std::function<cd(cd)>& g, const Contour& contour) {
    const int n = contour.nodes;
    cd sum = 0.0;
    for (int j = 0; j < n; ++j) {
        double th = 2.0 * pi * j / n;
        sum += g(contour.point(th)) * contour.tangent(th);
    }
    return sum * (2.0 * pi / n);
}

ContourResult contour_integral(const std::function<cd(cd)>& g, const Contour& contour, double tol,
                               int max_nodes) {
    Contour c = contour;
    cd prev = contour_trapezoid(g, c);
    double drift = 0.0;
    while (c.nodes <= max_nodes / 2) {
        c.nodes *= 2;
        cd cur = contour_trapezoid(g, c);
        drift = std::abs(cur - prev) / std::max(1.0, std::abs(cur));
        if (drift < tol) return {cur, drift, c.nodes};
        prev = cur;
    }
    throw AccuracyError("contour_integral: no convergence under node doubling", drift);
}

double pv_integral(const std::function<double(double)>& f, double a, double b, double lambda0,
                   const PvRule& rule) {
    if (!(a < b)) throw DomainError("pv_integral: empty interval");
    if (!(lambda0 > a && lambda0 < b)) throw DomainError("pv_integral: lambda0 must be interior");
    const double c = 0.5 * (a + b), d = 0.5 * (b - a);
    const double c0 = std::clamp((lambda0 - c) / d, -1.0, 1.0);
    const double th0 = std::acos(c0);
    const double f0 = f(lambda0);
    const NodesWeights gl = gauss_legendre(rule.nodes);
    auto piece = [&](double lo, double hi) {
        double s = 0.0, half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t j = 0; j < gl.x.size(); ++j) {
            double th = mid + half * gl.x[j];
            double ct = std::cos(th);
            s += gl.w[j] * (f(c + d * ct) - f0) * std::sin(th) / (c0 - ct);
        }
        return s * half;
    };
    return piece(0.0, th0) + piece(th0, pi) + f0 * std::log((lambda0 - a) / (b - lambda0));
}

double integrate_inv_sqrt(const std::function<double(double)>& f, double a, double b, int n) {
    const double c = 0.5 * (a + b), d = 0.5 * (b - a);
    const NodesWeights q = gauss_chebyshev_first(n);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += q.w[j] * f(c + d * q.x[j]);
    return s;
}

double integrate_sqrt(const std::function<double(double)>& f, double a, double b, int n) {
    const double c = 0.5 * (a + b), d = 0.5 * (b - a);
    const NodesWeights q = gauss_chebyshev_second(n);
    double s = 0.0;
    for (int j = 0; j < n; ++j) s += q.w[j] * f(c + d * q.x[j]);
    return s * d * d;
}

}  // namespace betafluct
