#include "betafluct/lemmacheck.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <complex>
#include <numbers>

#include "betafluct/errors.hpp"
#include "betafluct/quadrature.hpp"

namespace betafluct {

namespace {

constexpr double pi = std::numbers::pi;

// a0 and its derivatives
double a0(double x, int m) {
    switch (m) {
        case 0: return 0.75 * x * x * x * x - 8.0 / 3.0 * x * x * x + 3.0 * x * x;
        case 1: return 3.0 * x * x * x - 8.0 * x * x + 6.0 * x;
        case 2: return 9.0 * x * x - 16.0 * x + 6.0;
        case 3: return 18.0 * x - 16.0;
        case 4: return 18.0;
        default: return 0.0;
    }
}

void check_kernel(const KernelA& ka) {
    if (!(ka.d > 0.0)) throw DomainError("kernel: d must be positive");
}

// N(t)/t^5 with N = 2t + t cos t - 3 sin t; series below t = 1
double numerator_ratio(double t) {
    if (t < 1.0) {
        double s = 0.0, t2 = t * t, pw = 1.0, f2m = 24.0;  // (2m)! at m = 2
        for (int m = 2; m < 14; ++m) {
            const double c = 1.0 / f2m - 3.0 / (f2m * (2 * m + 1));
            s += ((m % 2) ? -1.0 : 1.0) * c * pw;
            pw *= t2;
            f2m *= (2.0 * m + 1.0) * (2.0 * m + 2.0);
        }
        return s;
    }
    return (2.0 * t + t * std::cos(t) - 3.0 * std::sin(t)) / (t * t * t * t * t);
}

// int_x^inf e^{it} t^{-5} dt ~ i e^{ix} sum_j (-i)^j (5)_j x^{-5-j}
double sine_tail_asymptotic(double x) {
    std::complex<double> s = 0.0, term = 1.0 / std::pow(x, 5);
    double prev = INFINITY;
    for (int j = 0; j < 200; ++j) {
        if (std::abs(term) > prev) break;
        s += term;
        prev = std::abs(term);
        if (prev < 1e-18 * std::abs(s)) break;
        term *= std::complex<double>(0.0, -1.0) * (5.0 + j) / x;
    }
    return (std::complex<double>(0.0, 1.0) * std::exp(std::complex<double>(0.0, x)) * s).imag();
}

constexpr double kAsymptotic = 50.0;

// Chebyshev T_k via cos(k acos x)
long double cheb_t(int k, long double theta) { return std::cos(k * theta); }

// zeta with |zeta| < 1 for real z outside [-1,1], and sign-consistent sqrt(z^2-1)
void zeta_of(double z, double& zeta, double& root) {
    root = (z > 0.0 ? 1.0 : -1.0) * std::sqrt(z * z - 1.0);
    zeta = z - root;
}

Interval enlarge(const Interval& s, double eps) { return {s.a - eps, s.b + eps}; }

void check_disjoint(const Interval& s1, const Interval& s2, double eps) {
    if (!(eps >= 0.0)) throw DomainError("cross_coeff: eps must be non-negative");
    const Interval e1 = enlarge(s1, eps), e2 = enlarge(s2, eps);
    if (!(e1.b < e2.a || e2.b < e1.a)) throw DomainError("cross_coeff: enlarged intervals overlap");
}

// closed form of int log|lambda - mu| T_k(x(mu)) |X|^{-1/2} dmu over s, lambda outside
double closed_single(const Interval& s, double lambda, int k) {
    const double c = s.center(), d = s.half();
    double zeta, root;
    zeta_of((lambda - c) / d, zeta, root);
    if (k == 0) return pi * (std::log(0.5 * d) - std::log(std::abs(zeta)));
    return -pi * std::pow(zeta, k) / k;
}

}  // namespace

double kernel_a(double lambda, const KernelA& ka) {
    check_kernel(ka);
    lambda = std::abs(lambda);
    return kernel_a_branch_derivative(lambda, 0, lambda <= ka.d, ka);
}

double kernel_a_branch_derivative(double lambda, int m, bool inner, const KernelA& ka) {
    check_kernel(ka);
    if (m < 0 || m > 4) throw DomainError("kernel_a_branch_derivative: order must be 0..4");
    const double d = ka.d;
    if (inner) {
        if (m == 0) return -std::log(d) - a0(lambda / d, 0) + a0(1.0, 0);
        return -a0(lambda / d, m) / std::pow(d, m);
    }
    if (!(lambda > 0.0)) throw DomainError("kernel_a_branch_derivative: outer branch needs lambda > 0");
    if (m == 0) return -std::log(lambda);
    double f = 1.0;
    for (int j = 1; j < m; ++j) f *= j;
    return ((m % 2) ? -1.0 : 1.0) * f / std::pow(lambda, m);
}

std::array<double, 5> knot_jumps(const KernelA& ka) {
    std::array<double, 5> j{};
    for (int m = 0; m <= 4; ++m)
        j[m] = kernel_a_branch_derivative(ka.d, m, true, ka) - kernel_a_branch_derivative(ka.d, m, false, ka);
    return j;
}

std::array<double, 3> knot_jumps_fd(const KernelA& ka, double h) {
    const double d = ka.d;
    auto in = [&](double x) { return kernel_a_branch_derivative(x, 0, true, ka); };
    auto out = [&](double x) { return kernel_a_branch_derivative(x, 0, false, ka); };
    std::array<double, 3> j{};
    j[0] = in(d) - out(d);
    // second-order one-sided stencils towards each branch
    const double l1 = (3.0 * in(d) - 4.0 * in(d - h) + in(d - 2 * h)) / (2 * h);
    const double r1 = (-3.0 * out(d) + 4.0 * out(d + h) - out(d + 2 * h)) / (2 * h);
    j[1] = l1 - r1;
    const double l2 = (2.0 * in(d) - 5.0 * in(d - h) + 4.0 * in(d - 2 * h) - in(d - 3 * h)) / (h * h);
    const double r2 = (2.0 * out(d) - 5.0 * out(d + h) + 4.0 * out(d + 2 * h) - out(d + 3 * h)) / (h * h);
    j[2] = l2 - r2;
    return j;
}

double sine_tail(double x) {
    if (!(x > 0.0)) throw DomainError("sine_tail: x must be positive");
    if (x >= kAsymptotic) return sine_tail_asymptotic(x);
    auto f = [](double t) { return std::sin(t) / (t * t * t * t * t); };
    const double body = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, x, kAsymptotic, 15, 1e-14);
    return body + sine_tail_asymptotic(kAsymptotic);
}

namespace {

constexpr double kPanel = 0.5;

// int_0^x N(t)/t^5 dt: cumulative panel table on [0, 50] plus one Gauss-Legendre panel.
double head_integral(double x) {
    static const NodesWeights gl = gauss_legendre(24);
    auto panel = [](double lo, double hi) {
        double s = 0.0;
        for (std::size_t j = 0; j < gl.x.size(); ++j)
            s += gl.w[j] * numerator_ratio(0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[j]);
        return 0.5 * (hi - lo) * s;
    };
    static const std::vector<double> table = [&] {
        const int n = static_cast<int>(kAsymptotic / kPanel);
        std::vector<double> t(n + 1, 0.0);
        for (int i = 0; i < n; ++i) t[i + 1] = t[i] + panel(i * kPanel, (i + 1) * kPanel);
        return t;
    }();
    const int i = std::min(static_cast<int>(x / kPanel), static_cast<int>(table.size()) - 1);
    return table[i] + panel(i * kPanel, x);
}

}  // namespace

double sine_transform_factor(double x) {
    if (!(x > 0.0)) throw DomainError("sine_transform_factor: x must be positive");
    // total integral over (0, inf) is pi/48
    if (x <= kAsymptotic) return 0.5 * pi - 24.0 * head_integral(x);
    return 16.0 / (x * x * x) - 24.0 * std::sin(x) / (x * x * x * x) + 24.0 * sine_tail_asymptotic(x);
}

double fourier_a(double k, const KernelA& ka) {
    check_kernel(ka);
    if (!(k > 0.0)) throw DomainError("fourier_a: k must be positive");
    return 2.0 * sine_transform_factor(k * ka.d) / k;
}

double fourier_ratio(double k, const KernelA& ka) { return fourier_a(k, ka) * k / pi; }

namespace {

GapEstimate gap_on_grid(const KernelA& ka, double kmin, double kmax, int points) {
    GapEstimate g;
    const double lmin = std::log(kmin), lmax = std::log(kmax);
    std::vector<double> ks(points), ratio(points);
    int best = 0;
    g.min_fourier = INFINITY;
    for (int i = 0; i < points; ++i) {
        ks[i] = std::exp(lmin + (lmax - lmin) * i / (points - 1));
        const double fa = fourier_a(ks[i], ka);
        ratio[i] = fa * ks[i] / pi;
        if (ratio[i] > ratio[best]) best = i;
        if (fa < g.min_fourier) {
            g.min_fourier = fa;
            g.k_at_min = ks[i];
        }
    }
    double kbest = ks[best], rbest = ratio[best];
    g.sup_at_grid_edge = best == 0 || best == points - 1;
    if (!g.sup_at_grid_edge) {
        // golden-section on the bracketing cells, in log k
        double lo = std::log(ks[best - 1]), hi = std::log(ks[best + 1]);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        auto f = [&](double lk) { return fourier_ratio(std::exp(lk), ka); };
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo), f1 = f(x1), f2 = f(x2);
        for (int it = 0; it < 60; ++it) {
            if (f1 > f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = f(x2);
            }
        }
        const double lk = 0.5 * (lo + hi), fr = f(lk);
        if (fr > rbest) {
            rbest = fr;
            kbest = std::exp(lk);
        }
    }
    g.delta1 = 1.0 - rbest;
    g.k_at_sup = kbest;
    g.tail_k4 = std::pow(kmax, 4) * fourier_a(kmax, ka);
    return g;
}

}  // namespace

GapEstimate spectral_gap(const KernelA& ka, double kmin, double kmax, int points) {
    check_kernel(ka);
    if (!(kmin > 0.0 && kmax > kmin) || points < 3) throw DomainError("spectral_gap: bad grid");
    GapEstimate g = gap_on_grid(ka, kmin, kmax, points);
    g.delta1_refined = gap_on_grid(ka, kmin, kmax, 2 * points - 1).delta1;
    return g;
}

SingleIntegral single_integral(const Interval& s, double lambda, int k, double eps) {
    if (k < 0) throw DomainError("single_integral: k must be non-negative");
    const Interval e = enlarge(s, eps);
    if (lambda >= e.a && lambda <= e.b) throw DomainError("single_integral: lambda inside the enlarged interval");
    const int n = 256;
    const long double c = e.center(), d = e.half();
    long double sum = 0.0L;
    for (int j = 0; j < n; ++j) {
        const long double th = std::numbers::pi_v<long double> * (j + 0.5L) / n;
        sum += std::log(std::abs(static_cast<long double>(lambda) - (c + d * std::cos(th)))) * cheb_t(k, th);
    }
    SingleIntegral r;
    r.quadrature = static_cast<double>(sum * std::numbers::pi_v<long double> / n);
    r.closed_form = closed_single(e, lambda, k);
    if (k >= 1) {
        double zeta, root;
        zeta_of((lambda - e.center()) / e.half(), zeta, root);
        r.alternate_form = e.half() * (std::pow(zeta, k - 1) - std::pow(zeta, k + 1)) / (4.0 * k * root);
    }
    return r;
}

CrossCoefficient cross_coeff(const Interval& s1, const Interval& s2, int k, int kp, double eps) {
    check_disjoint(s1, s2, eps);
    if (k < 0 || kp < 0) throw DomainError("cross_coeff: mode indices must be non-negative");
    const Interval e1 = enlarge(s1, eps), e2 = enlarge(s2, eps);
    const int n = 128;
    const long double PI = std::numbers::pi_v<long double>;
    std::vector<long double> l1(n), l2(n), t1(n), t2(n);
    for (int j = 0; j < n; ++j) {
        const long double th = PI * (j + 0.5L) / n;
        l1[j] = e1.center() + static_cast<long double>(e1.half()) * std::cos(th);
        l2[j] = e2.center() + static_cast<long double>(e2.half()) * std::cos(th);
        t1[j] = cheb_t(k, th);
        t2[j] = cheb_t(kp, th);
    }
    long double s = 0.0L, red = 0.0L;
    for (int i = 0; i < n; ++i) {
        long double row = 0.0L;
        for (int j = 0; j < n; ++j) row += t2[j] * std::log(std::abs(l1[i] - l2[j]));
        s += t1[i] * row;
        red += t1[i] * closed_single(e2, static_cast<double>(l1[i]), kp);
    }
    const long double w = PI / n;
    return {static_cast<double>(s * w * w), static_cast<double>(red * w)};
}

DecayFit cross_decay(const Interval& s1, const Interval& s2, double eps, int kmax) {
    if (kmax < 3) throw DomainError("cross_decay: need at least three modes");
    DecayFit f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (int k = 1; k <= kmax; ++k) {
        const double v = std::abs(cross_coeff(s1, s2, k, k, eps).quadrature);
        f.values.push_back(v);
        const double x = 2.0 * k, y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double n = kmax;
    const double cxx = sxx - sx * sx / n, cxy = sxy - sx * sy / n, cyy = syy - sy * sy / n;
    f.slope = cxy / cxx;
    f.intercept = (sy - f.slope * sx) / n;
    f.r2 = cxy * cxy / (cxx * cyy);
    return f;
}

LemmaCertificate lemma_certificate(const KernelA& ka, const Interval& s1, const Interval& s2, double eps) {
    LemmaCertificate c;
    c.kernel = ka;
    c.gap = spectral_gap(ka);
    c.jumps = knot_jumps(ka);
    for (int m = 0; m <= 3; ++m) c.continuity_max = std::max(c.continuity_max, std::abs(c.jumps[m]));
    c.decay = cross_decay(s1, s2, eps);
    const Interval e1 = enlarge(s1, eps), e2 = enlarge(s2, eps);
    for (int k = 1; k <= 30; ++k) {
        for (int p = 0; p < 5; ++p) {
            // points near the facing edge, where zeta^k stays resolvable in long double
            const double lam = (e2.a > e1.b ? e2.a : e2.b) + (e2.a > e1.b ? 1.0 : -1.0) * 0.005 * p;
            const SingleIntegral si = single_integral(s1, lam, k, eps);
            c.single_integral_rel =
                std::max(c.single_integral_rel, std::abs(si.quadrature - si.closed_form) / std::abs(si.closed_form));
            if (k == 1 && p == 0) c.alternate_ratio = si.alternate_form / si.closed_form;
        }
    }
    for (int k = 0; k <= 8; ++k) {
        for (int kp = 0; kp <= 8; ++kp) {
            const CrossCoefficient a = cross_coeff(s1, s2, k, kp, eps);
            const CrossCoefficient b = cross_coeff(s2, s1, kp, k, eps);
            const double scale = std::max(std::abs(a.quadrature), 1e-300);
            c.cross_reduction_rel = std::max(c.cross_reduction_rel, std::abs(a.quadrature - a.reduced) / scale);
            c.symmetry = std::max(c.symmetry, std::abs(a.reduced - b.reduced));
        }
    }
    return c;
}

}  // namespace betafluct
