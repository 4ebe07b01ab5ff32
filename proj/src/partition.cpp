#include "betafluct/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "betafluct/errors.hpp"
#include "betafluct/fluctuation.hpp"
#include "betafluct/quadrature.hpp"

namespace betafluct {

namespace {

constexpr double pi = std::numbers::pi;
const cd I1(0.0, 1.0);

// Bernstein radius of z relative to [c-d, c+d].
double bernstein_radius(cd z, double c, double d) {
    const cd x = (z - c) / d;
    const cd w = x + std::sqrt(x - 1.0) * std::sqrt(x + 1.0);
    const double r = std::abs(w);
    return r >= 1.0 ? r : 1.0 / r;
}

// Gauss-Chebyshev (second kind) data for J(z) = int (log P_t)'(l) sqrt|X(l)| / (z - l) dl.
struct JData {
    std::vector<double> lam, wt;
};

JData j_data(const OneCutBlock& blk, double t, int n) {
    const NodesWeights gc = gauss_chebyshev_second(n);
    const double c = blk.center(), d = blk.half(), P0 = blk.P0();
    JData r;
    r.lam.resize(n);
    r.wt.resize(n);
    for (int m = 0; m < n; ++m) {
        const double l = c + d * gc.x[m];
        const cd P = blk.P(cd(l, 0.0));
        const cd dP = blk.dP(cd(l, 0.0));
        const double Pt = (1.0 - t) * P0 + t * P.real();
        if (!(Pt > 0.0)) throw ModelAssumptionError("r_beta: interpolated density factor vanishes on the support");
        r.lam[m] = l;
        r.wt[m] = gc.w[m] * d * d * t * dP.real() / Pt;
    }
    return r;
}

void j_eval(const JData& jd, cd z, cd& J, cd& Jp) {
    J = 0.0;
    Jp = 0.0;
    for (std::size_t m = 0; m < jd.lam.size(); ++m) {
        const cd inv = 1.0 / (z - jd.lam[m]);
        J += jd.wt[m] * inv;
        Jp -= jd.wt[m] * inv * inv;
    }
}

// u0 and u0' given J, J' and X^{1/2} at z.
void u0_pair(double kappa0, double c, cd z, cd Xh, cd J, cd Jp, cd& u, cd& up) {
    const cd X = Xh * Xh, y = z - c;
    u = kappa0 * (-J / (2.0 * pi * Xh) + y / (2.0 * X) - 1.0 / (2.0 * Xh));
    up = kappa0 * (-Jp / (2.0 * pi * Xh) + J * y / (2.0 * pi * Xh * X) + 1.0 / (2.0 * X) - y * y / (X * X) +
                   y / (2.0 * Xh * X));
}

cd sqrtX_block(const OneCutBlock& blk, cd z) { return std::sqrt(z - blk.a) * std::sqrt(z - blk.b); }

double kernel_kappa(const OneCutBlock& blk, double beta, KernelNormalization norm) {
    const double d = blk.half();
    return norm == KernelNormalization::covariant ? d * d / (2.0 * beta) : 1.0;
}

double kernel_prefactor(double beta, KernelNormalization norm) {
    return norm == KernelNormalization::covariant ? 0.5 * beta : 1.0;
}

// Number of zeros of P_t inside the Bernstein ellipse of radius R (argument principle).
int zeros_inside(const OneCutBlock& blk, double t, double R, int nodes) {
    const double c = blk.center(), d = blk.half(), P0 = blk.P0();
    double total = 0.0;
    cd prev;
    for (int j = 0; j <= nodes; ++j) {
        const cd w = R * std::exp(I1 * (2.0 * pi * j / nodes));
        const cd z = c + 0.5 * d * (w + 1.0 / w);
        const cd v = (1.0 - t) * P0 + t * blk.P(z);
        if (j > 0) total += std::arg(v / prev);
        prev = v;
    }
    return static_cast<int>(std::lround(total / (2.0 * pi)));
}

// r(t) at fixed node count: nested trapezoid sums on the inner (R1) and outer (R2) ellipses.
cd nested_sum(const OneCutBlock& blk, double t, double beta, KernelNormalization norm, int N, double R1, double R2) {
    const double c = blk.center(), d = blk.half(), P0 = blk.P0();
    const double kappa0 = 2.0 / beta - 1.0;
    const double kappa = kernel_kappa(blk, beta, norm);
    const bool need_u0 = kappa0 != 0.0;
    JData jd;
    if (need_u0 && t != 0.0) jd = j_data(blk, t, 2 * N);
    const double h = 2.0 * pi / N;
    std::vector<cd> zeta(N), omega(N);
    for (int j = 0; j < N; ++j) {
        const cd w = R1 * std::exp(I1 * (h * j));
        const cd z = c + 0.5 * d * (w + 1.0 / w);
        const cd Xh = 0.5 * d * (w - 1.0 / w);
        const cd X = Xh * Xh;
        cd F = kappa / (X * X);
        if (need_u0) {
            cd J = 0.0, Jp = 0.0, u, up;
            if (t != 0.0) j_eval(jd, z, J, Jp);
            u0_pair(kappa0, c, z, Xh, J, Jp, u, up);
            F += u * u - kappa0 * up;
        }
        const cd Pt = (1.0 - t) * P0 + t * blk.P(z);
        zeta[j] = z;
        omega[j] = F / Pt * I1 * Xh * h;
    }
    cd S = 0.0;
    for (int i = 0; i < N; ++i) {
        const cd w = R2 * std::exp(I1 * (h * i));
        const cd z = c + 0.5 * d * (w + 1.0 / w);
        cd Phi = 0.0;
        for (int j = 0; j < N; ++j) Phi += omega[j] / (z - zeta[j]);
        const cd dV = blk.V(z) - 2.0 * (z - c) * (z - c) / (d * d);
        S += dV * I1 * Phi * h;
    }
    return kernel_prefactor(beta, norm) / (4.0 * pi * pi) * S;
}

std::vector<double> t_grid(int points) {
    std::vector<double> ts(points);
    for (int i = 0; i < points; ++i) ts[i] = static_cast<double>(i) / (points - 1);
    return ts;
}

double simpson(const std::vector<double>& f, int stride) {
    const int n = (static_cast<int>(f.size()) - 1) / stride;
    const double h = static_cast<double>(stride) / (f.size() - 1);
    double s = f.front() + f.back();
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f[i * stride];
    return s * h / 3.0;
}

}  // namespace

double c_beta(double beta) { return beta / 24.0 - 0.25 + 1.0 / (6.0 * beta); }

double log_gaussian_partition(long n, double beta) {
    if (n < 1) throw DomainError("log_gaussian_partition: n must be positive");
    if (!(beta > 0.0)) throw DomainError("log_gaussian_partition: beta must be positive");
    const long double nn = n, b = beta;
    long double s = -(nn / 2 + b * nn * (nn - 1) / 4) * std::log(nn * b / 2) + nn / 2 * std::log(2 * std::numbers::pi_v<long double>);
    const long double g1 = std::lgamma(1 + b / 2);
    for (long j = 1; j <= n; ++j) s += std::lgamma(1 + j * b / 2) - g1;
    s -= std::lgamma(nn + 1);
    return static_cast<double>(s);
}

namespace {

// F_beta without the constant
double F_beta_nonconstant(long n, double beta) {
    const double nd = static_cast<double>(n);
    return nd * (0.5 * beta - 1.0) * (std::log(nd * beta / 2.0) - 0.5) + nd * (std::log(2.0 * pi) - std::lgamma(beta / 2.0)) +
           c_beta(beta) * std::log(nd);
}

}  // namespace

double fitted_c1(double beta) {
    static std::mutex mu;
    static std::map<double, double> cache;
    {
        std::lock_guard<std::mutex> lk(mu);
        auto it = cache.find(beta);
        if (it != cache.end()) return it->second;
    }
    // residual = c1 + A/n + B/n^2 at three sizes
    const long ns[3] = {1024, 2048, 4096};
    Eigen::Matrix3d A;
    Eigen::Vector3d r;
    for (int i = 0; i < 3; ++i) {
        const double nd = static_cast<double>(ns[i]);
        r[i] = log_gaussian_partition(ns[i], beta) - (0.5 * beta * nd * nd * (-0.75)) - F_beta_nonconstant(ns[i], beta);
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / nd;
        A(i, 2) = 1.0 / (nd * nd);
    }
    const double c1 = A.fullPivLu().solve(r)[0];
    std::lock_guard<std::mutex> lk(mu);
    cache[beta] = c1;
    return c1;
}

FBeta F_beta(long n, double beta) {
    if (n < 1) throw DomainError("F_beta: n must be positive");
    if (!(beta > 0.0)) throw DomainError("F_beta: beta must be positive");
    FBeta f;
    f.c_beta = c_beta(beta);
    f.c1 = fitted_c1(beta);
    f.value = F_beta_nonconstant(n, beta) + f.c1;
    return f;
}

double F_beta_uncorrected(long n, double beta) {
    const double nd = static_cast<double>(n);
    return nd * (0.5 * beta - 1.0) * (std::log(nd * beta / 2.0) - 0.5) +
           nd * (0.5 * std::log(2.0 * pi) - std::lgamma(beta / 2.0)) - c_beta(beta) * std::log(nd);
}

double entropy(const EquilibriumMeasure& eq, int M) { return pair(density_series(eq, M), log_density_series(eq, M)); }

double entropy_term(long n, double beta, double s) {
    return static_cast<double>(n) * (0.5 * beta - 1.0) * (s - 0.5 + std::log(2.0 * pi));
}

double entropy_term_uncorrected(long n, double beta, double s) {
    return static_cast<double>(n) * (0.5 * beta - 1.0) * (s - 1.0 - std::log(2.0 * pi));
}

OneCutBlock onecut_block(const EquilibriumMeasure& eq) {
    if (eq.q() != 1) throw DomainError("onecut_block: requires a one-cut measure");
    OneCutBlock blk;
    blk.a = eq.support.intervals[0].a;
    blk.b = eq.support.intervals[0].b;
    const Polynomial P = eq.P, dP = eq.P.derivative(), V = eq.V.poly();
    blk.P = [P](cd z) { return P(z); };
    blk.dP = [dP](cd z) { return dP(z); };
    blk.V = [V](cd z) { return V(z); };
    blk.P_coeffs = P.coeffs();
    return blk;
}

OneCutBlock multicut_block(const EquilibriumMeasure& eq, int alpha) {
    const int q = eq.q();
    if (alpha < 0 || alpha >= q) throw DomainError("multicut_block: interval index out of range");
    if (q == 1) return onecut_block(eq);
    const Interval me = eq.support.intervals[alpha];
    const double mu = eq.masses[alpha];
    const double c = me.center(), d = me.half();

    struct Other {
        double a, b;
        bool left;
        std::vector<double> lam, F;
    };
    auto others = std::make_shared<std::vector<Other>>();
    const int nq = 256;
    const NodesWeights gc = gauss_chebyshev_first(nq);
    double Rcap = 4.0;
    for (int b = 0; b < q; ++b) {
        if (b == alpha) continue;
        const Interval iv = eq.support.intervals[b];
        Other o{iv.a, iv.b, b < alpha, {}, {}};
        for (int j = 0; j < nq; ++j) {
            const double l = iv.center() + iv.half() * gc.x[j];
            o.lam.push_back(l);
            o.F.push_back(eq.smooth_factor(b, l));
        }
        const double near = o.left ? iv.b : iv.a;
        Rcap = std::min(Rcap, std::pow(bernstein_radius(cd(near, 0.0), c, d), 0.9));
        others->push_back(std::move(o));
    }
    const Polynomial P = eq.P, dP = eq.P.derivative(), V = eq.V.poly();
    // P~ = s/mu * P * prod X_b^{1/2}, the sign s making P~ positive on the interval
    auto prod = [others](cd z) {
        cd p = 1.0;
        for (const auto& o : *others) p *= std::sqrt(z - o.a) * std::sqrt(z - o.b);
        return p;
    };
    const double s = (P(cd(c, 0.0)) * prod(cd(c, 0.0))).real() > 0.0 ? 1.0 : -1.0;
    OneCutBlock blk;
    blk.a = me.a;
    blk.b = me.b;
    blk.R_cap = Rcap;
    blk.P = [=](cd z) { return s / mu * P(z) * prod(z); };
    blk.dP = [=](cd z) {
        cd sum = 0.0;
        for (const auto& o : *others) sum += 0.5 * (1.0 / (z - o.a) + 1.0 / (z - o.b));
        return s / mu * prod(z) * (dP(z) + P(z) * sum);
    };
    // mu^{-1}(V - 2 sum_b int log(+-(z - l)) rho_b(l) dl), log branch cut pointing away from the interval
    blk.V = [=](cd z) {
        cd v = V(z);
        for (const auto& o : *others) {
            cd lp = 0.0;
            for (std::size_t j = 0; j < o.lam.size(); ++j)
                lp += o.F[j] * (o.left ? std::log(z - o.lam[j]) : std::log(o.lam[j] - z));
            v -= 2.0 * lp / static_cast<double>(o.lam.size());
        }
        return v / mu;
    };
    return blk;
}

cd u0(const OneCutBlock& blk, cd z, double t, double beta, int nodes) {
    const double c = blk.center(), d = blk.half();
    if (bernstein_radius(z, c, d) < 1.0 + 1e-6) throw DomainError("u0: point on or too close to the support");
    cd J = 0.0, Jp = 0.0, u, up;
    if (t != 0.0) j_eval(j_data(blk, t, nodes), z, J, Jp);
    u0_pair(2.0 / beta - 1.0, c, z, sqrtX_block(blk, z), J, Jp, u, up);
    return u;
}

cd u0_prime(const OneCutBlock& blk, cd z, double t, double beta, int nodes) {
    const double c = blk.center(), d = blk.half();
    if (bernstein_radius(z, c, d) < 1.0 + 1e-6) throw DomainError("u0_prime: point on or too close to the support");
    cd J = 0.0, Jp = 0.0, u, up;
    if (t != 0.0) j_eval(j_data(blk, t, nodes), z, J, Jp);
    u0_pair(2.0 / beta - 1.0, c, z, sqrtX_block(blk, z), J, Jp, u, up);
    return up;
}

cd u1(const OneCutBlock& blk, cd z, double t, double beta, KernelNormalization norm, int nodes) {
    const double c = blk.center(), d = blk.half(), P0 = blk.P0();
    const double Rz = bernstein_radius(z, c, d);
    if (Rz < 1.0 + 1e-6) throw DomainError("u1: point on or too close to the support");
    const double R = std::sqrt(std::min(Rz, std::min(4.0, blk.R_cap)));
    if (zeros_inside(blk, t, R, 1024) != 0)
        throw AccuracyError("u1: zero of the interpolated density factor inside the contour", t);
    const double kappa0 = 2.0 / beta - 1.0;
    const double kappa = kernel_kappa(blk, beta, norm);
    JData jd;
    if (kappa0 != 0.0 && t != 0.0) jd = j_data(blk, t, 2 * nodes);
    const double h = 2.0 * pi / nodes;
    cd S = 0.0;
    for (int j = 0; j < nodes; ++j) {
        const cd w = R * std::exp(I1 * (h * j));
        const cd zeta = c + 0.5 * d * (w + 1.0 / w);
        const cd Xh = 0.5 * d * (w - 1.0 / w);
        cd F = kappa / (Xh * Xh * Xh * Xh);
        if (kappa0 != 0.0) {
            cd J = 0.0, Jp = 0.0, u, up;
            if (t != 0.0) j_eval(jd, zeta, J, Jp);
            u0_pair(kappa0, c, zeta, Xh, J, Jp, u, up);
            F += u * u - kappa0 * up;
        }
        const cd Pt = (1.0 - t) * P0 + t * blk.P(zeta);
        S += F / ((z - zeta) * Pt) * I1 * Xh * h;
    }
    return S / (2.0 * pi * I1 * sqrtX_block(blk, z));
}

namespace {

struct Radii {
    double R = 0.0, R1 = 0.0, R2 = 0.0;
};

// Contour radii: R from the zeros of P_t over the t-grid, inner R^{1/3}, outer R^{2/3}.
Radii contour_radii(const OneCutBlock& blk, const std::vector<double>& ts) {
    const double c = blk.center(), d = blk.half(), P0 = blk.P0();
    double R = std::min(4.0, blk.R_cap);
    for (double t : ts) {
        if (t == 0.0) continue;
        if (!blk.P_coeffs.empty()) {
            std::vector<double> co = blk.P_coeffs;
            for (double& x : co) x *= t;
            co[0] += (1.0 - t) * P0;
            for (const cd& r : Polynomial(co).roots()) R = std::min(R, bernstein_radius(r, c, d));
        } else {
            while (zeros_inside(blk, t, R, 2048) != 0) {
                R = 1.0 + 0.7 * (R - 1.0);
                if (R < 1.01) break;
            }
        }
        if (R < 1.01)
            throw ModelAssumptionError("r_beta: interpolated density factor has a zero at the support (t = " +
                                       std::to_string(t) + ")");
    }
    return {R, std::cbrt(R), std::pow(R, 2.0 / 3.0)};
}

struct TIntegral {
    double value = 0.0, drift = 0.0, imag = 0.0;
};

TIntegral integrate_t(const std::vector<double>& ts, const std::function<cd(double)>& f, double tol) {
    std::vector<double> re(ts.size());
    TIntegral r;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const cd v = f(ts[i]);
        re[i] = v.real();
        r.imag = std::max(r.imag, std::abs(v.imag()));
    }
    r.value = simpson(re, 1);
    r.drift = std::abs(r.value - simpson(re, 2));
    if (r.drift > tol) throw AccuracyError("r_beta: t-integration does not settle", r.drift);
    return r;
}

}  // namespace

RBetaResult r_beta(const OneCutBlock& blk, double beta, const RBetaOptions& opt) {
    if (!(beta > 0.0)) throw DomainError("r_beta: beta must be positive");
    if (opt.t_points < 5 || (opt.t_points - 1) % 4 != 0) throw DomainError("r_beta: t_points must be 4k+1");
    const std::vector<double> ts = t_grid(opt.t_points);
    const Radii rad = contour_radii(blk, ts);
    RBetaResult res;
    res.R_inner = rad.R1;
    res.R_outer = rad.R2;
    auto at_t = [&](double t) {
        int N = opt.min_nodes;
        cd v = nested_sum(blk, t, beta, opt.norm, N, rad.R1, rad.R2);
        for (;;) {
            if (2 * N > opt.max_nodes)
                throw AccuracyError("r_beta: nested contour sums do not settle under node doubling", res.contour_drift);
            const cd v2 = nested_sum(blk, t, beta, opt.norm, 2 * N, rad.R1, rad.R2);
            const double drift = std::abs(v2 - v);
            v = v2;
            N *= 2;
            if (drift < opt.contour_tol) {
                res.contour_drift = std::max(res.contour_drift, drift);
                break;
            }
        }
        res.nodes = std::max(res.nodes, N);
        return v;
    };
    const TIntegral ti = integrate_t(ts, at_t, opt.t_tol);
    res.value = ti.value;
    res.imag = ti.imag;
    res.t_drift = ti.drift;
    return res;
}

RBetaResult r_beta(const EquilibriumMeasure& eq, double beta, const RBetaOptions& opt) {
    return r_beta(onecut_block(eq), beta, opt);
}

RBetaResult r_beta_reduced(const EquilibriumMeasure& eq, double beta, const RBetaOptions& opt) {
    if (!(beta > 0.0)) throw DomainError("r_beta_reduced: beta must be positive");
    const OneCutBlock blk = onecut_block(eq);
    const double c = blk.center(), d = blk.half(), P0 = blk.P0();
    // (V - V0)(c + y) and the polynomial part W(y) of its product with X^{-1/2} = sum_k C(2k,k)(d^2/4)^k y^{-2k-1}
    std::vector<double> dv = eq.V.poly().compose_affine(1.0, c).coeffs();
    if (dv.size() < 3) dv.resize(3, 0.0);
    dv[2] -= 2.0 / (d * d);
    const int m = static_cast<int>(dv.size()) - 1;
    std::vector<double> W(std::max(m, 1), 0.0);
    double ck = 1.0;
    for (int k = 0; 2 * k + 1 <= m; ++k) {
        for (int j = 2 * k + 1; j <= m; ++j) W[j - 2 * k - 1] += dv[j] * ck;
        ck *= (2.0 * k + 1.0) * (2.0 * k + 2.0) / ((k + 1.0) * (k + 1.0)) * d * d / 4.0;
    }
    const Polynomial Wp(W);

    const std::vector<double> ts = t_grid(opt.t_points);
    const Radii rad = contour_radii(blk, ts);
    const double kappa0 = 2.0 / beta - 1.0;
    const double kappa = kernel_kappa(blk, beta, opt.norm);
    const double pref = kernel_prefactor(beta, opt.norm);
    RBetaResult res;
    res.R_inner = rad.R1;
    auto sum_at = [&](double t, int N) {
        JData jd;
        if (kappa0 != 0.0 && t != 0.0) jd = j_data(blk, t, 2 * N);
        const double h = 2.0 * pi / N;
        cd S = 0.0;
        for (int j = 0; j < N; ++j) {
            const cd w = rad.R1 * std::exp(I1 * (h * j));
            const cd z = c + 0.5 * d * (w + 1.0 / w);
            const cd Xh = 0.5 * d * (w - 1.0 / w);
            cd F = kappa / (Xh * Xh * Xh * Xh);
            if (kappa0 != 0.0) {
                cd J = 0.0, Jp = 0.0, u, up;
                if (t != 0.0) j_eval(jd, z, J, Jp);
                u0_pair(kappa0, c, z, Xh, J, Jp, u, up);
                F += u * u - kappa0 * up;
            }
            const cd Pt = (1.0 - t) * P0 + t * blk.P(z);
            S += Wp(z - c) * F / Pt * I1 * Xh * h;
        }
        return pref * I1 / (2.0 * pi) * S;
    };
    auto at_t = [&](double t) {
        int N = opt.min_nodes;
        cd v = sum_at(t, N);
        for (;;) {
            if (2 * N > opt.max_nodes) throw AccuracyError("r_beta_reduced: contour sum does not settle", res.contour_drift);
            const cd v2 = sum_at(t, 2 * N);
            const double drift = std::abs(v2 - v);
            v = v2;
            N *= 2;
            if (drift < opt.contour_tol) {
                res.contour_drift = std::max(res.contour_drift, drift);
                break;
            }
        }
        res.nodes = std::max(res.nodes, N);
        return v;
    };
    const TIntegral ti = integrate_t(ts, at_t, opt.t_tol);
    res.value = ti.value;
    res.imag = ti.imag;
    res.t_drift = ti.drift;
    return res;
}

double r_two_closed_form(const EquilibriumMeasure& eq, KernelNormalization norm) {
    if (eq.q() != 1) throw DomainError("r_two_closed_form: requires a one-cut measure");
    const double a = eq.support.intervals[0].a, b = eq.support.intervals[0].b;
    const double d = 0.5 * (b - a), P0 = 4.0 / (d * d);
    const double L = std::log(eq.P(a) * eq.P(b) / (P0 * P0));
    return norm == KernelNormalization::covariant ? -L / 24.0 : -2.0 / (3.0 * (b - a) * (b - a)) * L;
}

std::vector<ExpansionTerm> ExpansionReport::terms() const {
    return {
        {"term_n2", "energy term (beta/2) n^2 E[V]", term_n2},
        {"term_F", "Gaussian reference terms F_beta(n) with fitted constant", term_F},
        {"term_n", "entropy term n(beta/2-1)((log rho,rho) - 1/2 + log 2pi)", term_n},
        {"term_logn", "extra logarithm c_beta (q-1) log n", term_logn},
        {"term_r", "interval constants sum r_beta + c_beta sum log mu", term_r},
        {"term_det", "determinant correction -(1/2) log det(1 - Dbar Ltilde)", term_det},
        {"term_nu", "mean-shift interaction (2/beta)(beta/2-1)^2 (Ltilde G nu, nu)", term_nu},
        {"term_theta", "lattice sum log Theta(0; {n mu})", term_theta},
    };
}

namespace {

void finish_n_terms(ExpansionReport& r, const MultiCutModel& model, long n) {
    const double nd = static_cast<double>(n), beta = r.beta;
    r.n = n;
    r.term_n2 = 0.5 * beta * nd * nd * r.energy;
    r.term_F = F_beta(n, beta).value;
    r.term_n = entropy_term(n, beta, r.entropy);
    r.term_F_uncorrected = F_beta_uncorrected(n, beta);
    r.term_n_uncorrected = entropy_term_uncorrected(n, beta, r.entropy);
    r.term_logn = r.c_beta * (r.q - 1) * std::log(nd);
    r.term_theta = 0.0;
    if (r.q >= 2) {
        Eigen::VectorXd mu(r.q);
        for (int a = 0; a < r.q; ++a) mu[a] = model.eq.masses[a];
        ThetaParams p = theta_offsets(mu, n);
        p.beta = beta;
        p.Q = model.Q;
        p.t = I_functional(model, model.log_rho_bar);
        r.term_theta = theta_eval(p).log_value;
    }
    r.total = r.term_n2 + r.term_F + r.term_n + r.term_logn + r.term_r + r.term_det + r.term_nu + r.term_theta;
}

}  // namespace

ExpansionReport log_partition(const MultiCutModel& model, long n, double beta, const PartitionOptions& opt) {
    if (n < 10) throw DomainError("log_partition: n must be at least 10");
    if (!(beta > 0.0)) throw DomainError("log_partition: beta must be positive");
    ExpansionReport r;
    r.beta = beta;
    r.q = model.q();
    r.c_beta = c_beta(beta);
    r.c1 = fitted_c1(beta);
    r.energy = model.original.energy;
    r.entropy = entropy(model.original, model.M);
    if (r.q == 1) {
        const RBetaResult rb = r_beta(onecut_block(model.eq), beta, opt.r);
        r.r_blocks = {rb.value};
        r.term_r = rb.value;
        r.r_contour_drift = rb.contour_drift;
        r.r_t_drift = rb.t_drift;
    } else {
        r.term_r = 0.0;
        for (int a = 0; a < r.q; ++a) {
            const RBetaResult rb = r_beta(multicut_block(model.eq, a), beta, opt.r);
            r.r_blocks.push_back(rb.value);
            r.term_r += rb.value + r.c_beta * std::log(model.eq.masses[a]);
            r.r_contour_drift = std::max(r.r_contour_drift, rb.contour_drift);
            r.r_t_drift = std::max(r.r_t_drift, rb.t_drift);
        }
        r.det = det_one_minus_DLtilde(model);
        if (!(r.det > 0.0)) throw AccuracyError("log_partition: det(1 - Dbar Ltilde) is not positive", r.det);
        const Support& s = model.eq.support;
        const int Mh = model.M / 2;
        const Eigen::MatrixXd Dh = build_Dbar(s, Mh).m, Lh = build_Ltilde(s, Mh).m;
        const double det_half = (Eigen::MatrixXd::Identity(Dh.rows(), Dh.cols()) - Dh * Lh).determinant();
        r.det_drift = std::abs(r.det - det_half);
        r.term_det = -0.5 * std::log(r.det);
        const Eigen::VectorXd Gnu = model.G.m * model.nu.stacked();
        const ChebSeries LGnu =
            ChebSeries::from_stacked(ChebSeries::Kind::function, s.intervals, model.Ltilde.m * Gnu);
        r.term_nu = (2.0 / beta) * (0.5 * beta - 1.0) * (0.5 * beta - 1.0) * pair(model.nu, LGnu);
    }
    finish_n_terms(r, model, n);
    return r;
}

ExpansionReport log_partition_at(const ExpansionReport& base, const MultiCutModel& model, long n) {
    if (n < 10) throw DomainError("log_partition_at: n must be at least 10");
    ExpansionReport r = base;
    finish_n_terms(r, model, n);
    return r;
}

}  // namespace betafluct
