#include "betafluct/equilibrium.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "betafluct/chebyshev.hpp"
#include "betafluct/errors.hpp"
#include "betafluct/quadrature.hpp"

namespace betafluct {

namespace {

constexpr double pi = std::numbers::pi;

std::vector<double> endpoints_of(const Support& s) {
    std::vector<double> e;
    for (const auto& iv : s.intervals) {
        e.push_back(iv.a);
        e.push_back(iv.b);
    }
    return e;
}

Support support_from(const std::vector<double>& e) {
    Support s;
    for (std::size_t i = 0; i + 1 < e.size(); i += 2) s.intervals.push_back({e[i], e[i + 1]});
    return s;
}

bool ordered(const std::vector<double>& e) {
    for (std::size_t i = 1; i < e.size(); ++i)
        if (!(e[i] > e[i - 1])) return false;
    return true;
}

// Series of X^{-1/2}(z) z^q = prod_e (1 - e w)^{-1/2} in w = 1/z, up to w^K.
std::vector<double> inv_sqrt_series(const std::vector<double>& e, int K) {
    std::vector<double> binom(K + 1);
    binom[0] = 1.0;
    for (int m = 1; m <= K; ++m) binom[m] = binom[m - 1] * (2.0 * m - 1.0) / (2.0 * m);
    std::vector<double> s(K + 1, 0.0);
    s[0] = 1.0;
    for (double ep : e) {
        std::vector<double> f(K + 1), r(K + 1, 0.0);
        double pw = 1.0;
        for (int m = 0; m <= K; ++m) {
            f[m] = binom[m] * pw;
            pw *= ep;
        }
        for (int i = 0; i <= K; ++i)
            for (int j = 0; i + j <= K; ++j) r[i + j] += s[i] * f[j];
        s = r;
    }
    return s;
}

// Coefficient of z^p in the Laurent expansion of V'(z)/X^{1/2}(z) at infinity.
struct LaurentQuotient {
    std::vector<double> v, s;
    int q;
    double coef(int p) const {
        double r = 0.0;
        for (int j = 0; j < static_cast<int>(v.size()); ++j) {
            int m = j - q - p;
            if (m >= 0 && m < static_cast<int>(s.size())) r += v[j] * s[m];
        }
        return r;
    }
};

LaurentQuotient laurent(const Potential& V, const Support& s) {
    const auto& dv = V.derivative_poly().coeffs();
    const int D = static_cast<int>(dv.size()) - 1;
    return LaurentQuotient{dv, inv_sqrt_series(endpoints_of(s), std::max(D, 0) + 2), s.q()};
}

double abs_X_of(const std::vector<double>& e, double x) {
    double r = 1.0;
    for (double ep : e) r *= std::abs(x - ep);
    return r;
}

std::vector<double> residual_vector(const Potential& V, const std::vector<double>& e) {
    const Support s = support_from(e);
    const int q = s.q();
    const LaurentQuotient lq = laurent(V, s);
    std::vector<double> r;
    for (int k = 0; k < q; ++k) r.push_back(lq.coef(-(k + 1)));
    r.push_back(lq.coef(-(q + 1)) - 2.0);
    if (q >= 2) {
        const Polynomial P = compute_P(V, s);
        for (int i = 0; i + 1 < q; ++i) {
            const double lo = s.intervals[i].b, hi = s.intervals[i + 1].a;
            // |X| = (x-lo)(hi-x) * rest; the sqrt weight is carried by the rule
            auto f = [&](double x) {
                double rest = 1.0;
                for (std::size_t m = 0; m < e.size(); ++m)
                    if (e[m] != lo && e[m] != hi) rest *= std::abs(x - e[m]);
                return P(x) * std::sqrt(rest);
            };
            r.push_back(integrate_sqrt(f, lo, hi, 64));
        }
    }
    return r;
}

double norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

void Support::validate() const {
    if (intervals.empty()) throw DomainError("Support: no intervals");
    std::vector<double> e = endpoints_of(*this);
    for (double x : e)
        if (!std::isfinite(x)) throw DomainError("Support: non-finite endpoint");
    if (!ordered(e)) throw DomainError("Support: endpoints must satisfy a_1 < b_1 < a_2 < ...");
}

int Support::locate(double x) const {
    for (int i = 0; i < q(); ++i)
        if (intervals[i].contains(x)) return i;
    return -1;
}

double EquilibriumMeasure::sign(int i) const { return ((q() - 1 - i) % 2 == 0) ? 1.0 : -1.0; }

cd EquilibriumMeasure::sqrtX(cd z) const {
    cd r = 1.0;
    for (const auto& iv : support.intervals) r *= std::sqrt(z - iv.a) * std::sqrt(z - iv.b);
    return r;
}

double EquilibriumMeasure::abs_X(double x) const { return abs_X_of(endpoints_of(support), x); }

double EquilibriumMeasure::abs_R(int i, double x) const {
    double r = 1.0;
    for (int j = 0; j < q(); ++j) {
        if (j == i) continue;
        r *= std::abs(x - support.intervals[j].a) * std::abs(x - support.intervals[j].b);
    }
    return r;
}

double EquilibriumMeasure::effective_P(int i, double x) const {
    return sign(i) * P(x) * std::sqrt(abs_R(i, x));
}

double EquilibriumMeasure::smooth_factor(int i, double x) const {
    const auto& iv = support.intervals[i];
    return 0.5 * effective_P(i, x) * std::abs((x - iv.a) * (iv.b - x));
}

double EquilibriumMeasure::log_potential(double x) const {
    double r = 0.0;
    for (int i = 0; i < q(); ++i) {
        const auto& iv = support.intervals[i];
        const auto& w = F_coeffs[i];
        for (int k = 0; k < static_cast<int>(w.size()); ++k)
            if (w[k] != 0.0) r += w[k] * log_mode_potential(k, iv.center(), iv.half(), x);
    }
    return r;
}

std::vector<double> endpoint_residuals(const Potential& V, const Support& s) {
    s.validate();
    return residual_vector(V, endpoints_of(s));
}

Polynomial compute_P(const Potential& V, const Support& s) {
    const LaurentQuotient lq = laurent(V, s);
    const int deg = V.derivative_poly().degree() - s.q();
    if (deg < 0) throw DomainError("compute_P: potential degree too low for the number of cuts");
    std::vector<double> c(deg + 1);
    for (int p = 0; p <= deg; ++p) c[p] = lq.coef(p);
    return Polynomial(c);
}

Support solve_support(const Potential& V, int q, const Support& init, const SolveOptions& opt) {
    if (q < 1) throw DomainError("solve_support: q must be positive");
    if (init.q() != q) throw DomainError("solve_support: initial guess must have q intervals");
    init.validate();
    if (V.poly().degree() % 2 != 0 || V.poly().leading() <= 0.0)
        throw DomainError("solve_support: potential must have even degree and positive leading coefficient");
    if (V.derivative_poly().degree() < q) throw DomainError("solve_support: potential degree too low for q cuts");

    std::vector<double> e = endpoints_of(init);
    const int n = 2 * q;
    std::vector<double> F = residual_vector(V, e);
    double fn = norm(F);
    for (int it = 0; it < opt.max_iter; ++it) {
        if (fn < opt.tol) return support_from(e);
        Eigen::MatrixXd J(n, n);
        for (int j = 0; j < n; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(e[j]));
            std::vector<double> ep = e, em = e;
            ep[j] += h;
            em[j] -= h;
            std::vector<double> Fp = residual_vector(V, ep), Fm = residual_vector(V, em);
            for (int i = 0; i < n; ++i) J(i, j) = (Fp[i] - Fm[i]) / (2.0 * h);
        }
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -F[i];
        Eigen::VectorXd step = J.fullPivLu().solve(rhs);
        if (!step.allFinite()) throw ConvergenceError("solve_support: singular Jacobian", fn);
        double damp = 1.0;
        bool accepted = false;
        for (int h = 0; h < 40; ++h, damp *= 0.5) {
            std::vector<double> trial = e;
            for (int i = 0; i < n; ++i) trial[i] += damp * step[i];
            if (!ordered(trial)) continue;
            std::vector<double> Ft = residual_vector(V, trial);
            double ftn = norm(Ft);
            if (std::isfinite(ftn) && ftn < fn) {
                e = trial;
                F = Ft;
                fn = ftn;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (fn < 1e3 * opt.tol) return support_from(e);
            throw ConvergenceError("solve_support: Newton iteration stalled", fn);
        }
    }
    if (fn < 1e3 * opt.tol) return support_from(e);
    throw ConvergenceError("solve_support: iteration limit reached", fn);
}

EquilibriumMeasure build_equilibrium(const Potential& V, const Support& s, int modes) {
    s.validate();
    EquilibriumMeasure eq{V, s, compute_P(V, s), {}, 0.0, 0.0, {}, {}, modes, {}};
    const int q = eq.q();
    eq.residuals["endpoint_equations"] = norm(endpoint_residuals(V, s));

    // A closing gap means the iterate approaches a critical potential.
    const double envelope = s.intervals.back().b - s.intervals.front().a;
    for (int i = 0; i + 1 < q; ++i) {
        const double gap = s.intervals[i + 1].a - s.intervals[i].b;
        if (gap < 1e-4 * envelope)
            throw ModelAssumptionError("support gap closes (width " + std::to_string(gap) +
                                       "); potential is critical for this number of cuts");
    }

    // Regularity: P of fixed sign on each interval, bounded away from zero.
    double pmax = 0.0, pmin = INFINITY;
    for (int i = 0; i < q; ++i) {
        const auto& iv = s.intervals[i];
        for (int j = 0; j <= 2000; ++j) {
            double x = iv.a + (iv.b - iv.a) * j / 2000.0;
            double v = eq.sign(i) * eq.P(x);
            pmax = std::max(pmax, std::abs(v));
            pmin = std::min(pmin, v);
        }
    }
    eq.residuals["min_P_ratio"] = pmin / pmax;
    if (!(pmin >= 1e-8 * pmax))
        throw ModelAssumptionError("equilibrium density has an interior zero or negative part (min P / max P = " +
                                   std::to_string(pmin / pmax) + "); potential is critical or q is wrong");

    // Chebyshev data of the smooth factors.
    double tail = 0.0;
    for (int i = 0; i < q; ++i) {
        const auto& iv = s.intervals[i];
        auto c = cheb_lobatto_coeffs([&](double x) { return eq.smooth_factor(i, iv.center() + iv.half() * x); },
                                     modes);
        double mx = 0.0;
        for (double v : c) mx = std::max(mx, std::abs(v));
        tail = std::max(tail, std::abs(c.back()) / mx);
        eq.F_coeffs.push_back(std::move(c));
    }
    eq.residuals["chebyshev_tail"] = tail;

    eq.masses = masses(eq);
    double total = 0.0;
    for (double m : eq.masses) total += m;
    eq.residuals["mass_sum"] = std::abs(total - 1.0);
    if (std::abs(total - 1.0) > 1e-8)
        throw AccuracyError("equilibrium: total mass differs from 1", std::abs(total - 1.0));

    // v on the support: average and spread.
    const int nq = 2 * modes;
    const NodesWeights gc = gauss_chebyshev_first(nq);
    double vsum = 0.0;
    int cnt = 0;
    std::vector<double> vs;
    for (int i = 0; i < q; ++i) {
        const auto& iv = s.intervals[i];
        for (int j = 0; j < nq; ++j) {
            double x = iv.center() + iv.half() * gc.x[j];
            double v = 2.0 * eq.log_potential(x) - V(x);
            vs.push_back(v);
            vsum += v;
            ++cnt;
        }
    }
    eq.v_star = vsum / cnt;
    double spread = 0.0;
    for (double v : vs) spread = std::max(spread, std::abs(v - eq.v_star));
    eq.residuals["v_constant_on_support"] = spread;

    // v strictly below v* off the support.
    const double lo = s.intervals.front().a, hi = s.intervals.back().b, W = 0.5 * (hi - lo);
    double outside = -INFINITY;
    for (int j = 0; j <= 1000; ++j) {
        double x = lo - W + (hi - lo + 2.0 * W) * j / 1000.0;
        if (s.locate(x) >= 0) continue;
        outside = std::max(outside, 2.0 * eq.log_potential(x) - V(x) - eq.v_star);
    }
    eq.residuals["v_max_outside"] = outside;
    if (outside > 1e-9)
        throw ModelAssumptionError("effective potential exceeds its support value outside the support");

    eq.energy = energy(eq);
    const double vint = integrate_density(eq, [&](double x) { return V(x); });
    eq.residuals["energy_consistency"] = std::abs(eq.energy - 0.5 * (eq.v_star - vint));
    return eq;
}

EquilibriumMeasure solve_equilibrium(const Potential& V, int q, const Support& init, const SolveOptions& opt) {
    return build_equilibrium(V, solve_support(V, q, init, opt));
}

double density(const EquilibriumMeasure& eq, double x) {
    const int i = eq.support.locate(x);
    if (i < 0) return 0.0;
    return eq.sign(i) * eq.P(x) * std::sqrt(eq.abs_X(x)) / (2.0 * pi);
}

double integrate_density(const EquilibriumMeasure& eq, const std::function<double(double)>& f, int nodes) {
    const NodesWeights gc = gauss_chebyshev_first(nodes);
    double r = 0.0;
    for (int i = 0; i < eq.q(); ++i) {
        const auto& iv = eq.support.intervals[i];
        double s = 0.0;
        for (int j = 0; j < nodes; ++j) {
            double x = iv.center() + iv.half() * gc.x[j];
            s += f(x) * eq.smooth_factor(i, x);
        }
        r += s / nodes;
    }
    return r;
}

std::vector<double> masses(const EquilibriumMeasure& eq) {
    const int nodes = 2 * eq.modes;
    const NodesWeights gc = gauss_chebyshev_first(nodes);
    std::vector<double> m;
    for (int i = 0; i < eq.q(); ++i) {
        const auto& iv = eq.support.intervals[i];
        double s = 0.0;
        for (int j = 0; j < nodes; ++j) s += eq.smooth_factor(i, iv.center() + iv.half() * gc.x[j]);
        m.push_back(s / nodes);
    }
    return m;
}

double effective_potential(const EquilibriumMeasure& eq, double x) {
    return 2.0 * eq.log_potential(x) - eq.V(x) - eq.v_star;
}

double energy(const EquilibriumMeasure& eq) {
    const double self = integrate_density(eq, [&](double x) { return eq.log_potential(x); }, 2 * eq.modes);
    const double vint = integrate_density(eq, [&](double x) { return eq.V(x); }, 2 * eq.modes);
    return self - vint;
}

cd stieltjes(const EquilibriumMeasure& eq, cd z) {
    const int nodes = 256;
    const NodesWeights gc = gauss_chebyshev_first(nodes);
    cd r = 0.0;
    for (int i = 0; i < eq.q(); ++i) {
        const auto& iv = eq.support.intervals[i];
        cd s = 0.0;
        for (int j = 0; j < nodes; ++j) {
            double x = iv.center() + iv.half() * gc.x[j];
            s += eq.smooth_factor(i, x) / (z - x);
        }
        r += s / static_cast<double>(nodes);
    }
    return r;
}

RescaleResult rescale(const EquilibriumMeasure& eq, double margin) {
    const double lo = eq.support.intervals.front().a, hi = eq.support.intervals.back().b;
    if (lo >= -1.0 + margin && hi <= 1.0 - margin) return {eq, ScaleRecord{}};
    const double s = (1.0 - margin) / (0.5 * (hi - lo));
    const double t = -s * 0.5 * (hi + lo);
    Support ns;
    for (const auto& iv : eq.support.intervals) ns.intervals.push_back({s * iv.a + t, s * iv.b + t});
    EquilibriumMeasure out = build_equilibrium(eq.V.affine_pullback(s, t), ns, eq.modes);
    out.scale = ScaleRecord{s * eq.scale.s, s * eq.scale.t + t};
    return {out, ScaleRecord{s, t}};
}

}  // namespace betafluct
