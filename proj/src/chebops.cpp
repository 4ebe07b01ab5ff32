#include "betafluct/chebops.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>

#include "betafluct/chebyshev.hpp"
#include "betafluct/errors.hpp"
#include "betafluct/quadrature.hpp"

namespace betafluct {

namespace {

constexpr double pi = std::numbers::pi;

double gamma_k(int k) { return k == 0 ? 1.0 : 0.5; }

double clenshaw(const Eigen::VectorXd& c, double x) {
    double b1 = 0.0, b2 = 0.0;
    for (Eigen::Index k = c.size() - 1; k >= 1; --k) {
        double b0 = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b0;
    }
    return (c.size() ? c[0] : 0.0) + x * b1 - b2;
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_compatible(const ChebSeries& a, const ChebSeries& b) {
    if (a.q() != b.q() || a.M() != b.M()) throw DomainError("ChebSeries: incompatible layouts");
}

// Chebyshev coefficients of p' from those of p.
std::vector<double> cheb_derivative(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size());
    std::vector<double> d(n, 0.0);
    for (int k = n - 1; k >= 1; --k) d[k - 1] = (k + 1 < n ? d[k + 1] : 0.0) + 2.0 * k * c[k];
    if (n) d[0] *= 0.5;
    return d;
}

}  // namespace

double ChebSeries::operator()(double x) const {
    for (int i = 0; i < q(); ++i) {
        const auto& iv = intervals[i];
        if (!iv.contains(x)) continue;
        const double u = (x - iv.center()) / iv.half();
        const double v = clenshaw(coeffs[i], u);
        if (kind == Kind::function) return v;
        return v / (pi * iv.half() * std::sqrt(std::max(0.0, 1.0 - u * u)));
    }
    return 0.0;
}

double ChebSeries::smooth_part(int i, double x) const {
    const auto& iv = intervals[i];
    return clenshaw(coeffs[i], (x - iv.center()) / iv.half());
}

Eigen::VectorXd ChebSeries::stacked() const {
    const int n = M() + 1;
    Eigen::VectorXd v(q() * n);
    for (int i = 0; i < q(); ++i) v.segment(i * n, n) = coeffs[i];
    return v;
}

ChebSeries ChebSeries::from_stacked(Kind kind, const std::vector<Interval>& intervals, const Eigen::VectorXd& v) {
    ChebSeries s;
    s.kind = kind;
    s.intervals = intervals;
    const int q = static_cast<int>(intervals.size());
    const int n = static_cast<int>(v.size()) / q;
    for (int i = 0; i < q; ++i) s.coeffs.push_back(v.segment(i * n, n));
    return s;
}

ChebSeries ChebSeries::operator+(const ChebSeries& o) const {
    check_compatible(*this, o);
    if (kind != o.kind) throw DomainError("ChebSeries: adding a function to a density");
    ChebSeries r = *this;
    for (int i = 0; i < q(); ++i) r.coeffs[i] += o.coeffs[i];
    r.tail_warning = tail_warning || o.tail_warning;
    return r;
}

ChebSeries ChebSeries::operator*(double s) const {
    ChebSeries r = *this;
    for (auto& c : r.coeffs) c *= s;
    return r;
}

ChebSeries cheb_transform(const std::function<double(double)>& f, const Support& s, int M) {
    ChebSeries r;
    r.kind = ChebSeries::Kind::function;
    r.intervals = s.intervals;
    for (const auto& iv : s.intervals) {
        auto c = cheb_lobatto_coeffs([&](double x) { return f(iv.center() + iv.half() * x); }, M);
        double mx = 0.0;
        for (double v : c) mx = std::max(mx, std::abs(v));
        if (mx > 0.0 && std::abs(c.back()) > 1e-10 * mx) r.tail_warning = true;
        r.coeffs.push_back(to_eigen(c));
    }
    return r;
}

ChebSeries density_from_smooth(const std::function<double(int, double)>& F, const Support& s, int M) {
    ChebSeries r;
    r.kind = ChebSeries::Kind::density;
    r.intervals = s.intervals;
    for (int i = 0; i < s.q(); ++i) {
        const auto& iv = s.intervals[i];
        auto c = cheb_lobatto_coeffs([&](double x) { return F(i, iv.center() + iv.half() * x); }, M);
        double mx = 0.0;
        for (double v : c) mx = std::max(mx, std::abs(v));
        if (mx > 0.0 && std::abs(c.back()) > 1e-10 * mx) r.tail_warning = true;
        r.coeffs.push_back(to_eigen(c));
    }
    return r;
}

double pair(const ChebSeries& v, const ChebSeries& h) {
    if (v.kind != ChebSeries::Kind::density || h.kind != ChebSeries::Kind::function)
        throw DomainError("pair: expects (density, function)");
    if (v.q() != h.q()) throw DomainError("pair: interval count mismatch");
    double r = 0.0;
    for (int i = 0; i < v.q(); ++i) {
        const int n = static_cast<int>(std::min(v.coeffs[i].size(), h.coeffs[i].size()));
        for (int k = 0; k < n; ++k) r += gamma_k(k) * v.coeffs[i][k] * h.coeffs[i][k];
    }
    return r;
}

OperatorMatrix build_Lhat(const Support& s, int M) {
    const int q = s.q(), n = M + 1;
    OperatorMatrix op{OperatorMatrix::Role::Lhat, q, M, Eigen::MatrixXd::Zero(q * n, q * n)};
    for (int i = 0; i < q; ++i) {
        op.m(i * n, i * n) = std::log(0.5 * s.intervals[i].half());
        for (int k = 1; k <= M; ++k) op.m(i * n + k, i * n + k) = -1.0 / k;
    }
    return op;
}

OperatorMatrix build_Ltilde(const Support& s, int M) {
    const int q = s.q(), n = M + 1;
    OperatorMatrix op{OperatorMatrix::Role::Ltilde, q, M, Eigen::MatrixXd::Zero(q * n, q * n)};
    const int ns = std::max(2 * M, 64);
    for (int i = 0; i < q; ++i) {
        const auto& ti = s.intervals[i];
        for (int j = 0; j < q; ++j) {
            if (i == j) continue;
            const auto& sj = s.intervals[j];
            for (int kp = 0; kp <= M; ++kp) {
                auto c = cheb_lobatto_coeffs(
                    [&](double x) { return log_mode_potential(kp, sj.center(), sj.half(), ti.center() + ti.half() * x); },
                    ns);
                for (int k = 0; k <= M; ++k) op.m(i * n + k, j * n + kp) = c[k];
            }
        }
    }
    return op;
}

OperatorMatrix build_Dbar(const Support& s, int M) {
    const int q = s.q(), n = M + 1;
    OperatorMatrix op{OperatorMatrix::Role::Dbar, q, M, Eigen::MatrixXd::Zero(q * n, q * n)};
    for (int i = 0; i < q; ++i)
        for (int k = 1; k <= M; ++k) op.m(i * n + k, i * n + k) = k;
    return op;
}

ChebSeries apply_L(const ChebSeries& f, bool same_interval) {
    if (f.kind != ChebSeries::Kind::density) throw DomainError("apply_L: expects a density");
    Support s{f.intervals};
    const int M = f.M();
    Eigen::VectorXd v = build_Lhat(s, M).m * f.stacked();
    if (!same_interval && f.q() > 1) v += build_Ltilde(s, M).m * f.stacked();
    return ChebSeries::from_stacked(ChebSeries::Kind::function, f.intervals, v);
}

ChebSeries apply_D(const ChebSeries& h, int interval) {
    if (h.kind != ChebSeries::Kind::function) throw DomainError("apply_D: expects a function");
    if (interval < 0 || interval >= h.q()) throw DomainError("apply_D: interval index out of range");
    ChebSeries r = h;
    r.kind = ChebSeries::Kind::density;
    for (int i = 0; i < h.q(); ++i) {
        if (i != interval) {
            r.coeffs[i].setZero();
            continue;
        }
        for (Eigen::Index k = 0; k < r.coeffs[i].size(); ++k) r.coeffs[i][k] = k * h.coeffs[i][k];
    }
    return r;
}

ChebSeries apply_D(const ChebSeries& h) {
    if (h.kind != ChebSeries::Kind::function) throw DomainError("apply_D: expects a function");
    ChebSeries r = h;
    r.kind = ChebSeries::Kind::density;
    for (auto& c : r.coeffs)
        for (Eigen::Index k = 0; k < c.size(); ++k) c[k] *= static_cast<double>(k);
    return r;
}

double quad_form_barD(const ChebSeries& h) { return pair(apply_D(h), h); }

ChebSeries nu_functional(const EquilibriumMeasure& eq, int M) {
    ChebSeries nu;
    nu.kind = ChebSeries::Kind::density;
    nu.intervals = eq.support.intervals;
    for (int i = 0; i < eq.q(); ++i) {
        const auto& iv = eq.support.intervals[i];
        auto logP = cheb_lobatto_coeffs(
            [&](double x) {
                double p = eq.effective_P(i, iv.center() + iv.half() * x);
                if (!(p > 0.0)) throw AccuracyError("nu_functional: P vanishes on the support", p);
                return std::log(p);
            },
            M);
        Eigen::VectorXd w(M + 1);
        for (int k = 0; k <= M; ++k) {
            double endpoint = (k % 2 == 0) ? 0.5 / gamma_k(k) : 0.0;
            w[k] = endpoint - 0.5 * k * logP[k];
        }
        w[0] -= 0.5;
        nu.coeffs.push_back(w);
    }
    return nu;
}

ChebSeries log_density_series(const EquilibriumMeasure& eq, int M) {
    ChebSeries r;
    r.kind = ChebSeries::Kind::function;
    r.intervals = eq.support.intervals;
    for (int i = 0; i < eq.q(); ++i) {
        const auto& iv = eq.support.intervals[i];
        const double d = iv.half();
        auto c = cheb_lobatto_coeffs(
            [&](double x) { return std::log(d * eq.effective_P(i, iv.center() + d * x) / (2.0 * pi)); }, M);
        // (1/2) log(1 - x^2) = -log 2 - sum_{m>=1} T_{2m}/m
        c[0] -= std::log(2.0);
        for (int m = 1; 2 * m <= M; ++m) c[2 * m] -= 1.0 / m;
        r.coeffs.push_back(to_eigen(c));
    }
    return r;
}

ChebSeries density_series(const EquilibriumMeasure& eq, int M) {
    return density_from_smooth([&](int i, double x) { return eq.smooth_factor(i, x); }, eq.support, M);
}

std::vector<ChebSeries> solve_psi(const EquilibriumMeasure& eq, int M, double* residual) {
    const int q = eq.q();
    if (q < 2) throw DomainError("solve_psi: requires at least two cuts");
    // basis psi_j = sign_i x^j / sqrt|X_sigma| on interval i, smooth factor pi sign_i x^j / sqrt|R_i|
    std::vector<ChebSeries> basis, Lbasis;
    Eigen::MatrixXd C(q, q);
    for (int j = 0; j < q; ++j) {
        ChebSeries b = density_from_smooth(
            [&](int i, double x) { return pi * eq.sign(i) * std::pow(x, j) / std::sqrt(eq.abs_R(i, x)); },
            eq.support, M);
        ChebSeries Lb = apply_L(b, false);
        for (int i = 0; i < q; ++i) C(j, i) = Lb.coeffs[i][0];
        basis.push_back(b);
        Lbasis.push_back(Lb);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(C);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-14 * std::pow(C.norm(), q))
        throw DegeneracyError("solve_psi: singular defining system");
    const Eigen::MatrixXd A = -lu.inverse();  // psi^(alpha) = sum_j A(alpha, j) psi_j
    std::vector<ChebSeries> psi;
    double res = 0.0;
    for (int a = 0; a < q; ++a) {
        ChebSeries p = basis[0] * A(a, 0);
        ChebSeries Lp = Lbasis[0] * A(a, 0);
        for (int j = 1; j < q; ++j) {
            p = p + basis[j] * A(a, j);
            Lp = Lp + Lbasis[j] * A(a, j);
        }
        for (int i = 0; i < q; ++i) {
            const auto& iv = eq.support.intervals[i];
            const double target = (i == a) ? -1.0 : 0.0;
            for (int t = 0; t <= 64; ++t) {
                double x = iv.center() + iv.half() * std::cos(pi * (t + 0.5) / 65.0);
                res = std::max(res, std::abs(Lp(x) - target));
            }
        }
        psi.push_back(p);
    }
    if (residual) *residual = res;
    return psi;
}

Eigen::MatrixXd build_Q(const std::vector<ChebSeries>& psi, double* asymmetry) {
    const int q = static_cast<int>(psi.size());
    Eigen::MatrixXd Q(q, q);
    for (int a = 0; a < q; ++a) {
        ChebSeries Lp = apply_L(psi[a], false);
        for (int b = 0; b < q; ++b) Q(a, b) = -pair(psi[b], Lp);
    }
    if (asymmetry) *asymmetry = (Q - Q.transpose()).cwiseAbs().maxCoeff();
    Q = 0.5 * (Q + Q.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw DegeneracyError("build_Q: matrix is not positive definite");
    return Q;
}

OperatorMatrix resolvent_G(const OperatorMatrix& Dbar, const OperatorMatrix& Ltilde) {
    const Eigen::Index n = Dbar.m.rows();
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) - Dbar.m * Ltilde.m;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible() || lu.rcond() < 1e-13)
        throw AccuracyError("resolvent_G: truncated operator is ill-conditioned", lu.rcond());
    return OperatorMatrix{OperatorMatrix::Role::G, Dbar.q, Dbar.M, lu.inverse()};
}

ChebSeries MultiCutModel::function_series(const TestFunction& h) const {
    const TestFunction hp = scale.identity() ? h : h.affine_pullback(scale.s, scale.t);
    return cheb_transform([&](double x) { return hp(x); }, eq.support, M);
}

Eigen::VectorXd I_functional(const MultiCutModel& model, const ChebSeries& h) {
    const int q = model.q();
    if (q < 2) return Eigen::VectorXd::Zero(q);
    Eigen::VectorXd proj(q);
    for (int a = 0; a < q; ++a) proj[a] = pair(model.psi[a], h);
    return model.Qinv * proj;
}

Eigen::VectorXd I_functional(const MultiCutModel& model, const TestFunction& h) {
    return I_functional(model, model.function_series(h));
}

double det_one_minus_DLtilde(const MultiCutModel& model) {
    const Eigen::Index n = model.Dbar.m.rows();
    return (Eigen::MatrixXd::Identity(n, n) - model.Dbar.m * model.Ltilde.m).determinant();
}

namespace {

struct Pieces {
    OperatorMatrix Lhat, Ltilde, Dbar, G;
};

Pieces build_pieces(const Support& s, int M) {
    Pieces p{build_Lhat(s, M), build_Ltilde(s, M), build_Dbar(s, M), {}};
    if (s.q() == 1) {
        const Eigen::Index n = M + 1;
        p.G = OperatorMatrix{OperatorMatrix::Role::G, 1, M, Eigen::MatrixXd::Identity(n, n)};
    } else {
        p.G = resolvent_G(p.Dbar, p.Ltilde);
    }
    return p;
}

double block_drift(const Eigen::MatrixXd& small, int Ms, const Eigen::MatrixXd& big, int Mb, int q) {
    double d = 0.0;
    const int ns = Ms + 1, nb = Mb + 1;
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            for (int k = 0; k < ns; ++k)
                for (int l = 0; l < ns; ++l)
                    d = std::max(d, std::abs(small(i * ns + k, j * ns + l) - big(i * nb + k, j * nb + l)));
    return d;
}

}  // namespace

MultiCutModel build_model(const EquilibriumMeasure& eq, const ModelOptions& opt) {
    RescaleResult rs = rescale(eq, opt.margin);
    MultiCutModel m;
    m.original = eq;
    m.eq = rs.eq;
    m.scale = rs.record;
    const Support& s = m.eq.support;

    int M = opt.M;
    Pieces prev = build_pieces(s, M / 2);
    Pieces cur = build_pieces(s, M);
    double drift = block_drift(prev.G.m, M / 2, cur.G.m, M, s.q());
    while (drift > opt.drift_tol) {
        if (2 * M > opt.max_M) throw AccuracyError("build_model: resolvent does not settle under truncation doubling", drift);
        M *= 2;
        prev = std::move(cur);
        cur = build_pieces(s, M);
        drift = block_drift(prev.G.m, M / 2, cur.G.m, M, s.q());
    }
    m.M = M;
    m.G_drift = drift;
    m.Lhat = std::move(cur.Lhat);
    m.Ltilde = std::move(cur.Ltilde);
    m.Dbar = std::move(cur.Dbar);
    m.G = std::move(cur.G);

    m.nu = nu_functional(m.eq, M);
    m.log_rho = log_density_series(m.eq, M);
    m.log_rho_bar = m.log_rho;
    for (int i = 0; i < s.q(); ++i) m.log_rho_bar.coeffs[i][0] -= std::log(m.eq.masses[i]);

    if (s.q() >= 2) {
        m.psi = solve_psi(m.eq, M, &m.psi_residual);
        m.Q = build_Q(m.psi, &m.Q_asymmetry);
        m.Qinv = m.Q.inverse();
    } else {
        m.Q = Eigen::MatrixXd::Zero(1, 1);
        m.Qinv = Eigen::MatrixXd::Zero(1, 1);
    }
    return m;
}

IdentityResidual dl_identity_check(double a, double b, int kmax) {
    if (!(a < b)) throw DomainError("dl_identity_check: empty interval");
    const double c = 0.5 * (a + b), d = 0.5 * (b - a);
    boost::math::quadrature::tanh_sinh<double> ts;
    // (1/pi) int_0^pi log|lambda - c - d cos t| cos(k t) dt, split at the singular angle
    auto log_mode = [&](int k, double x) {
        const double th0 = std::acos(std::clamp(x, -1.0, 1.0));
        auto f = [&](double t) {
            double s1 = std::abs(std::sin(0.5 * (t + th0))), s2 = std::abs(std::sin(0.5 * (th0 - t)));
            if (s1 == 0.0 || s2 == 0.0) return 0.0;
            return (std::log(2.0 * d) + std::log(s1) + std::log(s2)) * std::cos(k * t);
        };
        double r = 0.0;
        if (th0 > 0.0) r += ts.integrate(f, 0.0, th0);
        if (th0 < pi) r += ts.integrate(f, th0, pi);
        return r / pi;
    };

    const int N = 64;
    const int ntest = 41;
    IdentityResidual out;
    for (int k = 0; k <= kmax; ++k) {
        // D L v with L by quadrature at Lobatto points and D by PV quadrature
        std::vector<double> samples(N + 1);
        for (int j = 0; j <= N; ++j) samples[j] = log_mode(k, std::cos(pi * j / N));
        const std::vector<double> g = cheb_lobatto_from_samples(samples);
        const std::vector<double> dg = cheb_derivative(g);
        for (int t = 1; t <= ntest; ++t) {
            const double x = std::cos(pi * (t - 0.5) / ntest);
            const double lam = c + d * x;
            auto f = [&](double mu) {
                // g'(mu) sqrt|X(mu)|: the 1/d of the chain rule cancels the d of sqrt|X|
                double y = (mu - c) / d;
                return chebyshev_eval(dg, y) * std::sqrt(std::max(0.0, 1.0 - y * y));
            };
            const double pv = pv_integral(f, a, b, lam, PvRule{96});
            const double lhs = pv / pi;  // pi sqrt|X| (D g)(lambda)
            const double rhs = -std::cos(k * std::acos(x)) + (k == 0 ? 1.0 : 0.0);
            out.DL = std::max(out.DL, std::abs(lhs - rhs));
        }
        // L D v with D spectral (mode k -> k) and L by quadrature
        for (int t = 1; t <= ntest; ++t) {
            const double x = std::cos(pi * (t - 0.5) / ntest);
            const double lhs = k * log_mode(k, x);
            const double rhs = -std::cos(k * std::acos(x)) + (k == 0 ? 1.0 : 0.0);
            out.LD = std::max(out.LD, std::abs(lhs - rhs));
        }
    }
    return out;
}

}  // namespace betafluct
