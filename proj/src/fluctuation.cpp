#include "betafluct/fluctuation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "betafluct/errors.hpp"

namespace betafluct {

namespace {

constexpr double kQuantum = 1.0 / 68719476736.0;  // 2^-36

// Exponents of all lattice terms in a fixed enumeration order.
std::vector<double> lattice_exponents(const ThetaParams& p, int R, const Eigen::MatrixXd& Qinv,
                                      std::vector<Eigen::VectorXd>* deltas) {
    const int q = static_cast<int>(p.e.size());
    std::vector<double> out;
    Eigen::VectorXi k(q);
    const Eigen::VectorXd x = p.x.size() ? p.x : Eigen::VectorXd::Zero(q);
    const Eigen::VectorXd t = p.t.size() ? p.t : Eigen::VectorXd::Zero(q);
    std::function<void(int, long)> rec = [&](int idx, long partial) {
        if (idx == q - 1) {
            long last = p.s - partial;
            if (std::abs(last) > R) return;
            k[idx] = static_cast<int>(last);
            Eigen::VectorXd D = k.cast<double>() - p.e;
            double ex = -0.5 * p.beta * D.dot(Qinv * D) + 0.5 * p.beta * D.dot(x) + (0.5 * p.beta - 1.0) * D.dot(t);
            out.push_back(ex);
            if (deltas) deltas->push_back(D);
            return;
        }
        for (int v = -R; v <= R; ++v) {
            k[idx] = v;
            rec(idx + 1, partial + v);
        }
    };
    rec(0, 0);
    return out;
}

double log_sum_exp(const std::vector<double>& v) {
    if (v.empty()) return -INFINITY;
    const double mx = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - mx);
    return mx + std::log(s);
}

}  // namespace

ThetaParams theta_offsets(const Eigen::VectorXd& masses, long n) {
    ThetaParams p;
    const int q = static_cast<int>(masses.size());
    p.e.resize(q);
    long floor_sum = 0;
    for (int a = 0; a < q; ++a) {
        const double nm = static_cast<double>(n) * masses[a];
        const double r = std::round(nm);
        const bool snap = std::abs(nm - r) < 1e-8;
        double fl = snap ? r : std::floor(nm);
        double e = snap ? 0.0 : std::round((nm - fl) / kQuantum) * kQuantum;
        if (e >= 1.0) {
            e = 0.0;
            fl += 1.0;
        }
        p.e[a] = e;
        floor_sum += static_cast<long>(fl);
    }
    p.s = n - floor_sum;
    p.x = Eigen::VectorXd::Zero(q);
    p.t = Eigen::VectorXd::Zero(q);
    return p;
}

double log_theta_fixed(const ThetaParams& p, int radius) {
    if (p.e.size() <= 1) return 0.0;
    const Eigen::MatrixXd Qinv = p.Q.inverse();
    return log_sum_exp(lattice_exponents(p, radius, Qinv, nullptr));
}

ThetaValue theta_eval(const ThetaParams& p) {
    if (p.radius < 1) throw DomainError("theta_eval: cutoff must be at least 1");
    if (p.e.size() <= 1) return {0.0, 0.0, p.radius, 0.0};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.Q);
    if (es.eigenvalues().minCoeff() <= 0.0) throw DegeneracyError("theta_eval: Q not positive definite");
    int R = p.radius;
    double cur = log_theta_fixed(p, R);
    for (; R <= 256; R += 4) {
        double next = log_theta_fixed(p, R + 4);
        double drift = std::abs(next - cur);
        if (drift <= 1e-10) return {cur, 0.0, R, drift};
        cur = next;
    }
    throw AccuracyError("theta_eval: lattice sum does not settle", std::abs(cur));
}

ThetaMoments theta_moments(const ThetaParams& p, const Eigen::VectorXd& v) {
    if (p.e.size() <= 1) return {};
    const ThetaValue tv = theta_eval(p);
    const Eigen::MatrixXd Qinv = p.Q.inverse();
    std::vector<Eigen::VectorXd> deltas;
    std::vector<double> ex = lattice_exponents(p, tv.radius, Qinv, &deltas);
    const double mx = *std::max_element(ex.begin(), ex.end());
    double z = 0.0, m1 = 0.0;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        double w = std::exp(ex[i] - mx);
        z += w;
        m1 += w * deltas[i].dot(v);
    }
    const double mean = m1 / z;
    double var = 0.0;
    for (std::size_t i = 0; i < ex.size(); ++i) {
        double w = std::exp(ex[i] - mx);
        double u = deltas[i].dot(v) - mean;
        var += w * u * u;
    }
    return {mean, var / z};
}

double CLTPrediction::log_Z(double t) const {
    double r = 0.125 * beta * t * t * quad + t * (1.0 - 0.5 * beta) * lin;
    if (theta.e.size() > 1) {
        ThetaParams p = theta;
        p.x = t * I;
        r += theta_eval(p).log_value;
        p.x.setZero();
        r -= theta_eval(p).log_value;
    }
    return r;
}

CLTPrediction onecut_predict(const EquilibriumMeasure& eq, const TestFunction& h, double beta, int M) {
    if (eq.q() != 1) throw DomainError("onecut_predict: requires a one-cut equilibrium measure");
    if (!(beta > 0.0)) throw DomainError("onecut_predict: beta must be positive");
    const ChebSeries hs = cheb_transform([&](double x) { return h(x); }, eq.support, M);
    const ChebSeries nu = nu_functional(eq, M);
    CLTPrediction p;
    p.beta = beta;
    p.quad = quad_form_barD(hs);
    p.lin = pair(nu, hs);
    p.mean_shift = (2.0 / beta - 1.0) * p.lin;
    p.var_smooth = p.quad / beta;
    p.equilibrium_mean = pair(density_series(eq, M), hs);
    p.I = Eigen::VectorXd::Zero(1);
    p.theta = theta_offsets(Eigen::VectorXd::Ones(1), 0);
    p.theta.beta = beta;
    return p;
}

CLTPrediction multicut_mean_var(const MultiCutModel& model, const TestFunction& h, long n, double beta) {
    if (!(beta > 0.0)) throw DomainError("multicut_mean_var: beta must be positive");
    const ChebSeries hs = model.function_series(h);
    CLTPrediction p;
    p.n = n;
    p.beta = beta;
    const ChebSeries Dh = apply_D(hs);
    const ChebSeries GDh = ChebSeries::from_stacked(ChebSeries::Kind::density, hs.intervals, model.G.m * Dh.stacked());
    const ChebSeries Gnu =
        ChebSeries::from_stacked(ChebSeries::Kind::density, hs.intervals, model.G.m * model.nu.stacked());
    p.quad = pair(GDh, hs);
    p.lin = pair(Gnu, hs);
    p.mean_shift = (2.0 / beta - 1.0) * p.lin;
    p.var_smooth = p.quad / beta;
    p.equilibrium_mean = pair(density_series(model.eq, model.M), hs);

    const int q = model.q();
    Eigen::VectorXd mu(q);
    for (int a = 0; a < q; ++a) mu[a] = model.eq.masses[a];
    p.theta = theta_offsets(mu, n);
    p.theta.beta = beta;
    if (q >= 2) {
        p.theta.Q = model.Q;
        p.I = I_functional(model, hs);
        p.theta.t = I_functional(model, model.log_rho_bar);
        const ThetaMoments tm = theta_moments(p.theta, p.I);
        p.mean_theta = tm.mean;
        p.var_theta = tm.variance;
        const double scale = std::max(1.0, p.I.cwiseAbs().maxCoeff());
        p.gaussian = (p.I.maxCoeff() - p.I.minCoeff()) <= 1e-9 * scale;
    } else {
        p.I = Eigen::VectorXd::Zero(1);
    }
    return p;
}

double multicut_logZ(const MultiCutModel& model, const TestFunction& h, long n, double beta) {
    return multicut_mean_var(model, h, n, beta).log_Z(1.0);
}

TestFunction project_out_psi(const MultiCutModel& model, const TestFunction& h, const std::vector<TestFunction>& g) {
    const int q = model.q();
    if (q < 2) return h;
    if (static_cast<int>(g.size()) != q) throw DomainError("project_out_psi: need one correction function per cut");
    Eigen::MatrixXd A(q, q);
    Eigen::VectorXd b(q);
    const ChebSeries hs = model.function_series(h);
    for (int a = 0; a < q; ++a) {
        b[a] = pair(model.psi[a], hs);
        for (int j = 0; j < q; ++j) A(a, j) = pair(model.psi[a], model.function_series(g[j]));
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) throw DegeneracyError("project_out_psi: correction functions do not span the psi pairings");
    const Eigen::VectorXd c = lu.solve(b);
    TestFunction r = h;
    for (int j = 0; j < q; ++j) r = r + g[j] * (-c[j]);
    return r;
}

}  // namespace betafluct
