#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include "betafluct/errors.hpp"
#include "betafluct/io.hpp"

using namespace betafluct;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::function<Outcome()>& run) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = run();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failures;
    std::printf("criterion %2d: %s  %s  [%.1f s]\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
    std::fflush(stdout);
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[1024];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

const EquilibriumMeasure& gaussian() {
    static const EquilibriumMeasure eq = solve_equilibrium(Potential::polynomial({0, 0, 0.5}), 1, Support{{{-1.5, 1.5}}});
    return eq;
}

const EquilibriumMeasure& two_cut() {
    static const EquilibriumMeasure eq =
        solve_equilibrium(Potential::polynomial({0, 0, -2, 0, 0.25}), 2, Support{{{-2.6, -1.2}, {1.1, 2.4}}});
    return eq;
}

const MultiCutModel& two_cut_model() {
    static const MultiCutModel m = build_model(two_cut());
    return m;
}

Outcome operator_identity() {
    const double r6 = std::sqrt(6.0), r2 = std::sqrt(2.0);
    double worst = 0.0;
    for (auto [a, b] : {std::pair{-2.0, 2.0}, std::pair{-r6, -r2}, std::pair{r2, r6}})
        worst = std::max(worst, dl_identity_check(a, b, 20).DL);
    return {worst < 1e-8, fmt("sup |D L v + v - (v,1)X^-1/2/pi| = %.2e over k <= 20 on [-2,2] and +-[sqrt2,sqrt6]", worst)};
}

EmpiricalStats& clt_run() {
    static EmpiricalStats s = empirical_stats(gbe_sample(200, 2.0, 10000, 20240601), TestFunction::polynomial({0, 1}), 2.0);
    return s;
}

Outcome one_cut_clt() {
    const double pred = onecut_predict(gaussian(), TestFunction::polynomial({0, 1}), 2.0).variance();
    const auto& s = clt_run();
    const double z = (s.variance - pred) / s.se_variance;
    return {std::abs(z) < 3 && std::abs(pred - 1.0) < 1e-12,
            fmt("predicted Var %.12f, sampled %.4f +- %.4f (z = %.2f, n = 200, %ld draws)", pred, s.variance, s.se_variance, z,
                s.samples)};
}

Outcome mean_shift() {
    bool ok = true;
    std::string d;
    const auto h = TestFunction::polynomial({0, 0, 1});
    for (double beta : {1.0, 4.0}) {
        const auto p = onecut_predict(gaussian(), h, beta);
        const auto s = empirical_stats(gbe_sample(200, beta, 10000, beta == 1.0 ? 77 : 78), h, beta);
        const double shift = s.mean - 200.0 * p.equilibrium_mean;
        const double tol = 3 * s.se_mean + 5.0 / 200;
        const bool pass = std::abs(shift - p.mean()) < tol;
        ok = ok && pass;
        d += fmt("beta=%g: predicted %+.6f, sampled %+.4f +- %.4f (tol %.4f)%s; ", beta, p.mean(), shift, s.se_mean, tol,
                 pass ? "" : " MISS");
    }
    return {ok, d};
}

Outcome characteristic_functional() {
    const auto& s = clt_run();
    const auto f = quadratic_fit(s.t, s.Z);
    double tmax = 0.0;
    for (double t : s.t) tmax = std::max(tmax, std::abs(t));
    // characteristic functional: log Z(t) = (beta t/2)^2 Var/2 = t^2/2 at beta = 2
    return {f.max_residual < 0.02 && tmax <= 1.0 + 1e-12,
            fmt("log Z(t) = c t^2 on |t| <= %.1f: c = %.4f (predicted 0.5), max residual %.2e", tmax, f.coefficient,
                f.max_residual)};
}

Outcome equilibrium_residuals() {
    const auto& g = gaussian();
    const auto& e = two_cut();
    const double r6 = std::sqrt(6.0), r2 = std::sqrt(2.0);
    const double eg = std::max(std::abs(g.support.intervals[0].a + 2), std::abs(g.support.intervals[0].b - 2));
    const double et = std::max({std::abs(e.support.intervals[0].a + r6), std::abs(e.support.intervals[0].b + r2),
                                std::abs(e.support.intervals[1].a - r2), std::abs(e.support.intervals[1].b - r6)});
    double on = 0.0, off = -INFINITY;
    for (const auto* eq : {&g, &e}) {
        for (const auto& iv : eq->support.intervals)
            for (int i = 0; i <= 50; ++i) on = std::max(on, std::abs(effective_potential(*eq, iv.a + (iv.b - iv.a) * i / 50.0)));
        const double lo = eq->support.intervals.front().a, hi = eq->support.intervals.back().b;
        for (int i = 0; i <= 400; ++i) {
            const double x = lo - 1.0 + (hi - lo + 2.0) * i / 400.0;
            if (eq->support.locate(x) < 0 && std::abs(x - lo) > 1e-3 && std::abs(x - hi) > 1e-3) {
                bool near = false;
                for (const auto& iv : eq->support.intervals) near = near || std::abs(x - iv.a) < 1e-3 || std::abs(x - iv.b) < 1e-3;
                if (!near) off = std::max(off, effective_potential(*eq, x));
            }
        }
    }
    return {eg < 1e-8 && et < 1e-8 && on < 1e-8 && off < 0.0,
            fmt("Gaussian endpoint error %.1e, two-cut endpoint error %.1e, max |v - v*| on support %.1e, max v - v* off "
                "support %.2e",
                eg, et, on, off)};
}

Outcome multicut_structure() {
    const auto& m = two_cut_model();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.Q);
    const double asym = (m.Q - m.Q.transpose()).cwiseAbs().maxCoeff();
    Eigen::VectorXd mu(2);
    mu << m.eq.masses[0], m.eq.masses[1];
    double drift = 0.0;
    for (long n : {100L, 101L, 137L}) {
        ThetaParams p = theta_offsets(mu, n);
        p.Q = m.Q;
        p.beta = 2.0;
        p.t = I_functional(m, m.log_rho_bar);
        drift = std::max(drift, std::abs(log_theta_fixed(p, 8) - log_theta_fixed(p, 12)));
    }
    const auto h = TestFunction::polynomial({0, 1, 0.3});
    const auto a = multicut_mean_var(m, h, 100, 2.0), b = multicut_mean_var(m, h, 140, 2.0);
    const bool same = a.theta.e == b.theta.e && a.var_theta == b.var_theta && a.mean_theta == b.mean_theta;
    return {asym < 1e-12 && es.eigenvalues().minCoeff() > 0 && m.psi_residual < 1e-8 && drift < 1e-12 && same,
            fmt("Q asymmetry %.1e, min eigenvalue %.4f, L psi residual %.1e, theta R=8 vs 12 drift %.1e, n=100 vs 140 "
                "identical: %s",
                asym, es.eigenvalues().minCoeff(), m.psi_residual, drift, same ? "yes" : "no")};
}

Outcome dichotomy() {
    const auto& m = two_cut_model();
    double lo = INFINITY, hi = -INFINITY;
    for (long n = 100; n <= 140; ++n) {
        const double v = multicut_mean_var(m, TestFunction::polynomial({0, 1}), n, 2.0).var_theta;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const auto g = project_out_psi(m, TestFunction::polynomial({0, 1}),
                                   {TestFunction::polynomial({0, 0, 0, 1}), TestFunction::polynomial({0, 0, 1})});
    double worst = 0.0, Imax = 0.0;
    for (long n = 100; n <= 140; ++n) {
        const auto p = multicut_mean_var(m, g, n, 2.0);
        worst = std::max(worst, std::abs(p.var_theta));
        Imax = std::max(Imax, p.I.cwiseAbs().maxCoeff());
    }
    return {lo > 0 && hi - lo > 1e-6 && worst < 1e-9 && Imax < 1e-9,
            fmt("h = lambda: var_theta in [%.4f, %.4f] over n = 100..140; projected h: |I| <= %.1e, var_theta <= %.1e", lo,
                hi, Imax, worst)};
}

Outcome gaussian_partition() {
    bool ok = true;
    std::string d;
    double uncorrected_drift = 0.0;
    for (double beta : {1.0, 2.0, 4.0}) {
        auto resid = [&](long n) {
            const double nd = static_cast<double>(n);
            return log_gaussian_partition(n, beta) - (0.5 * beta * nd * nd * -0.75 + F_beta(n, beta).value);
        };
        auto resid_uncorrected = [&](long n) {
            const double nd = static_cast<double>(n);
            const double ent = 0.5 - std::log(2 * std::acos(-1.0));
            return log_gaussian_partition(n, beta) -
                   (0.5 * beta * nd * nd * -0.75 + F_beta_uncorrected(n, beta) + entropy_term_uncorrected(n, beta, ent));
        };
        double worst = 0.0;
        for (long n = 8; n <= 128; n *= 2) {
            const double gap = std::abs(resid(2 * n) - resid(n));
            worst = std::max(worst, gap * n / 3.0);
            uncorrected_drift = std::max(uncorrected_drift, std::abs(resid_uncorrected(2 * n) - resid_uncorrected(n)));
        }
        ok = ok && worst < 1.0;
        d += fmt("beta=%g: max n|r_2n - r_n|/3 = %.2e; ", beta, worst);
    }
    d += fmt("(uncorrected, the residual drifts by up to %.1f between n and 2n)", uncorrected_drift);
    return {ok, d};
}

Outcome beta_two_closed_form() {
    const auto q4 = solve_equilibrium(Potential::polynomial({0, 0, 0.5, 0, 0.25}), 1, Support{{{-1.3, 1.3}}});
    RBetaOptions lit;
    lit.norm = KernelNormalization::literal;
    RBetaOptions fine = lit;
    fine.min_nodes = 512;
    fine.max_nodes = 4096;
    fine.t_points = 65;
    const auto a = r_beta(q4, 2.0, lit), b = r_beta(q4, 2.0, fine);
    const double closed = r_two_closed_form(q4, KernelNormalization::literal);
    const double refine = std::abs(a.value - b.value);
    const double err = std::abs(b.value - closed);
    const auto cov = r_beta(q4, 2.0);
    const double cov_closed = r_two_closed_form(q4, KernelNormalization::covariant);
    std::string d = fmt("one-cut quartic: contour value %.10f (refined %.10f), closed form %.10f, |diff| %.1e", a.value,
                        b.value, closed, err);
    d += fmt("; discrepancy report: with the loop-equation normalization r_2 = %.10f vs -(1/24)log(P(a)P(b)/P0^2) = "
             "%.10f, and the Gaussian-fitted expansion requires that normalization",
             cov.value, cov_closed);
    return {err < 1e-4 && refine < 1e-6, d};
}

Outcome lemma_certificates() {
    const auto c = lemma_certificate(KernelA{0.5}, Interval{-1.0, -0.05}, Interval{0.05, 1.0}, 0.02);
    char a[32], b[32];
    std::snprintf(a, sizeof a, "%.2e", c.gap.delta1);
    std::snprintf(b, sizeof b, "%.2e", c.gap.delta1_refined);
    const bool stable = std::string(a) == b;
    const bool ok = c.gap.min_fourier > 0 && c.gap.delta1 > 0 && stable && c.decay.slope < 0 && c.decay.r2 > 0.99 &&
                    c.single_integral_rel < 1e-8 && c.cross_reduction_rel < 1e-8;
    return {ok, fmt("min a-hat %.2e, delta1 %s (refined grid %s), decay slope %.4f R^2 %.4f, closed vs quadrature %.1e "
                    "(single) %.1e (cross)",
                    c.gap.min_fourier, a, b, c.decay.slope, c.decay.r2, c.single_integral_rel, c.cross_reduction_rel)};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism(const fs::path& work) {
    fs::create_directories(work);
    const std::string cli = BETAFLUCT_CLI;
    std::ofstream(work / "gauss.json") << R"({"potential":{"type":"polynomial","coeffs":[0,0,0.5]},"n":30,"sampler":{"draws":300,"chains":2}})";
    std::ofstream(work / "twocut.json")
        << R"({"potential":{"type":"polynomial","coeffs":[0,0,-2,0,0.25]},"support":[[-2.6,-1.2],[1.1,2.4]],"n":"100..104","sampler":{"method":"metropolis","draws":200,"chains":2}})";
    struct Run {
        const char* cmd;
        const char* config;
        const char* file;
        const char* extra;
    };
    const Run runs[] = {{"equilibrium", "twocut", "equilibrium.json", ""}, {"predict", "twocut", "predict.json", ""},
                        {"theta", "twocut", "theta.json", ""},             {"partition", "twocut", "partition.json", ""},
                        {"lemmas", "gauss", "lemmas.json", ""},            {"sample", "gauss", "samples.csv", "--seed 9"},
                        {"sample", "twocut", "stats.json", "--seed 9 --n 20"}};
    int same = 0, total = 0;
    std::string bad;
    for (const Run& r : runs) {
        std::string out[2];
        for (int k = 0; k < 2; ++k) {
            const fs::path dir = work / (std::string(r.cmd) + "_" + r.config + "_" + std::to_string(k));
            const std::string cmd = cli + " " + r.cmd + " --config " + (work / (std::string(r.config) + ".json")).string() +
                                    " --out " + dir.string() + " " + r.extra + " > /dev/null 2>&1";
            if (std::system(cmd.c_str()) != 0) throw Error(std::string("CLI run failed: ") + r.cmd);
            out[k] = slurp(dir / r.file);
        }
        ++total;
        if (!out[0].empty() && out[0] == out[1]) {
            ++same;
        } else {
            bad += std::string(" ") + r.cmd;
        }
    }
    return {same == total, fmt("%d/%d command outputs byte-identical across reruns%s", same, total, bad.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
    const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "betafluct_acceptance";
    report(1, operator_identity);
    report(2, one_cut_clt);
    report(3, mean_shift);
    report(4, characteristic_functional);
    report(5, equilibrium_residuals);
    report(6, multicut_structure);
    report(7, dichotomy);
    report(8, gaussian_partition);
    report(9, beta_two_closed_form);
    report(10, lemma_certificates);
    report(11, [&] { return determinism(work); });
    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
