#include "betafluct/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "betafluct/errors.hpp"

namespace betafluct {

namespace {

std::vector<std::uint64_t> sub_seeds(std::uint64_t seed, int chains) {
    std::vector<std::uint64_t> out;
    for (int c = 0; c < chains; ++c) {
        std::seed_seq sq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(c)};
        std::uint32_t v[2];
        sq.generate(v, v + 2);
        out.push_back((static_cast<std::uint64_t>(v[0]) << 32) | v[1]);
    }
    return out;
}

struct ChainOutput {
    std::vector<std::vector<double>> samples;
    long accepted = 0, proposed = 0, coincident = 0;
    double scale = 0.0;
};

ChainOutput run_chain(const ChainConfig& cfg, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const long n = cfg.n;
    const long thin = cfg.thin > 0 ? cfg.thin : n;
    std::vector<double> x = cfg.init;
    if (x.empty()) {
        for (long k = 0; k < n; ++k) x.push_back(2.0 * std::cos(std::numbers::pi * (k + 0.5) / n));
    }
    std::vector<double> cuts;  // gap midpoints of the pinning support
    for (int i = 0; i + 1 < cfg.pin.q(); ++i)
        cuts.push_back(0.5 * (cfg.pin.intervals[i].b + cfg.pin.intervals[i + 1].a));
    auto cell = [&](double v) { return std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin(); };

    const double field = 0.5 * static_cast<double>(n) * cfg.beta;
    ChainOutput out;
    double scale = cfg.proposal_scale;
    long window_acc = 0, window_prop = 0;
    for (long sweep = 0; sweep < cfg.steps; ++sweep) {
        for (long i = 0; i < n; ++i) {
            const double old = x[i];
            const double y = old + scale * normal(gen);
            const double u = unif(gen);
            ++out.proposed;
            ++window_prop;
            if (!cuts.empty() && cell(y) != cell(old)) continue;
            double dlog = -field * (cfg.V(y) - cfg.V(old));
            bool coincident = false;
            for (long j = 0; j < n; ++j) {
                if (j == i) continue;
                const double dy = std::abs(y - x[j]);
                if (dy == 0.0) {
                    coincident = true;
                    break;
                }
                dlog += cfg.beta * (std::log(dy) - std::log(std::abs(old - x[j])));
            }
            if (coincident) {
                ++out.coincident;
                continue;
            }
            if (dlog >= 0.0 || std::log(u) < dlog) {
                x[i] = y;
                ++out.accepted;
                ++window_acc;
            }
        }
        if (sweep < cfg.burn_in) {
            if ((sweep + 1) % 50 == 0) {
                const double rate = static_cast<double>(window_acc) / window_prop;
                if (rate < 0.3) scale *= 0.8;
                if (rate > 0.5) scale *= 1.25;
                window_acc = window_prop = 0;
            }
            continue;
        }
        if ((sweep - cfg.burn_in + 1) % thin == 0) {
            std::vector<double> s = x;
            std::sort(s.begin(), s.end());
            out.samples.push_back(std::move(s));
        }
    }
    out.scale = scale;
    return out;
}

double variance_of(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return v.size() > 1 ? s / (v.size() - 1) : 0.0;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / v.size();
}

// Standard error of the mean of v by non-overlapping batches of size b.
double batch_se(const std::vector<double>& v, long b) {
    const long B = static_cast<long>(v.size()) / b;
    if (B < 2) return 0.0;
    std::vector<double> m(B, 0.0);
    for (long k = 0; k < B; ++k) {
        for (long j = 0; j < b; ++j) m[k] += v[k * b + j];
        m[k] /= b;
    }
    return std::sqrt(variance_of(m, mean_of(m)) / B);
}

double kolmogorov_q(double lambda) {
    if (lambda < 0.2) return 1.0;
    double s = 0.0, sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = sign * std::exp(-2.0 * j * j * lambda * lambda);
        s += term;
        if (std::abs(term) < 1e-16) break;
        sign = -sign;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

}  // namespace

void ChainConfig::validate() const {
    if (n < 1) throw ConfigError("chain config: n must be positive");
    if (!(beta > 0.0)) throw ConfigError("chain config: beta must be positive");
    if (!(burn_in >= 0 && burn_in < steps)) throw ConfigError("chain config: need 0 <= burn_in < steps");
    if (!(proposal_scale > 0.0)) throw ConfigError("chain config: proposal_scale must be positive");
    if (chains < 1) throw ConfigError("chain config: chains must be positive");
    if (thin < 0) throw ConfigError("chain config: thin must be non-negative");
    if (!init.empty() && static_cast<long>(init.size()) != n) throw ConfigError("chain config: init must have n entries");
    if (!pin.intervals.empty()) pin.validate();
}

long SampleBatch::size() const {
    long s = 0;
    for (const auto& c : chains) s += static_cast<long>(c.size());
    return s;
}

std::vector<const std::vector<double>*> SampleBatch::flat() const {
    std::vector<const std::vector<double>*> out;
    for (const auto& c : chains)
        for (const auto& s : c) out.push_back(&s);
    return out;
}

SampleBatch mcmc_sample(const ChainConfig& cfg) {
    cfg.validate();
    SampleBatch batch;
    batch.chain_seeds = sub_seeds(cfg.seed, cfg.chains);
    std::vector<ChainOutput> outs(cfg.chains);
    std::vector<std::thread> workers;
    for (int c = 0; c < cfg.chains; ++c)
        workers.emplace_back([&, c] { outs[c] = run_chain(cfg, batch.chain_seeds[c]); });
    for (auto& w : workers) w.join();
    long acc = 0, prop = 0;
    for (auto& o : outs) {
        acc += o.accepted;
        prop += o.proposed;
        batch.coincident_rejections += o.coincident;
        batch.chain_acceptance.push_back(static_cast<double>(o.accepted) / o.proposed);
        batch.final_scale.push_back(o.scale);
        batch.chains.push_back(std::move(o.samples));
    }
    batch.acceptance_rate = static_cast<double>(acc) / prop;
    return batch;
}

std::vector<double> gbe_tridiag(long n, double beta, std::uint64_t seed) {
    if (n < 1) throw DomainError("gbe_tridiag: n must be positive");
    if (!(beta > 0.0)) throw DomainError("gbe_tridiag: beta must be positive");
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const double scale = std::sqrt(2.0 / (static_cast<double>(n) * beta));
    Eigen::VectorXd diag(n), sub(std::max<long>(n - 1, 0));
    // N(0,2)/sqrt2 = N(0,1)
    for (long k = 0; k < n; ++k) diag[k] = normal(gen) * scale;
    for (long k = 1; k < n; ++k) {
        std::chi_squared_distribution<double> chi2(beta * static_cast<double>(n - k));
        sub[k - 1] = std::sqrt(chi2(gen) / 2.0) * scale;
    }
    if (n == 1) return {diag[0]};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
    std::sort(ev.begin(), ev.end());
    return ev;
}

SampleBatch gbe_sample(long n, double beta, long draws, std::uint64_t seed, int chains) {
    if (draws < 1) throw DomainError("gbe_sample: draws must be positive");
    if (chains < 1) throw DomainError("gbe_sample: chains must be positive");
    SampleBatch batch;
    batch.chain_seeds = sub_seeds(seed, chains);
    batch.chains.resize(chains);
    std::vector<std::thread> workers;
    for (int c = 0; c < chains; ++c) {
        workers.emplace_back([&, c] {
            const long count = draws / chains + (c < draws % chains ? 1 : 0);
            std::mt19937_64 gen(batch.chain_seeds[c]);
            for (long k = 0; k < count; ++k) batch.chains[c].push_back(gbe_tridiag(n, beta, gen()));
        });
    }
    for (auto& w : workers) w.join();
    batch.acceptance_rate = 1.0;
    batch.chain_acceptance.assign(chains, 1.0);
    batch.final_scale.assign(chains, 0.0);
    return batch;
}

std::vector<double> linear_statistic(const SampleBatch& batch, const TestFunction& h) {
    std::vector<double> out;
    for (const auto* s : batch.flat()) {
        double v = 0.0;
        for (double x : *s) v += h(x);
        out.push_back(v);
    }
    return out;
}

EmpiricalStats empirical_stats(const SampleBatch& batch, const TestFunction& h, double beta, int t_points) {
    const std::vector<double> N = linear_statistic(batch, h);
    if (N.size() < 100) throw InsufficientDataError("empirical_stats: fewer than 100 samples");
    EmpiricalStats st;
    st.samples = static_cast<long>(N.size());
    st.mean = mean_of(N);
    st.variance = variance_of(N, st.mean);
    st.batch_size = std::max<long>(1, static_cast<long>(std::sqrt(static_cast<double>(N.size()))));
    st.se_mean = batch_se(N, st.batch_size);
    std::vector<double> sq(N.size());
    for (std::size_t i = 0; i < N.size(); ++i) sq[i] = (N[i] - st.mean) * (N[i] - st.mean);
    st.se_variance = batch_se(sq, st.batch_size);
    if (st.variance > 0.0) {
        st.ess = st.variance / (st.se_mean * st.se_mean);
        double c1 = 0.0;
        for (std::size_t i = 1; i < N.size(); ++i) c1 += (N[i] - st.mean) * (N[i - 1] - st.mean);
        st.lag1_autocorrelation = c1 / ((N.size() - 1) * st.variance);
        if (st.ess < 100.0) throw InsufficientDataError("empirical_stats: effective sample size below 100");
    } else {
        st.ess = static_cast<double>(N.size());
    }
    for (int k = 0; k < t_points; ++k) {
        const double t = t_points == 1 ? 0.0 : -1.0 + 2.0 * k / (t_points - 1);
        double z = 0.0;
        for (double v : N) z += std::exp(0.5 * t * beta * (v - st.mean));
        st.t.push_back(t);
        st.Z.push_back(z / N.size());
    }
    return st;
}

KSResult ks_two_sample(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || y.empty()) throw InsufficientDataError("ks_two_sample: empty sample");
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());
    const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double D = 0.0;
    while (i < x.size() && j < y.size()) {
        const double v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v) ++i;
        while (j < y.size() && y[j] <= v) ++j;
        D = std::max(D, std::abs(i / nx - j / ny));
    }
    const double ne = nx * ny / (nx + ny), se = std::sqrt(ne);
    return {D, kolmogorov_q((se + 0.12 + 0.11 / se) * D)};
}

QuadraticFit quadratic_fit(const std::vector<double>& t, const std::vector<double>& Z) {
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
        const double t2 = t[k] * t[k];
        num += t2 * std::log(Z[k]);
        den += t2 * t2;
    }
    QuadraticFit f;
    f.coefficient = den > 0.0 ? num / den : 0.0;
    for (std::size_t k = 0; k < t.size(); ++k)
        f.max_residual = std::max(f.max_residual, std::abs(std::log(Z[k]) - f.coefficient * t[k] * t[k]));
    return f;
}

}  // namespace betafluct
