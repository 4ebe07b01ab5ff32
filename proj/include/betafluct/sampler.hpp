#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "betafluct/equilibrium.hpp"
#include "betafluct/potential.hpp"

namespace betafluct {

struct ChainConfig {
    long n = 16;
    double beta = 2.0;
    Potential V = Potential::polynomial({0.0, 0.0, 0.5});
    long steps = 2000;          // total sweeps
    long burn_in = 500;         // sweeps, proposal scale adapted during these
    double proposal_scale = 0.1;
    std::uint64_t seed = 1;
    int chains = 1;
    long thin = 0;              // sweeps per retained sample; 0 means n
    std::vector<double> init;   // starting configuration; empty means arcsine points on [-2,2]
    Support pin;                // when non-empty, moves across the gaps of this support are rejected

    void validate() const;
};

struct SampleBatch {
    std::vector<std::vector<std::vector<double>>> chains;  // chain -> sample -> sorted configuration
    double acceptance_rate = 0.0;
    std::vector<double> chain_acceptance;
    std::vector<double> final_scale;
    long coincident_rejections = 0;
    std::vector<std::uint64_t> chain_seeds;

    long size() const;
    // all samples in chain order
    std::vector<const std::vector<double>*> flat() const;
};

// Single-site Metropolis for exp{-(n beta/2) sum V(l_i)} prod_{i<j} |l_i - l_j|^beta.
SampleBatch mcmc_sample(const ChainConfig& cfg);

// Exact Gaussian sampler (V = lambda^2/2): tridiagonal model with N(0,2)/sqrt2 diagonal and
// chi_{beta(n-k)}/sqrt2 off-diagonal, scaled by sqrt(2/(n beta)). Sorted spectrum.
std::vector<double> gbe_tridiag(long n, double beta, std::uint64_t seed);
// draws spectra, split over chains with independent sub-seeds
SampleBatch gbe_sample(long n, double beta, long draws, std::uint64_t seed, int chains = 1);

struct EmpiricalStats {
    long samples = 0;
    double mean = 0.0, variance = 0.0;
    double se_mean = 0.0, se_variance = 0.0;
    double ess = 0.0;
    long batch_size = 1;
    std::vector<double> t, Z;   // Z(t) = average of exp{t beta (N - mean)/2}
    double lag1_autocorrelation = 0.0;
};

// Linear statistic N[h] = sum h(l_i) per sample, batch-means errors; throws InsufficientDataError when ESS < 100.
EmpiricalStats empirical_stats(const SampleBatch& batch, const TestFunction& h, double beta, int t_points = 21);
std::vector<double> linear_statistic(const SampleBatch& batch, const TestFunction& h);

struct KSResult {
    double statistic = 0.0;
    double p_value = 1.0;
};
// Two-sample Kolmogorov-Smirnov test with the asymptotic distribution.
KSResult ks_two_sample(std::vector<double> x, std::vector<double> y);

// Fit log Z(t) = c t^2 by least squares; returns c and the largest absolute residual.
struct QuadraticFit {
    double coefficient = 0.0;
    double max_residual = 0.0;
};
QuadraticFit quadratic_fit(const std::vector<double>& t, const std::vector<double>& Z);

}  // namespace betafluct
