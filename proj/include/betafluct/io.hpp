#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "betafluct/chebops.hpp"
#include "betafluct/equilibrium.hpp"
#include "betafluct/fluctuation.hpp"
#include "betafluct/lemmacheck.hpp"
#include "betafluct/partition.hpp"
#include "betafluct/potential.hpp"
#include "betafluct/sampler.hpp"

namespace betafluct {

using json = nlohmann::json;

// Serializes with every floating value printed as %.17g (non-finite values become null).
std::string dump_json(const json& j, int indent = 2);

// n or an inclusive range a..b
struct NRange {
    long first = 200, last = 200;
    bool is_range() const { return last != first; }
};
// "200", "100..140"
NRange parse_n_range(const std::string& text);

struct SamplerSpec {
    std::string method = "auto";  // auto, tridiagonal, metropolis
    long draws = 10000;           // retained samples in total
    long burn_in = 0;             // sweeps; 0 means 200
    int chains = 1;
    double proposal_scale = 0.1;
    long thin = 0;                // sweeps per retained sample; 0 means n
    bool pin = false;             // keep particles on their initial intervals
};

struct LemmaSpec {
    double d = 0.5;
    Interval s1{-1.0, -0.05}, s2{0.05, 1.0};
    double eps = 0.02;
};

struct VerifySpec {
    std::string prediction_file;  // predict report to use instead of computing one
    std::string stats_file;       // sample stats report to use instead of sampling
    double allowance = 0.0;       // absolute slack added to 3 standard errors
};

struct RunConfig {
    bool has_potential = false;
    std::vector<double> potential_coeffs;
    int q = 1;
    bool has_support = false;
    Support support;              // initial guess for the endpoints
    double beta = 2.0;
    NRange n;
    std::vector<double> h_coeffs{0.0, 1.0};
    double tol = 1e-12;
    std::uint64_t seed = 1;
    int M = 64;
    std::string out = ".";
    SamplerSpec sampler;
    LemmaSpec lemmas;
    VerifySpec verify;

    Potential potential() const;  // throws ConfigError when absent
    TestFunction h() const;
    Support initial_support() const;
};

// Parses a JSON run configuration; throws ConfigError naming the line or the field.
RunConfig parse_run_config(const std::string& text);

json to_json(const EquilibriumMeasure& eq);
json to_json(const CLTPrediction& p);
json to_json(const ExpansionReport& r);
json to_json(const EmpiricalStats& s);
json to_json(const LemmaCertificate& c);
// Cached model: support, scale, Chebyshev data and operator matrices (row-major).
json to_json(const MultiCutModel& m);

}  // namespace betafluct
