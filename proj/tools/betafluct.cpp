#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "betafluct/errors.hpp"
#include "betafluct/io.hpp"

using namespace betafluct;
namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitAccuracy = 2;
constexpr int kExitModel = 3;
constexpr int kExitVerifyFail = 4;

struct Flags {
    std::string config, out, n;
    std::optional<std::uint64_t> seed;
    std::optional<double> beta, tol;
    bool save_model = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

RunConfig load(const Flags& f, bool need_config) {
    RunConfig c;
    if (!f.config.empty()) {
        c = parse_run_config(read_file(f.config));
    } else if (need_config) {
        throw ConfigError("--config is required for this command");
    }
    if (!f.out.empty()) c.out = f.out;
    if (!f.n.empty()) c.n = parse_n_range(f.n);
    if (f.seed) c.seed = *f.seed;
    if (f.beta) {
        if (!(*f.beta > 0.0)) throw ConfigError("--beta: expected a positive number");
        c.beta = *f.beta;
    }
    if (f.tol) {
        if (!(*f.tol > 0.0)) throw ConfigError("--tol: expected a positive number");
        c.tol = *f.tol;
    }
    fs::create_directories(c.out);
    return c;
}

EquilibriumMeasure solve(const RunConfig& c) {
    SolveOptions opt;
    opt.tol = c.tol;
    try {
        return solve_equilibrium(c.potential(), c.q, c.initial_support(), opt);
    } catch (const Error& e) {
        std::cerr << "equilibrium step failed: " << e.what() << "\n";
        throw;
    }
}

MultiCutModel model_for(const RunConfig& c, const EquilibriumMeasure& eq) {
    ModelOptions mo;
    mo.M = c.M;
    return build_model(eq, mo);
}

CLTPrediction predict_at(const RunConfig& c, const EquilibriumMeasure& eq, const MultiCutModel* model, long n) {
    CLTPrediction p = eq.q() == 1 ? onecut_predict(eq, c.h(), c.beta, c.M) : multicut_mean_var(*model, c.h(), n, c.beta);
    p.n = n;
    return p;
}

bool is_gaussian(const RunConfig& c) {
    std::vector<double> v = c.potential_coeffs;
    while (!v.empty() && v.back() == 0.0) v.pop_back();
    return v.size() == 3 && v[0] == 0.0 && v[1] == 0.0 && v[2] == 0.5;
}

// Arcsine points on each interval, occupation round(n mu_alpha) adjusted to total n.
std::vector<double> initial_configuration(const EquilibriumMeasure& eq, long n) {
    const int q = eq.q();
    std::vector<long> count(q);
    long total = 0;
    for (int a = 0; a < q; ++a) total += count[a] = std::lround(static_cast<double>(n) * eq.masses[a]);
    count[q - 1] += n - total;
    std::vector<double> x;
    const double pi = std::acos(-1.0);
    for (int a = 0; a < q; ++a) {
        const Interval& iv = eq.support.intervals[a];
        for (long i = 0; i < count[a]; ++i)
            x.push_back(iv.center() - iv.half() * std::cos(pi * (i + 0.5) / static_cast<double>(count[a])));
    }
    return x;
}

struct SampleRun {
    SampleBatch batch;
    std::string method;
};

SampleRun run_sampler(const RunConfig& c) {
    const long n = c.n.first;
    const auto& s = c.sampler;
    SampleRun r;
    r.method = s.method == "auto" ? (is_gaussian(c) && c.q == 1 ? "tridiagonal" : "metropolis") : s.method;
    if (r.method == "tridiagonal") {
        if (!is_gaussian(c)) throw ConfigError("config field 'sampler.method': tridiagonal requires V = lambda^2/2");
        r.batch = gbe_sample(n, c.beta, s.draws, c.seed, s.chains);
        return r;
    }
    const EquilibriumMeasure eq = solve(c);
    ChainConfig cfg;
    cfg.n = n;
    cfg.beta = c.beta;
    cfg.V = c.potential();
    cfg.seed = c.seed;
    cfg.chains = s.chains;
    cfg.thin = s.thin;
    cfg.proposal_scale = s.proposal_scale;
    cfg.burn_in = s.burn_in > 0 ? s.burn_in : 200;
    const long thin = s.thin > 0 ? s.thin : n;
    const long per_chain = (s.draws + s.chains - 1) / s.chains;
    cfg.steps = cfg.burn_in + per_chain * thin;
    cfg.init = initial_configuration(eq, n);
    if (s.pin) cfg.pin = eq.support;
    r.batch = mcmc_sample(cfg);
    return r;
}

json sample_metadata(const RunConfig& c, const SampleRun& r) {
    return {{"method", r.method},
            {"n", c.n.first},
            {"beta", c.beta},
            {"seed", c.seed},
            {"chain_seeds", r.batch.chain_seeds},
            {"acceptance_rate", r.batch.acceptance_rate},
            {"chain_acceptance", r.batch.chain_acceptance},
            {"final_scale", r.batch.final_scale},
            {"coincident_rejections", r.batch.coincident_rejections}};
}

int cmd_equilibrium(const Flags& f) {
    const RunConfig c = load(f, true);
    const EquilibriumMeasure eq = solve(c);
    json j = to_json(eq);
    // largest value of v - v* off the support on a grid spanning twice the support
    const double lo = eq.support.intervals.front().a, hi = eq.support.intervals.back().b;
    const double pad = 0.5 * (hi - lo);
    double outside = -INFINITY;
    for (int i = 0; i <= 2000; ++i) {
        const double x = lo - pad + (hi - lo + 2 * pad) * i / 2000.0;
        if (eq.support.locate(x) >= 0) continue;
        outside = std::max(outside, effective_potential(eq, x));
    }
    j["effective_potential_outside_max"] = outside;
    write_file(fs::path(c.out) / "equilibrium.json", dump_json(j));
    std::string csv = "x,rho\n";
    for (const auto& iv : eq.support.intervals)
        for (int i = 0; i <= 200; ++i) {
            const double x = iv.a + (iv.b - iv.a) * i / 200.0;
            csv += fmt(x) + "," + fmt(density(eq, x)) + "\n";
        }
    write_file(fs::path(c.out) / "density.csv", csv);
    if (f.save_model) write_file(fs::path(c.out) / "model.json", dump_json(to_json(model_for(c, eq))));
    return 0;
}

int cmd_predict(const Flags& f) {
    const RunConfig c = load(f, true);
    const EquilibriumMeasure eq = solve(c);
    std::optional<MultiCutModel> model;
    if (eq.q() > 1) model = model_for(c, eq);
    std::string csv = "n,mean_shift,mean_theta,var_smooth,var_theta,variance\n";
    json first;
    for (long n = c.n.first; n <= c.n.last; ++n) {
        const CLTPrediction p = predict_at(c, eq, model ? &*model : nullptr, n);
        if (n == c.n.first) first = to_json(p);
        csv += std::to_string(n) + "," + fmt(p.mean_shift) + "," + fmt(p.mean_theta) + "," + fmt(p.var_smooth) + "," +
               fmt(p.var_theta) + "," + fmt(p.variance()) + "\n";
    }
    first["n_range"] = {c.n.first, c.n.last};
    write_file(fs::path(c.out) / "predict.json", dump_json(first));
    write_file(fs::path(c.out) / "predict_series.csv", csv);
    return 0;
}

int cmd_theta(const Flags& f) {
    const RunConfig c = load(f, true);
    const EquilibriumMeasure eq = solve(c);
    json rows = json::array();
    std::string csv = "n,s,log_theta\n";
    std::optional<MultiCutModel> model;
    Eigen::VectorXd tilt;
    if (eq.q() > 1) {
        model = model_for(c, eq);
        tilt = I_functional(*model, model->log_rho_bar);
    }
    for (long n = c.n.first; n <= c.n.last; ++n) {
        Eigen::VectorXd mu(eq.q());
        for (int a = 0; a < eq.q(); ++a) mu[a] = model ? model->eq.masses[a] : 1.0;
        ThetaParams p = theta_offsets(mu, n);
        p.beta = c.beta;
        ThetaValue v;
        if (model) {
            p.Q = model->Q;
            p.t = tilt;
            v = theta_eval(p);
        }
        std::vector<double> e(p.e.data(), p.e.data() + p.e.size());
        rows.push_back({{"n", n}, {"e", e}, {"s", p.s}, {"log_theta", v.log_value}, {"radius", v.radius},
                        {"drift", v.drift}});
        csv += std::to_string(n) + "," + std::to_string(p.s) + "," + fmt(v.log_value) + "\n";
    }
    json j = {{"beta", c.beta}, {"q", eq.q()}, {"masses", eq.masses}, {"values", rows}};
    if (model) {
        std::vector<double> Q(model->Q.data(), model->Q.data() + model->Q.size());
        j["Q"] = Q;
    }
    write_file(fs::path(c.out) / "theta.json", dump_json(j));
    write_file(fs::path(c.out) / "theta_series.csv", csv);
    return 0;
}

int cmd_partition(const Flags& f) {
    const RunConfig c = load(f, true);
    const EquilibriumMeasure eq = solve(c);
    const MultiCutModel model = model_for(c, eq);
    const ExpansionReport base = log_partition(model, c.n.first, c.beta);
    json first = to_json(base);
    if (is_gaussian(c)) first["exact_gaussian"] = log_gaussian_partition(c.n.first, c.beta);
    std::string csv = "n,total";
    for (const auto& t : base.terms()) csv += "," + t.name;
    csv += "\n";
    for (long n = c.n.first; n <= c.n.last; ++n) {
        const ExpansionReport r = n == c.n.first ? base : log_partition_at(base, model, n);
        csv += std::to_string(n) + "," + fmt(r.total);
        for (const auto& t : r.terms()) csv += "," + fmt(t.value);
        csv += "\n";
    }
    write_file(fs::path(c.out) / "partition.json", dump_json(first));
    write_file(fs::path(c.out) / "partition_series.csv", csv);
    return 0;
}

int cmd_sample(const Flags& f) {
    const RunConfig c = load(f, true);
    const SampleRun r = run_sampler(c);
    std::string csv;
    for (const auto* x : r.batch.flat()) {
        for (std::size_t i = 0; i < x->size(); ++i) csv += (i ? "," : "") + fmt((*x)[i]);
        csv += "\n";
    }
    write_file(fs::path(c.out) / "samples.csv", csv);
    json j = to_json(empirical_stats(r.batch, c.h(), c.beta));
    j["sampler"] = sample_metadata(c, r);
    write_file(fs::path(c.out) / "stats.json", dump_json(j));
    return 0;
}

double field(const json& j, const char* key, const std::string& file) {
    if (!j.contains(key) || !j[key].is_number()) throw ConfigError("'" + file + "': missing numeric field '" + key + "'");
    return j[key].get<double>();
}

int cmd_verify(const Flags& f) {
    const RunConfig c = load(f, true);
    double pred_mean, pred_var;
    if (!c.verify.prediction_file.empty()) {
        const json p = json::parse(read_file(c.verify.prediction_file), nullptr, false);
        if (p.is_discarded()) throw ConfigError("'" + c.verify.prediction_file + "': malformed JSON");
        pred_mean = field(p, "mean", c.verify.prediction_file);
        pred_var = field(p, "variance", c.verify.prediction_file);
    } else {
        const EquilibriumMeasure eq = solve(c);
        std::optional<MultiCutModel> model;
        if (eq.q() > 1) model = model_for(c, eq);
        const CLTPrediction p = predict_at(c, eq, model ? &*model : nullptr, c.n.first);
        pred_mean = p.equilibrium_mean * static_cast<double>(c.n.first) + p.mean();
        pred_var = p.variance();
    }
    json stats;
    if (!c.verify.stats_file.empty()) {
        stats = json::parse(read_file(c.verify.stats_file), nullptr, false);
        if (stats.is_discarded()) throw ConfigError("'" + c.verify.stats_file + "': malformed JSON");
        if (field(stats, "ess", c.verify.stats_file) < 100.0)
            throw InsufficientDataError("effective sample size below 100 in '" + c.verify.stats_file + "'");
    } else {
        stats = to_json(empirical_stats(run_sampler(c).batch, c.h(), c.beta));
    }
    const std::string src = c.verify.stats_file.empty() ? "sampler" : c.verify.stats_file;
    struct Row {
        const char* name;
        double predicted, empirical, se;
    };
    const Row rows[] = {{"mean", pred_mean, field(stats, "mean", src), field(stats, "se_mean", src)},
                        {"variance", pred_var, field(stats, "variance", src), field(stats, "se_variance", src)}};
    json table = json::array();
    bool pass = true;
    for (const Row& r : rows) {
        const double diff = r.empirical - r.predicted;
        const bool ok = std::abs(diff) < 3.0 * r.se + c.verify.allowance;
        pass = pass && ok;
        table.push_back({{"statistic", r.name}, {"predicted", r.predicted}, {"empirical", r.empirical},
                         {"se", r.se}, {"z", diff / r.se}, {"pass", ok}});
    }
    const json j = {{"n", c.n.first}, {"beta", c.beta}, {"allowance", c.verify.allowance}, {"rows", table},
                    {"pass", pass}};
    write_file(fs::path(c.out) / "verify.json", dump_json(j));
    std::cout << (pass ? "verify: pass" : "verify: FAIL") << "\n";
    return pass ? 0 : kExitVerifyFail;
}

int cmd_lemmas(const Flags& f) {
    const RunConfig c = load(f, false);
    KernelA ka;
    ka.d = c.lemmas.d;
    const LemmaCertificate cert = lemma_certificate(ka, c.lemmas.s1, c.lemmas.s2, c.lemmas.eps);
    write_file(fs::path(c.out) / "lemmas.json", dump_json(to_json(cert)));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-cut beta ensemble fluctuations: equilibrium, predictions, partition expansion, sampling"};
    app.require_subcommand(1);
    Flags flags;
    struct Command {
        const char* name;
        const char* help;
        int (*run)(const Flags&);
    };
    const Command commands[] = {
        {"equilibrium", "solve the equilibrium measure", cmd_equilibrium},
        {"predict", "mean and variance of a linear statistic", cmd_predict},
        {"theta", "lattice sum corrections over n", cmd_theta},
        {"partition", "asymptotic expansion of the partition function", cmd_partition},
        {"sample", "draw eigenvalue configurations", cmd_sample},
        {"verify", "compare predictions with sampled statistics", cmd_verify},
        {"lemmas", "kernel and cross-coefficient certificate", cmd_lemmas},
    };
    int (*selected)(const Flags&) = nullptr;
    for (const Command& cmd : commands) {
        CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
        sub->add_option("--config", flags.config, "JSON run configuration");
        sub->add_option("--out", flags.out, "output directory");
        sub->add_option("--seed", flags.seed, "random seed");
        sub->add_option("--n", flags.n, "n or a range a..b");
        sub->add_option("--beta", flags.beta, "inverse temperature");
        sub->add_option("--tol", flags.tol, "equilibrium solver tolerance");
        if (std::string(cmd.name) == "equilibrium") sub->add_flag("--save-model", flags.save_model, "also write model.json");
        sub->callback([&selected, run = cmd.run] { selected = run; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }
    try {
        return selected(flags);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const ModelAssumptionError& e) {
        std::cerr << "model assumption violated: " << e.what() << "\n";
        return kExitModel;
    } catch (const InsufficientDataError& e) {
        std::cerr << "insufficient data: " << e.what() << "\n";
        return kExitAccuracy;
    } catch (const Error& e) {
        std::cerr << "accuracy error: " << e.what() << "\n";
        return kExitAccuracy;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}
