#include "betafluct/io.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "betafluct/errors.hpp"

namespace betafluct {

namespace {

void write_value(std::ostringstream& os, const json& j, int indent, int depth) {
    const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
    const std::string close(static_cast<std::size_t>(indent * depth), ' ');
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case json::value_t::object: {
        if (j.empty()) { os << "{}"; return; }
        os << '{' << nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) os << ',' << nl;
            first = false;
            os << pad << json(it.key()).dump() << (indent > 0 ? ": " : ":");
            write_value(os, it.value(), indent, depth + 1);
        }
        os << nl << close << '}';
        return;
    }
    case json::value_t::array: {
        if (j.empty()) { os << "[]"; return; }
        os << '[' << nl;
        bool first = true;
        for (const auto& v : j) {
            if (!first) os << ',' << nl;
            first = false;
            os << pad;
            write_value(os, v, indent, depth + 1);
        }
        os << nl << close << ']';
        return;
    }
    case json::value_t::number_float: {
        const double v = j.get<double>();
        if (!std::isfinite(v)) { os << "null"; return; }
        if (v == 0.0) { os << "0"; return; }
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        os << buf;
        return;
    }
    default:
        os << j.dump();
    }
}

[[noreturn]] void field_error(const std::string& field, const std::string& msg) {
    throw ConfigError("config field '" + field + "': " + msg);
}

double get_number(const json& j, const std::string& field) {
    if (!j.is_number()) field_error(field, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) field_error(field, "expected a finite number");
    return v;
}

long get_integer(const json& j, const std::string& field) {
    if (!j.is_number_integer()) field_error(field, "expected an integer");
    return j.get<long>();
}

std::vector<double> get_numbers(const json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) field_error(field, "expected a non-empty array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(get_number(j[i], field + "[" + std::to_string(i) + "]"));
    return v;
}

Interval get_interval(const json& j, const std::string& field) {
    const auto v = get_numbers(j, field);
    if (v.size() != 2 || !(v[0] < v[1])) field_error(field, "expected [a, b] with a < b");
    return {v[0], v[1]};
}

void check_keys(const json& j, const std::string& field, const std::set<std::string>& allowed) {
    if (!j.is_object()) field_error(field, "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) field_error(field.empty() ? it.key() : field + "." + it.key(), "unknown field");
    }
}

std::vector<double> get_polynomial(const json& j, const std::string& field) {
    check_keys(j, field, {"type", "coeffs"});
    if (!j.contains("type") || !j["type"].is_string() || j["type"].get<std::string>() != "polynomial")
        field_error(field + ".type", "expected \"polynomial\"");
    if (!j.contains("coeffs")) field_error(field + ".coeffs", "missing");
    return get_numbers(j["coeffs"], field + ".coeffs");
}

NRange get_n(const json& j, const std::string& field) {
    NRange r;
    if (j.is_number_integer()) {
        r.first = r.last = j.get<long>();
    } else if (j.is_string()) {
        try {
            r = parse_n_range(j.get<std::string>());
        } catch (const ConfigError& e) {
            field_error(field, e.what());
        }
    } else if (j.is_array() && j.size() == 2) {
        r.first = get_integer(j[0], field + "[0]");
        r.last = get_integer(j[1], field + "[1]");
    } else {
        field_error(field, "expected an integer, \"a..b\" or [a, b]");
    }
    if (r.first < 1 || r.last < r.first) field_error(field, "expected 1 <= a <= b");
    return r;
}

json matrix_json(const Eigen::MatrixXd& m) {
    std::vector<double> data;
    data.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index k = 0; k < m.cols(); ++k) data.push_back(m(i, k));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

json series_json(const ChebSeries& s) {
    json blocks = json::array();
    for (int i = 0; i < s.q(); ++i) {
        std::vector<double> c(s.coeffs[i].data(), s.coeffs[i].data() + s.coeffs[i].size());
        blocks.push_back({{"interval", {s.intervals[i].a, s.intervals[i].b}}, {"coeffs", c}});
    }
    return {{"kind", s.kind == ChebSeries::Kind::density ? "density" : "function"}, {"blocks", blocks}};
}

json support_json(const Support& s) {
    json a = json::array();
    for (const auto& iv : s.intervals) a.push_back({iv.a, iv.b});
    return a;
}

}  // namespace

std::string dump_json(const json& j, int indent) {
    std::ostringstream os;
    write_value(os, j, indent, 0);
    os << '\n';
    return os.str();
}

NRange parse_n_range(const std::string& text) {
    NRange r;
    try {
        const auto pos = text.find("..");
        std::size_t used = 0;
        if (pos == std::string::npos) {
            r.first = r.last = std::stol(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } else {
            const std::string a = text.substr(0, pos), b = text.substr(pos + 2);
            r.first = std::stol(a, &used);
            if (used != a.size()) throw std::invalid_argument(text);
            r.last = std::stol(b, &used);
            if (used != b.size()) throw std::invalid_argument(text);
        }
    } catch (const std::logic_error&) {
        throw ConfigError("n: expected an integer or a range a..b, got '" + text + "'");
    }
    if (r.first < 1 || r.last < r.first) throw ConfigError("n: expected 1 <= a <= b, got '" + text + "'");
    return r;
}

Potential RunConfig::potential() const {
    if (!has_potential) throw ConfigError("config field 'potential': missing");
    return Potential::polynomial(potential_coeffs);
}

TestFunction RunConfig::h() const { return TestFunction::polynomial(h_coeffs); }

Support RunConfig::initial_support() const {
    if (has_support) return support;
    return Support{{{-2.0, 2.0}}};
}

RunConfig parse_run_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("malformed config: ") + e.what());
    }
    check_keys(j, "", {"potential", "support", "q", "beta", "n", "h", "tol", "seed", "M", "out", "sampler",
                       "lemmas", "verify"});
    RunConfig c;
    if (j.contains("potential")) {
        c.potential_coeffs = get_polynomial(j["potential"], "potential");
        c.has_potential = true;
        try {
            Potential::polynomial(c.potential_coeffs);
        } catch (const Error& e) {
            field_error("potential", e.what());
        }
    }
    if (j.contains("support")) {
        const json& s = j["support"];
        if (!s.is_array() || s.empty()) field_error("support", "expected [[a, b], ...]");
        for (std::size_t i = 0; i < s.size(); ++i)
            c.support.intervals.push_back(get_interval(s[i], "support[" + std::to_string(i) + "]"));
        try {
            c.support.validate();
        } catch (const Error& e) {
            field_error("support", e.what());
        }
        c.has_support = true;
        c.q = c.support.q();
    }
    if (j.contains("q")) {
        c.q = static_cast<int>(get_integer(j["q"], "q"));
        if (c.q < 1) field_error("q", "expected q >= 1");
        if (c.has_support && c.q != c.support.q()) field_error("q", "does not match the number of support intervals");
        if (!c.has_support && c.q > 1) field_error("support", "required when q > 1");
    }
    if (j.contains("beta")) {
        c.beta = get_number(j["beta"], "beta");
        if (!(c.beta > 0.0)) field_error("beta", "expected beta > 0");
    }
    if (j.contains("n")) c.n = get_n(j["n"], "n");
    if (j.contains("h")) c.h_coeffs = get_polynomial(j["h"], "h");
    if (j.contains("tol")) {
        c.tol = get_number(j["tol"], "tol");
        if (!(c.tol > 0.0)) field_error("tol", "expected tol > 0");
    }
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) field_error("seed", "expected a non-negative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("M")) {
        c.M = static_cast<int>(get_integer(j["M"], "M"));
        if (c.M < 8) field_error("M", "expected M >= 8");
    }
    if (j.contains("out")) {
        if (!j["out"].is_string()) field_error("out", "expected a path");
        c.out = j["out"].get<std::string>();
    }
    if (j.contains("sampler")) {
        const json& s = j["sampler"];
        check_keys(s, "sampler", {"method", "draws", "burn_in", "chains", "proposal_scale", "thin", "pin"});
        if (s.contains("method")) {
            if (!s["method"].is_string()) field_error("sampler.method", "expected a string");
            c.sampler.method = s["method"].get<std::string>();
            if (c.sampler.method != "auto" && c.sampler.method != "tridiagonal" && c.sampler.method != "metropolis")
                field_error("sampler.method", "expected auto, tridiagonal or metropolis");
        }
        if (s.contains("draws")) c.sampler.draws = get_integer(s["draws"], "sampler.draws");
        if (c.sampler.draws < 2) field_error("sampler.draws", "expected at least 2");
        if (s.contains("burn_in")) c.sampler.burn_in = get_integer(s["burn_in"], "sampler.burn_in");
        if (c.sampler.burn_in < 0) field_error("sampler.burn_in", "expected a non-negative integer");
        if (s.contains("chains")) c.sampler.chains = static_cast<int>(get_integer(s["chains"], "sampler.chains"));
        if (c.sampler.chains < 1) field_error("sampler.chains", "expected at least 1");
        if (s.contains("proposal_scale"))
            c.sampler.proposal_scale = get_number(s["proposal_scale"], "sampler.proposal_scale");
        if (!(c.sampler.proposal_scale > 0.0)) field_error("sampler.proposal_scale", "expected a positive number");
        if (s.contains("thin")) c.sampler.thin = get_integer(s["thin"], "sampler.thin");
        if (c.sampler.thin < 0) field_error("sampler.thin", "expected a non-negative integer");
        if (s.contains("pin")) {
            if (!s["pin"].is_boolean()) field_error("sampler.pin", "expected true or false");
            c.sampler.pin = s["pin"].get<bool>();
        }
    }
    if (j.contains("lemmas")) {
        const json& s = j["lemmas"];
        check_keys(s, "lemmas", {"d", "s1", "s2", "eps"});
        if (s.contains("d")) c.lemmas.d = get_number(s["d"], "lemmas.d");
        if (!(c.lemmas.d > 0.0 && c.lemmas.d <= 1.0)) field_error("lemmas.d", "expected 0 < d <= 1");
        if (s.contains("s1")) c.lemmas.s1 = get_interval(s["s1"], "lemmas.s1");
        if (s.contains("s2")) c.lemmas.s2 = get_interval(s["s2"], "lemmas.s2");
        if (s.contains("eps")) c.lemmas.eps = get_number(s["eps"], "lemmas.eps");
        if (!(c.lemmas.eps >= 0.0)) field_error("lemmas.eps", "expected eps >= 0");
    }
    if (j.contains("verify")) {
        const json& s = j["verify"];
        check_keys(s, "verify", {"prediction_file", "stats_file", "allowance"});
        for (const char* key : {"prediction_file", "stats_file"}) {
            if (!s.contains(key)) continue;
            if (!s[key].is_string()) field_error(std::string("verify.") + key, "expected a path");
        }
        if (s.contains("prediction_file")) c.verify.prediction_file = s["prediction_file"].get<std::string>();
        if (s.contains("stats_file")) c.verify.stats_file = s["stats_file"].get<std::string>();
        if (s.contains("allowance")) c.verify.allowance = get_number(s["allowance"], "verify.allowance");
        if (c.verify.allowance < 0.0) field_error("verify.allowance", "expected a non-negative number");
    }
    return c;
}

json to_json(const EquilibriumMeasure& eq) {
    json res = json::object();
    for (const auto& [k, v] : eq.residuals) res[k] = v;
    return {{"support", support_json(eq.support)},
            {"P", eq.P.coeffs()},
            {"masses", eq.masses},
            {"energy", eq.energy},
            {"v_star", eq.v_star},
            {"residuals", res}};
}

json to_json(const CLTPrediction& p) {
    std::vector<double> I(p.I.data(), p.I.data() + p.I.size());
    return {{"n", p.n},
            {"beta", p.beta},
            {"equilibrium_mean", p.equilibrium_mean},
            {"mean_shift", p.mean_shift},
            {"mean_theta", p.mean_theta},
            {"mean", p.equilibrium_mean * static_cast<double>(p.n) + p.mean()},
            {"var_smooth", p.var_smooth},
            {"var_theta", p.var_theta},
            {"variance", p.variance()},
            {"gaussian", p.gaussian},
            {"I", I}};
}

json to_json(const ExpansionReport& r) {
    json terms = json::array();
    for (const auto& t : r.terms()) terms.push_back({{"name", t.name}, {"term", t.label}, {"value", t.value}});
    return {{"n", r.n},
            {"beta", r.beta},
            {"q", r.q},
            {"terms", terms},
            {"total", r.total},
            {"c_beta", r.c_beta},
            {"c1", r.c1},
            {"energy", r.energy},
            {"entropy", r.entropy},
            {"r_blocks", r.r_blocks},
            {"det", r.det},
            {"det_drift", r.det_drift},
            {"r_contour_drift", r.r_contour_drift},
            {"r_t_drift", r.r_t_drift},
            {"uncorrected", {{"term_F", r.term_F_uncorrected}, {"term_n", r.term_n_uncorrected}}}};
}

json to_json(const EmpiricalStats& s) {
    return {{"samples", s.samples},
            {"mean", s.mean},
            {"variance", s.variance},
            {"se_mean", s.se_mean},
            {"se_variance", s.se_variance},
            {"ess", s.ess},
            {"batch_size", s.batch_size},
            {"lag1_autocorrelation", s.lag1_autocorrelation},
            {"t", s.t},
            {"Z", s.Z}};
}

json to_json(const LemmaCertificate& c) {
    return {{"d", c.kernel.d},
            {"delta1", c.gap.delta1},
            {"delta1_refined", c.gap.delta1_refined},
            {"k_at_sup", c.gap.k_at_sup},
            {"sup_at_grid_edge", c.gap.sup_at_grid_edge},
            {"min_fourier", c.gap.min_fourier},
            {"k_at_min", c.gap.k_at_min},
            {"tail_k4", c.gap.tail_k4},
            {"knot_jumps", c.jumps},
            {"continuity_max", c.continuity_max},
            {"decay_slope", c.decay.slope},
            {"decay_intercept", c.decay.intercept},
            {"decay_r2", c.decay.r2},
            {"decay_values", c.decay.values},
            {"single_integral_rel", c.single_integral_rel},
            {"cross_reduction_rel", c.cross_reduction_rel},
            {"symmetry", c.symmetry},
            {"alternate_ratio", c.alternate_ratio}};
}

json to_json(const MultiCutModel& m) {
    json psi = json::array();
    for (const auto& p : m.psi) psi.push_back(series_json(p));
    json j = {{"support", support_json(m.eq.support)},
              {"original_support", support_json(m.original.support)},
              {"scale", {{"s", m.scale.s}, {"t", m.scale.t}}},
              {"M", m.M},
              {"masses", m.eq.masses},
              {"P", m.eq.P.coeffs()},
              {"Lhat", matrix_json(m.Lhat.m)},
              {"Ltilde", matrix_json(m.Ltilde.m)},
              {"Dbar", matrix_json(m.Dbar.m)},
              {"G", matrix_json(m.G.m)},
              {"Q", matrix_json(m.Q)},
              {"Qinv", matrix_json(m.Qinv)},
              {"psi", psi},
              {"nu", series_json(m.nu)},
              {"log_rho", series_json(m.log_rho)},
              {"log_rho_bar", series_json(m.log_rho_bar)}};
    return j;
}

}  // namespace betafluct
