#include <doctest.h>

#include <cmath>

#include "betafluct/errors.hpp"
#include "betafluct/io.hpp"

using namespace betafluct;

TEST_SUITE("io") {

TEST_CASE("floating values are written with 17 significant digits and round-trip") {
    const double v = 0.1 + 0.2;
    const json j = {{"a", v}, {"b", 3}, {"c", {1.0 / 3.0, -0.0}}, {"d", NAN}, {"e", "x\"y"}};
    const std::string s = dump_json(j);
    CHECK(s.find("0.30000000000000004") != std::string::npos);
    CHECK(s.find("0.33333333333333331") != std::string::npos);
    CHECK(s.find("\"d\": null") != std::string::npos);
    CHECK(s.find("\"b\": 3") != std::string::npos);
    const json back = json::parse(s);
    CHECK(back["a"].get<double>() == v);
    CHECK(back["e"].get<std::string>() == "x\"y");
    CHECK(dump_json(j) == s);
}

TEST_CASE("n ranges") {
    CHECK(parse_n_range("200").first == 200);
    const auto r = parse_n_range("100..140");
    CHECK(r.first == 100);
    CHECK(r.last == 140);
    CHECK(r.is_range());
    CHECK_THROWS_AS(parse_n_range("140..100"), ConfigError);
    CHECK_THROWS_AS(parse_n_range("abc"), ConfigError);
    CHECK_THROWS_AS(parse_n_range("10..x"), ConfigError);
}

TEST_CASE("run configuration parsing and diagnostics") {
    const auto c = parse_run_config(R"({"potential":{"type":"polynomial","coeffs":[0,0,-2,0,0.25]},
        "support":[[-2.6,-1.2],[1.1,2.4]],"beta":1,"n":"100..140","h":{"type":"polynomial","coeffs":[0,0,1]},
        "seed":7,"sampler":{"draws":500,"method":"metropolis","pin":true}})");
    CHECK(c.q == 2);
    CHECK(c.beta == 1.0);
    CHECK(c.n.last == 140);
    CHECK(c.seed == 7);
    CHECK(c.sampler.pin);
    CHECK(c.h()(3.0) == doctest::Approx(9.0));
    CHECK_THROWS_AS(parse_run_config(""), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"beta":"x"})"), doctest::Contains("'beta'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"bta":2})"), doctest::Contains("'bta'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config("{\n\"beta\": 2,,\n}"), doctest::Contains("line 2"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"potential":{"type":"polynomial","coeffs":[0,0,0,-1]}})"),
                         doctest::Contains("'potential'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"q":2})"), doctest::Contains("'support'"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_run_config(R"({"support":[[1,0]]})"), doctest::Contains("support[0]"), ConfigError);
    CHECK_THROWS_AS(RunConfig{}.potential(), ConfigError);
}

TEST_CASE("model document carries the operator matrices row-major") {
    const auto eq = solve_equilibrium(Potential::polynomial({0, 0, -2, 0, 0.25}), 2, Support{{{-2.6, -1.2}, {1.1, 2.4}}});
    const auto m = build_model(eq);
    const json j = to_json(m);
    CHECK(j["Q"]["rows"] == 2);
    CHECK(j["Q"]["data"][1].get<double>() == m.Q(0, 1));
    const int n = j["G"]["cols"].get<int>();
    CHECK(j["G"]["data"][n + 2].get<double>() == m.G.m(1, 2));
    CHECK(j["psi"].size() == 2);
}

}
