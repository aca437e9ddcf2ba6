#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli/commands.hpp"
#include "cli/identities.hpp"
#include "cli/law_expr.hpp"

using namespace levycalc;
using namespace levycalc::cli;
using json = nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

Vec v1(double x) { return Vec::Constant(1, x); }

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("law expressions") {
    CHECK(parse_law("stable(1.0, 1)").exponent(v1(1.0)).real() == doctest::Approx(-1.0));
    CHECK(parse_law("stable(1.5, 2, 2)").dim() == 2);
    CHECK(parse_law("laplace()").exponent(v1(1.0)).real() == doctest::Approx(-std::log(2.0)));
    CHECK(parse_law("gaussian(2)").exponent(v1(1.0)).real() == doctest::Approx(-1.0));
    const auto g = parse_law("gamma(2, 4)");
    CHECK(std::abs(g.exponent(v1(1.0)) + 2.0 * std::log(std::complex<double>(1.0, -0.25))) < 1e-12);

    const auto cp = parse_law("cpoisson(2, [(0.5, 1), (3, 0.5)])");
    REQUIRE(cp.triplet);
    const std::complex<double> i(0, 1);
    const auto expected = 2.0 * (1.0 * (std::exp(0.5 * i) - 1.0) + 0.5 * (std::exp(3.0 * i) - 1.0));
    CHECK(std::abs(cp.exponent(v1(1.0)) - expected) < 1e-12);
    CHECK(parse_law("cpoisson(1, [([1, 2], 1)])").dim() == 2);

    CHECK_THROWS_AS(parse_law("stable(2.5, 1)"), InvalidArgument);
    CHECK_THROWS_AS(parse_law("gamma(0, 1)"), InvalidArgument);
    CHECK_THROWS_AS(parse_law("gaussian(-1)"), InvalidArgument);
    CHECK_THROWS_AS(parse_law("cpoisson(-1, [(1, 1)])"), InvalidArgument);
    CHECK_THROWS_AS(parse_law("cauchy(1)"), ParseError);
    try {
        parse_law("gamma(1 1)");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.column() == 9);
    }
}

TEST_CASE("triplet files") {
    const std::string path = "levycalc_test_triplet.json";
    {
        std::ofstream f(path);
        f << R"({"shift": 0, "cov": 1, "measure": {"type": "zero"}})";
    }
    const auto law = parse_law("triplet(file=" + path + ")");
    CHECK(law.exponent(v1(2.0)).real() == doctest::Approx(-2.0));
    CHECK(parse_law("triplet(\"" + path + "\")").dim() == 1);
    std::remove(path.c_str());
    CHECK_THROWS_AS(parse_law("triplet(file=/nonexistent/t.json)"), InvalidArgument);
}

TEST_CASE("eval") {
    auto r = call({"eval", "--law", "laplace()", "--pipe", "(sub id J)", "--y", "1"});
    CHECK(r.code == kExitOk);
    CHECK(r.out.rfind("y,re,im\n1,", 0) == 0);
    std::istringstream row(r.out.substr(r.out.find('\n') + 1));
    std::string y, re;
    std::getline(row, y, ',');
    std::getline(row, re, ',');
    CHECK(std::stod(re) == doctest::Approx(2 * (std::atan(1.0) - 1)).epsilon(1e-12));

    r = call({"eval", "--law", "stable(1.0,1)", "--pipe", "id", "--y", "1"});
    CHECK(r.out == "y,re,im\n1,-1,0\n");

    r = call({"eval", "--law", "gaussian(1)", "--ygrid", "0.1:10:5", "--format", "json"});
    CHECK(r.code == kExitOk);
    CHECK(json::parse(r.out)["values"].size() == 5);

    r = call({"eval", "--law", "laplace()", "--pipe", "(sub id", "--y", "1"});
    CHECK(r.code == kExitUsage);
    CHECK(r.err.find("column 8") != std::string::npos);

    r = call({"eval", "--law", "cpoisson(1,[(1,1)])", "--pipe", "I", "--y", "1"});
    CHECK(r.code == kExitOk);
}

TEST_CASE("normalize") {
    auto r = call({"normalize", "--pipe", "(compose (sub id J) (add id I))"});
    CHECK(r.code == kExitOk);
    CHECK(r.out == "id\n");
}

TEST_CASE("factorize") {
    auto r = call({"factorize", "--law", "stable(1.5,1)"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["factors"][0]["atUnit"]["ratioToInput"].get<double>() == doctest::Approx(0.6));
    CHECK(j["factors"][1]["atUnit"]["ratioToInput"].get<double>() == doctest::Approx(0.4));

    r = call({"factorize", "--law", "gamma(1,1)", "--n", "2"});
    REQUIRE(r.code == kExitOk);
    CHECK(json::parse(r.out)["residuals"]["telescoping"].get<double>() < 1e-8);

    r = call({"factorize", "--law", "cpoisson(1,[(1,1)])"});
    CHECK(r.code == kExitFailure);
    CHECK(r.err.find("ray 0") != std::string::npos);

    CHECK(call({"factorize", "--law", "gamma(1,1)", "--n", "9"}).code == kExitUsage);
}

TEST_CASE("classify") {
    auto r = call({"classify", "--law", "gamma(1,1)"});
    REQUIRE(r.code == kExitOk);
    const auto j = json::parse(r.out);
    CHECK(j["class"]["in_L"] == true);
    CHECK(j["class"]["in_U"] == true);
}

TEST_CASE("identities") {
    auto r = call({"identities", "--fuzz", "0"});
    CHECK(r.code == kExitOk);
    r = call({"identities", "--fuzz", "3", "--seed", "7"});
    CHECK(r.code == kExitOk);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 4);
    r = call({"identities", "--fuzz", "3", "--seed", "7", "--perturb", "1e-3"});
    CHECK(r.code == kExitFailure);
}

TEST_CASE("identity residuals on a fixed triplet") {
    RandomStream rng(3, 0);
    const auto t = random_compound_poisson(rng);
    const auto grid = identity_grid(rng, t.dim(), 10);
    const auto res = check_identities(t, grid);
    CHECK(passes(res));
    CHECK_FALSE(passes(check_identities(t, grid, 1e-3)));
}

TEST_CASE("simulate") {
    auto r = call({"simulate", "--law", "gaussian(1)", "--class", "U", "--check", "-N", "5000", "--seed", "3"});
    CHECK(r.code == kExitOk);
    CHECK(r.err.find("verdict=PASS") != std::string::npos);
    CHECK(r.out.rfind("y,ecf_re", 0) == 0);

    r = call({"simulate", "--law", "cpoisson(1,[(10,1)])", "--class", "L", "-N", "1000", "--samples", "levycalc_test_samples.csv"});
    CHECK(r.code == kExitOk);

    std::remove("levycalc_test_samples.csv");
    r = call({"simulate", "--law", "gaussian(1)", "--class", "X"});
    CHECK(r.code == kExitUsage);
}

TEST_CASE("usage errors") {
    CHECK(call({}).code == kExitUsage);
    CHECK(call({"eval"}).code == kExitUsage);
    CHECK(call({"--help"}).code == kExitOk);
    CHECK(call({"eval", "--law", "stable(3,1)", "--y", "1"}).code == kExitUsage);
}

}
