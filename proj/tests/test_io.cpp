#include "ma_radial/error.hpp"
#include "ma_radial/problem_io.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

using namespace ma_radial;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string validation_message(const std::string& text) {
    try {
        parse_problem(text);
    } catch (const ValidationError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("problem files parse families, expressions and overrides") {
    const ProblemFile pf = parse_problem(R"js({
        "N": 2, "lambda": 3.5,
        "f": {"family": "power", "params": [2]},
        "g": {"expr": "x^2/(1+x^2)", "limits": {"q0": "zero", "qinf": 0}},
        "grid": {"M": 256},
        "solver": {"tol_residual": 1e-9, "seed_radii": [0.5, 2], "alpha_box": {"lo": 0.1, "hi": 10}}
    })js");
    CHECK(pf.N == 2);
    REQUIRE(pf.lambda);
    CHECK(*pf.lambda == 3.5);
    CHECK(pf.f(3.0) == doctest::Approx(9.0));
    CHECK(pf.g(1.0) == doctest::Approx(0.5));
    REQUIRE(pf.g.declared_limits().q0);
    CHECK(pf.g.declared_limits().q0->kind == LimitKind::zero);
    CHECK(pf.g.declared_limits().qinf->kind == LimitKind::zero);
    CHECK(pf.grid_intervals == 256);
    CHECK(pf.grid().intervals() == 256);
    CHECK(pf.solver.tol_residual == 1e-9);
    CHECK(pf.solver.seed_radii == std::vector<double>{0.5, 2.0});
    CHECK(pf.solver.alpha_box.lo1 == 0.1);
    CHECK(pf.solver.alpha_box.hi2 == 10.0);
    CHECK(pf.spec().lambda == 3.5);
}

TEST_CASE("problem file validation") {
    CHECK(validation_message(R"js({"N": 1, "f": {"family": "linear"}, "g": {"family": "linear"}, "extra": 1})js")
              .find("unknown key 'extra'") != std::string::npos);
    CHECK(validation_message(R"js({"N": 0, "f": {"family": "linear"}, "g": {"family": "linear"}})js")
              .find("'N' must be >= 1") != std::string::npos);
    CHECK(validation_message(R"js({"N": 1, "f": {"family": "linear"}})js").find("required") != std::string::npos);
    CHECK(validation_message(R"js({"N": 1, "f": {"family": "nope"}, "g": {"family": "linear"}})js")
              .find("unknown nonlinearity family") != std::string::npos);
    CHECK(validation_message(R"js({"N": 1, "f": {"expr": "x^^2"}, "g": {"family": "linear"}})js") != "");
    CHECK(validation_message(R"js({"N": 1, "f": {"family": "linear", "expr": "x"}, "g": {"family": "linear"}})js")
              .find("exactly one") != std::string::npos);
    CHECK(validation_message(R"js({"N": 1, "f": {"family": "linear"}, "g": {"family": "linear"}, "solver": {"damping": 2}})js") != "");

    const ProblemFile no_lambda = parse_problem(R"js({"N": 1, "f": {"family": "linear"}, "g": {"family": "linear"}})js");
    CHECK_THROWS_AS(no_lambda.spec(), ValidationError);
    CHECK_THROWS_AS(load_problem("/nonexistent/problem.json"), ValidationError);
}

TEST_CASE("malformed JSON reports line and column") {
    const std::string msg = validation_message("{\n  \"N\": 1,\n  \"f\": {\"family\": \"linear\"},\n  \"g\": {\"family\" \"linear\"}\n}");
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("column") != std::string::npos);
}

TEST_CASE("limit JSON round-trip including non-finite values") {
    ExtendedLimit lim = ExtendedLimit::finite(0.25);
    lim.evidence = {{1e-3, 0.2500001}, {1e300, std::numeric_limits<double>::infinity()}};
    const ExtendedLimit back = limit_from_json(nlohmann::json::parse(to_json(lim).dump()));
    CHECK(back == lim);
}

TEST_CASE("regime and sweep reports round-trip through JSON") {
    const ProblemSpec p(1, 1.0, Nonlinearity::linear(), Nonlinearity::linear());
    const RegimeReport reg = classify(p);
    CHECK(regime_from_json(nlohmann::json::parse(to_json(reg).dump())) == reg);

    SweepReport rep;
    rep.lambdas = {0.5, 1.0, 1.0 / 3.0 + 1.0};
    rep.counts = {1, std::nullopt, 2};
    rep.solutions = {{{0.5, 0.25, 0.25, false}}, {}, {{0.1, 0.05, 0.05, false}, {7.0 / 3.0, 1.0, 4.0 / 3.0, true}}};
    rep.thresholds = {{1.2345678901234567, 1.0, 1.5, ThresholdKind::linearization, true, false}};
    rep.regime = reg;
    rep.notes = {"", "degenerate root", ""};
    rep.violations = {"lambda=2: count 2 outside the certified range [0, 0]"};
    CHECK(sweep_from_json(nlohmann::json::parse(to_json(rep).dump())) == rep);
}

TEST_CASE("sweep CSV round-trip") {
    SweepReport rep;
    rep.lambdas = {0.1, 2.0 / 3.0, 1e5};
    rep.counts = {0, std::nullopt, 2};
    rep.solutions = {{}, {}, {{1.0 / 7.0, 0, 0, false}, {123456.789, 0, 0, false}}};
    const std::string csv = sweep_to_csv(rep);
    CHECK(csv.rfind("lambda,count,norms\n", 0) == 0);
    CHECK(csv.find("undetermined") != std::string::npos);
    const SweepReport back = sweep_from_csv(csv);
    CHECK(back.lambdas == rep.lambdas);
    CHECK(back.counts == rep.counts);
    REQUIRE(back.solutions.size() == 3);
    CHECK(back.solutions[2].size() == 2);
    CHECK(back.solutions[2][0].norm == rep.solutions[2][0].norm);
    CHECK(back.solutions[2][1].norm == rep.solutions[2][1].norm);
    CHECK(sweep_to_csv(back) == csv);
    CHECK_THROWS_AS(sweep_from_csv("lambda,count\n1,1\n"), ValidationError);
}

TEST_CASE("threshold and solution CSV layouts") {
    const std::string th = thresholds_to_csv({{2.5, 2.0, 3.0, ThresholdKind::count, false, true}});
    CHECK(th.rfind("lambda_star,lo,hi,kind,non_monotone\n", 0) == 0);
    CHECK(th.find("count") != std::string::npos);

    const RadialGrid g = RadialGrid::uniform(8);
    SolveReport s;
    s.state = StatePair{std::vector<double>(g.size(), 1.0), std::vector<double>(g.size(), 2.0)};
    const std::string csv = solutions_to_csv(g, {s});
    CHECK(csv.rfind("solution,r,v1,v2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(g.size()) + 1);
    const nlohmann::json j = solutions_to_json(g, {s});
    CHECK(j.dump().find("v1") != std::string::npos);
}

TEST_CASE("atomic writes create parents and replace content") {
    const fs::path dir = fs::temp_directory_path() / "ma_radial_io_test";
    fs::remove_all(dir);
    const fs::path file = dir / "nested" / "out.txt";
    write_atomic(file, "first");
    CHECK(slurp(file) == "first");
    write_atomic(file, "second");
    CHECK(slurp(file) == "second");
    int entries = 0;
    for ([[maybe_unused]] const auto& e : fs::directory_iterator(file.parent_path())) ++entries;
    CHECK(entries == 1);
    fs::remove_all(dir);
}
