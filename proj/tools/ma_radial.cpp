// Command-line front end: solve, classify, sweep, verify.
//
// Exit codes: 0 success, 2 invalid input, 3 no seed converged, 4 undetermined limits,
// 5 property failure.

#include "ma_radial/error.hpp"
#include "ma_radial/problem_io.hpp"
#include "ma_radial/regimes.hpp"
#include "ma_radial/solver.hpp"
#include "ma_radial/sweep.hpp"
#include "ma_radial/verify.hpp"

#include <CLI11.hpp>
#include <fmt/chrono.h>
#include <fmt/core.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ma_radial;

namespace {

enum Exit { ok = 0, invalid = 2, no_convergence = 3, undetermined = 4, property_failure = 5 };

std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    return fmt::format("{:%Y%m%dT%H%M%S}", std::chrono::floor<std::chrono::seconds>(now));
}

fs::path default_path(const std::string& stem, const std::string& ext) {
    return fs::path("out") / (stem + "-" + timestamp() + ext);
}

std::string num(double x) { return fmt::format("{:.10g}", x); }

/// "1,2,3", "lin:a:b:n" or "geom:a:b:n".
std::vector<double> parse_lambda_grid(const std::string& spec) {
    auto to_double = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size()) throw ValidationError("bad number '" + s + "' in --lambda-grid");
        return v;
    };
    std::vector<double> out;
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
        const std::string kind = spec.substr(0, colon);
        std::vector<std::string> parts;
        std::stringstream ss(spec.substr(colon + 1));
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if ((kind != "lin" && kind != "geom") || parts.size() != 3)
            throw ValidationError("--lambda-grid expects lin:a:b:n or geom:a:b:n");
        const double a = to_double(parts[0]), b = to_double(parts[1]);
        const int n = static_cast<int>(to_double(parts[2]));
        if (n < 1) throw ValidationError("--lambda-grid needs at least one point");
        if (kind == "geom" && !(a > 0.0 && b > 0.0)) throw ValidationError("geometric grid needs positive ends");
        for (int i = 0; i < n; ++i) {
            const double u = n == 1 ? 0.0 : double(i) / (n - 1);
            out.push_back(kind == "lin" ? a + (b - a) * u : a * std::pow(b / a, u));
        }
        return out;
    }
    std::stringstream ss(spec);
    for (std::string p; std::getline(ss, p, ',');)
        if (!p.empty()) out.push_back(to_double(p));
    if (out.empty()) throw ValidationError("--lambda-grid is empty");
    return out;
}

void print_warnings(const ProblemFile& pf) {
    for (const auto* nl : {&pf.f, &pf.g})
        for (const auto& w : nl->warnings()) fmt::print(stderr, "warning: {}\n", w);
}

int cmd_solve(const std::string& file, int grid_M, const std::string& out, const std::string& format) {
    ProblemFile pf = load_problem(file);
    if (grid_M > 0) pf.grid_intervals = grid_M;
    print_warnings(pf);
    const ProblemSpec p = pf.spec();
    const RadialGrid grid = pf.grid();
    const MultiStartResult ms = multi_start(p, grid, pf.solver);

    const std::string fmt_out = format.empty() ? "json" : format;
    const fs::path path = out.empty() ? default_path("solve", "." + fmt_out) : fs::path(out);
    write_atomic(path, fmt_out == "csv" ? solutions_to_csv(grid, ms.solutions)
                                        : solutions_to_json(grid, ms.solutions).dump(2) + "\n");

    if (format == "csv") {
        fmt::print("index,norm,alpha1,alpha2,method,residual_fixed_point,residual_oracle\n");
        for (std::size_t i = 0; i < ms.solutions.size(); ++i) {
            const auto& s = ms.solutions[i];
            fmt::print("{},{:.17g},{:.17g},{:.17g},{},{:.3e},{:.3e}\n", i, s.norm, s.state.v1.front(),
                       s.state.v2.front(), to_string(s.method), s.residual_fixed_point, s.residual_oracle);
        }
    } else if (format == "json") {
        std::cout << solutions_to_json(grid, ms.solutions).dump(2) << "\n";
    } else {
        fmt::print("N={} lambda={} grid M={} ({})\n", p.N, num(p.lambda), grid.intervals(), grid.rule_tag());
        fmt::print("{:>3}  {:>18}  {:>14}  {:>14}  {:>7}  {:>10}  {:>10}\n", "#", "norm", "v1(0)", "v2(0)",
                   "method", "res_T", "res_oracle");
        for (std::size_t i = 0; i < ms.solutions.size(); ++i) {
            const auto& s = ms.solutions[i];
            fmt::print("{:>3}  {:>18.10f}  {:>14.8g}  {:>14.8g}  {:>7}  {:>10.2e}  {:>10.2e}{}\n", i, s.norm,
                       s.state.v1.front(), s.state.v2.front(), to_string(s.method), s.residual_fixed_point,
                       s.residual_oracle, s.half_trivial ? "  (one component zero)" : "");
        }
        if (ms.solutions.empty()) fmt::print("no nontrivial solution found\n");
        fmt::print("written: {}\n", path.string());
    }

    const bool any_converged = std::any_of(ms.attempts.begin(), ms.attempts.end(),
                                           [](const SeedAttempt& a) { return a.converged; });
    if (!any_converged) {
        fmt::print(stderr, "no seed converged\n");
        return no_convergence;
    }
    return ok;
}

std::string window_text(const PartWindow& w) {
    auto end = [](double x) { return std::isinf(x) ? std::string("inf") : num(x); };
    return fmt::format("({}, {})", end(w.lo), end(w.hi));
}

int cmd_classify(const std::string& file, const std::string& format) {
    const ProblemFile pf = load_problem(file);
    print_warnings(pf);
    const ProblemSpec p(pf.N, pf.lambda.value_or(1.0), pf.f, pf.g);
    RegimeReport rep;
    try {
        rep = classify(p);
    } catch (const UndeterminedLimit& e) {
        fmt::print(stderr, "classification refused: {}\n", e.what());
        return undetermined;
    }
    if (format == "json") {
        std::cout << to_json(rep).dump(2) << "\n";
        return ok;
    }
    fmt::print("f0={}  g0={}  f_inf={}  g_inf={}  (N={})\n", rep.f0.describe(), rep.g0.describe(),
               rep.f_inf.describe(), rep.g_inf.describe(), p.N);
    if (!rep.positive) fmt::print("f or g vanishes somewhere on x > 0: T2 parts not considered\n");
    if (rep.windows.empty()) fmt::print("no regime applies\n");
    for (const auto& w : rep.windows) {
        std::string lam0 = w.lambda0 ? " lambda0=" + num(*w.lambda0) : std::string();
        fmt::print("{:<4} window {:<28} {}{}  [{}]\n", to_string(w.part), window_text(w), w.guarantee, lam0,
                   to_string(w.provenance));
    }
    return ok;
}

int cmd_sweep(const std::string& file, const std::string& grid_spec, bool bisect, double tol_lambda,
              const std::string& out, const std::string& format) {
    const ProblemFile pf = load_problem(file);
    print_warnings(pf);
    const std::vector<double> lambdas = parse_lambda_grid(grid_spec);
    SweepOptions opts;
    opts.bisect = bisect;
    opts.tol_lambda = tol_lambda;
    const SweepReport rep = lambda_sweep(pf.problem_template(), lambdas, pf.grid(), pf.solver, opts);

    const fs::path dir = out.empty() ? fs::path("out") / ("sweep-" + timestamp()) : fs::path(out);
    write_atomic(dir / "sweep.csv", sweep_to_csv(rep));
    write_atomic(dir / "sweep.json", to_json(rep).dump(2) + "\n");
    write_atomic(dir / "thresholds.csv", thresholds_to_csv(rep.thresholds));

    if (format == "csv") {
        std::cout << sweep_to_csv(rep);
    } else if (format == "json") {
        std::cout << to_json(rep).dump(2) << "\n";
    } else {
        fmt::print("{:>14}  {:>12}  norms\n", "lambda", "count");
        for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
            std::string norms;
            for (const auto& s : rep.solutions[i]) norms += (norms.empty() ? "" : " ") + num(s.norm);
            fmt::print("{:>14}  {:>12}  {}\n", num(rep.lambdas[i]),
                       rep.counts[i] ? std::to_string(*rep.counts[i]) : "undetermined", norms);
            if (!rep.notes[i].empty()) fmt::print("{:>14}  note: {}\n", "", rep.notes[i]);
        }
        for (const auto& t : rep.thresholds)
            fmt::print("threshold ({}) lambda* = {} in [{}, {}]{}\n", to_string(t.kind), num(t.lambda_star), num(t.lo),
                       num(t.hi), t.non_monotone ? " (non-monotone counts)" : "");
        for (const auto& v : rep.violations) fmt::print("VIOLATION: {}\n", v);
        fmt::print("written: {}\n", dir.string());
    }
    const bool all_undetermined = std::none_of(rep.counts.begin(), rep.counts.end(),
                                               [](const auto& c) { return c.has_value(); });
    return all_undetermined ? no_convergence : ok;
}

int cmd_verify(const std::string& suite, int trials, std::uint64_t seed, int grid_M, const std::string& format) {
    const VerifyReport rep = run_suite(suite_from_string(suite), trials, seed, grid_M > 0 ? grid_M : 512);
    if (format == "json") {
        nlohmann::json props = nlohmann::json::array();
        for (const auto& p : rep.properties)
            props.push_back({{"name", p.name}, {"passed", p.passed()}, {"checked", p.checked},
                             {"failures", p.failures},
                             {"worst_margin", std::isfinite(p.worst_margin) ? nlohmann::json(p.worst_margin)
                                                                            : nlohmann::json("inf")},
                             {"worst_case", p.worst_case}});
        std::cout << nlohmann::json{{"suite", to_string(rep.suite)}, {"trials", rep.trials}, {"seed", rep.seed},
                                    {"passed", rep.passed()}, {"properties", props}}
                         .dump(2)
                  << "\n";
    } else {
        fmt::print("suite {} trials {} seed {} ({:.2f} s)\n", to_string(rep.suite), rep.trials, rep.seed, rep.seconds);
        for (const auto& p : rep.properties) {
            fmt::print("{:<4} {:<28} checked {:>4}  worst margin {:>11.3e}\n", p.passed() ? "PASS" : "FAIL", p.name,
                       p.checked, p.worst_margin);
            if (!p.passed()) fmt::print("     worst case: {}\n", p.worst_case);
        }
    }
    return rep.passed() ? ok : property_failure;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Radial solutions of a coupled Monge-Ampere system"};
    app.require_subcommand(1);

    std::string file, out, format, grid_spec, suite = "lemmas";
    int grid_M = 0, trials = 100;
    std::uint64_t seed = 1;
    bool bisect = false;
    double tol_lambda = 1e-4;
    const auto formats = CLI::IsMember({"csv", "json"});

    auto* solve = app.add_subcommand("solve", "Find solutions for the problem's lambda");
    solve->add_option("problem", file, "Problem file (JSON)")->required();
    solve->add_option("--grid", grid_M, "Number of radial intervals M")->check(CLI::PositiveNumber);
    solve->add_option("--out", out, "Solution file (default out/solve-<time>.<format>)");
    solve->add_option("--format", format, "Machine-readable stdout: csv or json")->check(formats);

    auto* cls = app.add_subcommand("classify", "Applicable existence regimes and lambda windows");
    cls->add_option("problem", file, "Problem file (JSON)")->required();
    cls->add_option("--format", format, "json for machine-readable output")->check(CLI::IsMember({"json"}));

    auto* sweep = app.add_subcommand("sweep", "Solution counts over a lambda grid");
    sweep->add_option("problem", file, "Problem file (JSON)")->required();
    sweep->add_option("--lambda-grid", grid_spec, "1,2,3 | lin:a:b:n | geom:a:b:n")->required();
    sweep->add_flag("--bisect", bisect, "Refine detected thresholds by bisection");
    sweep->add_option("--tol-lambda", tol_lambda, "Bisection bracket width")->check(CLI::PositiveNumber);
    sweep->add_option("--out", out, "Output directory (default out/sweep-<time>)");
    sweep->add_option("--format", format, "Machine-readable stdout: csv or json")->check(formats);

    auto* verify = app.add_subcommand("verify", "Randomized property suites");
    verify->add_option("--suite", suite, "lemmas, operator or oracle")
        ->check(CLI::IsMember({"lemmas", "operator", "oracle"}));
    verify->add_option("--trials", trials, "Number of random trials");
    verify->add_option("--seed", seed, "Random seed");
    verify->add_option("--grid", grid_M, "Number of radial intervals M")->check(CLI::PositiveNumber);
    verify->add_option("--format", format, "json for machine-readable output")->check(CLI::IsMember({"json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return invalid;
    }

    try {
        if (*solve) return cmd_solve(file, grid_M, out, format);
        if (*cls) return cmd_classify(file, format);
        if (*sweep) return cmd_sweep(file, grid_spec, bisect, tol_lambda, out, format);
        if (*verify) return cmd_verify(suite, trials, seed, grid_M, format);
    } catch (const UndeterminedLimit& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return undetermined;
    } catch (const Error& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return invalid;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return invalid;
    }
    return invalid;
}
