#include "ma_radial/problem_io.hpp"

#include "ma_radial/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <unistd.h>

namespace ma_radial {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ValidationError(where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.contains(key)) throw ValidationError("unknown key '" + key + "' in " + where);
}

ExtendedLimit parse_declared(const json& j, const std::string& where) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "zero") return ExtendedLimit::zero();
        if (s == "inf") return ExtendedLimit::infinite();
        throw ValidationError(where + " must be \"zero\", \"inf\" or a number");
    }
    if (j.is_number()) {
        const double v = j.get<double>();
        if (!(v >= 0.0) || !std::isfinite(v)) throw ValidationError(where + " must be a nonnegative number");
        return v == 0.0 ? ExtendedLimit::zero() : ExtendedLimit::finite(v);
    }
    throw ValidationError(where + " must be \"zero\", \"inf\" or a number");
}

Nonlinearity parse_nonlinearity(const json& j, const std::string& where) {
    require_keys(j, {"family", "params", "expr", "limits"}, where);
    const bool has_family = j.contains("family");
    const bool has_expr = j.contains("expr");
    if (has_family == has_expr) throw ValidationError(where + " needs exactly one of 'family' or 'expr'");
    Nonlinearity nl = Nonlinearity::constant(1.0);
    try {
        if (has_family) {
            if (has_expr || !j.at("family").is_string()) throw ValidationError(where + ".family must be a string");
            std::vector<double> params;
            if (j.contains("params")) params = j.at("params").get<std::vector<double>>();
            nl = Nonlinearity::builtin(j.at("family").get<std::string>(), params);
        } else {
            if (j.contains("params")) throw ValidationError(where + ".params is only valid with 'family'");
            if (!j.at("expr").is_string()) throw ValidationError(where + ".expr must be a string");
            nl = Nonlinearity::parse(j.at("expr").get<std::string>());
        }
    } catch (const json::exception& e) {
        throw ValidationError(where + ": " + e.what());
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw ValidationError(where + ": " + e.what());
    }
    if (j.contains("limits")) {
        const json& lj = j.at("limits");
        require_keys(lj, {"q0", "qinf"}, where + ".limits");
        DeclaredLimits lim;
        if (lj.contains("q0")) lim.q0 = parse_declared(lj.at("q0"), where + ".limits.q0");
        if (lj.contains("qinf")) lim.qinf = parse_declared(lj.at("qinf"), where + ".limits.qinf");
        nl = nl.with_limits(lim);
    }
    return nl;
}

template <class T>
void override_field(const json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

void parse_solver(const json& j, SolverConfig& cfg) {
    require_keys(j, {"tol_residual", "max_iter", "damping", "seed_radii", "dedupe_tol", "alpha_box",
                     "shoot_seeds_per_axis", "shoot_coarse_intervals", "newton_max_iter",
                     "shell_extensions", "singular_tol", "oracle_h2_coeff"},
                 "solver");
    override_field(j, "tol_residual", cfg.tol_residual);
    override_field(j, "max_iter", cfg.max_iter);
    override_field(j, "damping", cfg.damping);
    override_field(j, "seed_radii", cfg.seed_radii);
    override_field(j, "dedupe_tol", cfg.dedupe_tol);
    override_field(j, "shoot_seeds_per_axis", cfg.shoot_seeds_per_axis);
    override_field(j, "shoot_coarse_intervals", cfg.shoot_coarse_intervals);
    override_field(j, "newton_max_iter", cfg.newton_max_iter);
    override_field(j, "shell_extensions", cfg.shell_extensions);
    override_field(j, "singular_tol", cfg.singular_tol);
    override_field(j, "oracle_h2_coeff", cfg.oracle_h2_coeff);
    if (j.contains("alpha_box")) {
        const json& b = j.at("alpha_box");
        require_keys(b, {"lo", "hi", "lo1", "hi1", "lo2", "hi2"}, "solver.alpha_box");
        if (b.contains("lo")) cfg.alpha_box.lo1 = cfg.alpha_box.lo2 = b.at("lo").get<double>();
        if (b.contains("hi")) cfg.alpha_box.hi1 = cfg.alpha_box.hi2 = b.at("hi").get<double>();
        override_field(b, "lo1", cfg.alpha_box.lo1);
        override_field(b, "hi1", cfg.alpha_box.hi1);
        override_field(b, "lo2", cfg.alpha_box.lo2);
        override_field(b, "hi2", cfg.alpha_box.hi2);
    }
}

json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return "nan";
    return x > 0 ? "inf" : "-inf";
}

double number_from(const json& j) {
    if (j.is_number()) return j.get<double>();
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw ValidationError("expected a number, got '" + s + "'");
}

LimitKind kind_from(const std::string& s) {
    for (auto k : {LimitKind::zero, LimitKind::finite, LimitKind::infinite, LimitKind::undetermined})
        if (s == to_string(k)) return k;
    throw ValidationError("unknown limit kind '" + s + "'");
}

Provenance provenance_from(const std::string& s) {
    for (auto p : {Provenance::unconditional, Provenance::certificate, Provenance::grid_constant,
                   Provenance::unavailable})
        if (s == to_string(p)) return p;
    throw ValidationError("unknown provenance '" + s + "'");
}

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_double(const std::string& s, const std::string& where) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size() || s.empty()) throw ValidationError("bad number '" + s + "' in " + where);
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

} // namespace

ProblemSpec ProblemFile::spec() const {
    if (!lambda) throw ValidationError("problem file has no 'lambda'");
    return ProblemSpec(N, *lambda, f, g);
}

ProblemFile parse_problem(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        // The library message already states line and column.
        throw ValidationError(std::string("malformed JSON: ") + e.what());
    }
    require_keys(j, {"N", "lambda", "f", "g", "grid", "solver"}, "problem file");
    ProblemFile pf;
    try {
        if (!j.contains("N") || !j.at("N").is_number_integer()) throw ValidationError("'N' must be an integer");
        pf.N = j.at("N").get<int>();
        if (pf.N < 1) throw ValidationError("'N' must be >= 1");
        if (j.contains("lambda")) {
            if (!j.at("lambda").is_number()) throw ValidationError("'lambda' must be a number");
            const double lam = j.at("lambda").get<double>();
            if (!(lam > 0.0) || !std::isfinite(lam)) throw ValidationError("'lambda' must be > 0");
            pf.lambda = lam;
        }
        if (!j.contains("f") || !j.contains("g")) throw ValidationError("'f' and 'g' are required");
        pf.f = parse_nonlinearity(j.at("f"), "f");
        pf.g = parse_nonlinearity(j.at("g"), "g");
        if (j.contains("grid")) {
            const json& gj = j.at("grid");
            require_keys(gj, {"M"}, "grid");
            if (gj.contains("M")) pf.grid_intervals = gj.at("M").get<int>();
            if (pf.grid_intervals < 8) throw ValidationError("grid.M must be >= 8");
        }
        if (j.contains("solver")) parse_solver(j.at("solver"), pf.solver);
        pf.solver.validate();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("problem file: ") + e.what());
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
    return pf;
}

ProblemFile load_problem(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open problem file " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return parse_problem(os.str());
}

json to_json(const ExtendedLimit& lim) {
    json ev = json::array();
    for (const auto& [x, q] : lim.evidence) ev.push_back({number(x), number(q)});
    return {{"kind", to_string(lim.kind)}, {"value", number(lim.value)}, {"declared", lim.declared},
            {"evidence", ev}};
}

ExtendedLimit limit_from_json(const json& j) {
    ExtendedLimit lim;
    lim.kind = kind_from(j.at("kind").get<std::string>());
    lim.value = number_from(j.at("value"));
    lim.declared = j.at("declared").get<bool>();
    for (const auto& e : j.at("evidence")) lim.evidence.emplace_back(number_from(e.at(0)), number_from(e.at(1)));
    return lim;
}

json to_json(const RegimeReport& rep) {
    json parts = json::array();
    for (Part p : rep.applicable_parts) parts.push_back(to_string(p));
    json windows = json::array();
    for (const auto& w : rep.windows) {
        windows.push_back({{"part", to_string(w.part)},
                           {"lo", number(w.lo)},
                           {"hi", number(w.hi)},
                           {"lambda0", w.lambda0 ? number(*w.lambda0) : json(nullptr)},
                           {"min_count", w.min_count},
                           {"nonexistence", w.nonexistence},
                           {"provenance", to_string(w.provenance)},
                           {"guarantee", w.guarantee}});
    }
    return {{"limits", {{"f0", to_json(rep.f0)}, {"g0", to_json(rep.g0)},
                        {"f_inf", to_json(rep.f_inf)}, {"g_inf", to_json(rep.g_inf)}}},
            {"positive", rep.positive},
            {"applicable_parts", parts},
            {"windows", windows}};
}

RegimeReport regime_from_json(const json& j) {
    RegimeReport rep;
    const json& l = j.at("limits");
    rep.f0 = limit_from_json(l.at("f0"));
    rep.g0 = limit_from_json(l.at("g0"));
    rep.f_inf = limit_from_json(l.at("f_inf"));
    rep.g_inf = limit_from_json(l.at("g_inf"));
    rep.positive = j.at("positive").get<bool>();
    for (const auto& p : j.at("applicable_parts")) rep.applicable_parts.push_back(part_from_string(p.get<std::string>()));
    for (const auto& w : j.at("windows")) {
        PartWindow pw;
        pw.part = part_from_string(w.at("part").get<std::string>());
        pw.lo = number_from(w.at("lo"));
        pw.hi = number_from(w.at("hi"));
        if (!w.at("lambda0").is_null()) pw.lambda0 = number_from(w.at("lambda0"));
        pw.min_count = w.at("min_count").get<int>();
        pw.nonexistence = w.at("nonexistence").get<bool>();
        pw.provenance = provenance_from(w.at("provenance").get<std::string>());
        pw.guarantee = w.at("guarantee").get<std::string>();
        rep.windows.push_back(std::move(pw));
    }
    return rep;
}

json to_json(const SweepReport& rep) {
    json points = json::array();
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
        json sols = json::array();
        for (const auto& s : rep.solutions[i])
            sols.push_back({{"norm", number(s.norm)}, {"alpha1", number(s.alpha1)},
                            {"alpha2", number(s.alpha2)}, {"half_trivial", s.half_trivial}});
        points.push_back({{"lambda", number(rep.lambdas[i])},
                          {"count", rep.counts[i] ? json(*rep.counts[i]) : json("undetermined")},
                          {"solutions", sols},
                          {"note", i < rep.notes.size() ? rep.notes[i] : std::string()}});
    }
    json th = json::array();
    for (const auto& t : rep.thresholds)
        th.push_back({{"lambda_star", number(t.lambda_star)}, {"lo", number(t.lo)}, {"hi", number(t.hi)},
                      {"kind", to_string(t.kind)}, {"non_monotone", t.non_monotone}, {"refined", t.refined}});
    return {{"points", points},
            {"thresholds", th},
            {"regime", rep.regime ? to_json(*rep.regime) : json(nullptr)},
            {"violations", rep.violations}};
}

SweepReport sweep_from_json(const json& j) {
    SweepReport rep;
    try {
        for (const auto& p : j.at("points")) {
            rep.lambdas.push_back(number_from(p.at("lambda")));
            const json& c = p.at("count");
            rep.counts.push_back(c.is_number_integer() ? std::optional<int>(c.get<int>()) : std::nullopt);
            std::vector<SolutionSummary> sols;
            for (const auto& s : p.at("solutions"))
                sols.push_back({number_from(s.at("norm")), number_from(s.at("alpha1")),
                                number_from(s.at("alpha2")), s.at("half_trivial").get<bool>()});
            rep.solutions.push_back(std::move(sols));
            rep.notes.push_back(p.at("note").get<std::string>());
        }
        for (const auto& t : j.at("thresholds")) {
            Threshold th;
            th.lambda_star = number_from(t.at("lambda_star"));
            th.lo = number_from(t.at("lo"));
            th.hi = number_from(t.at("hi"));
            th.kind = t.at("kind").get<std::string>() == "count" ? ThresholdKind::count : ThresholdKind::linearization;
            th.non_monotone = t.at("non_monotone").get<bool>();
            th.refined = t.at("refined").get<bool>();
            rep.thresholds.push_back(th);
        }
        if (!j.at("regime").is_null()) rep.regime = regime_from_json(j.at("regime"));
        rep.violations = j.at("violations").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("sweep report: ") + e.what());
    }
    return rep;
}

std::string sweep_to_csv(const SweepReport& rep) {
    std::string out = "lambda,count,norms\n";
    for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
        out += g17(rep.lambdas[i]);
        out += ',';
        out += rep.counts[i] ? std::to_string(*rep.counts[i]) : "undetermined";
        out += ',';
        for (std::size_t k = 0; k < rep.solutions[i].size(); ++k) {
            if (k > 0) out += ';';
            out += g17(rep.solutions[i][k].norm);
        }
        out += '\n';
    }
    return out;
}

SweepReport sweep_from_csv(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line) || line != "lambda,count,norms")
        throw ValidationError("sweep CSV must start with the header lambda,count,norms");
    SweepReport rep;
    int row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cols = split(line, ',');
        const std::string where = "CSV row " + std::to_string(row);
        if (cols.size() != 3) throw ValidationError(where + " needs 3 columns");
        rep.lambdas.push_back(parse_double(cols[0], where));
        if (cols[1] == "undetermined") rep.counts.emplace_back();
        else rep.counts.emplace_back(static_cast<int>(parse_double(cols[1], where)));
        std::vector<SolutionSummary> sols;
        if (!cols[2].empty())
            for (const auto& n : split(cols[2], ';')) sols.push_back({parse_double(n, where), 0.0, 0.0, false});
        rep.solutions.push_back(std::move(sols));
        rep.notes.emplace_back();
    }
    return rep;
}

std::string thresholds_to_csv(const std::vector<Threshold>& thresholds) {
    std::string out = "lambda_star,lo,hi,kind,non_monotone\n";
    for (const auto& t : thresholds)
        out += g17(t.lambda_star) + ',' + g17(t.lo) + ',' + g17(t.hi) + ',' + to_string(t.kind) + ',' +
               (t.non_monotone ? "true" : "false") + '\n';
    return out;
}

std::string solutions_to_csv(const RadialGrid& grid, const std::vector<SolveReport>& sols) {
    std::string out = "solution,r,v1,v2\n";
    for (std::size_t k = 0; k < sols.size(); ++k)
        for (std::size_t i = 0; i < grid.size(); ++i)
            out += std::to_string(k) + ',' + g17(grid[i]) + ',' + g17(sols[k].state.v1[i]) + ',' +
                   g17(sols[k].state.v2[i]) + '\n';
    return out;
}

json solutions_to_json(const RadialGrid& grid, const std::vector<SolveReport>& sols) {
    json arr = json::array();
    for (const auto& s : sols) {
        arr.push_back({{"norm", number(s.norm)},
                       {"alpha1", number(s.state.v1.front())},
                       {"alpha2", number(s.state.v2.front())},
                       {"method", to_string(s.method)},
                       {"iterations", s.iterations},
                       {"residual_fixed_point", number(s.residual_fixed_point)},
                       {"residual_oracle", number(s.residual_oracle)},
                       {"half_trivial", s.half_trivial},
                       {"v1", s.state.v1},
                       {"v2", s.state.v2}});
    }
    return {{"nodes", std::vector<double>(grid.nodes().begin(), grid.nodes().end())},
            {"rule", grid.rule_tag()},
            {"solutions", arr}};
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace ma_radial
