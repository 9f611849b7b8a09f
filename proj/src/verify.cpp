#include "ma_radial/verify.hpp"

#include "ma_radial/error.hpp"
#include "ma_radial/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace ma_radial {

namespace {

class Random {
public:
    explicit Random(std::uint64_t seed) : eng_(seed) {}
    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(eng_); }
    double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(eng_); }

private:
    std::mt19937_64 eng_;
};

class Tally {
public:
    explicit Tally(std::string name) { r_.name = std::move(name); r_.worst_margin = std::numeric_limits<double>::infinity(); }

    void record(double margin, const std::string& context) {
        ++r_.checked;
        if (!(margin >= 0.0)) ++r_.failures;
        if (!(margin >= r_.worst_margin)) {
            r_.worst_margin = margin;
            r_.worst_case = context;
        }
    }
    PropertyResult result() const { return r_; }

private:
    PropertyResult r_;
};

Nonlinearity random_builtin(Random& rng) {
    switch (rng.integer(0, 4)) {
    case 0: return Nonlinearity::power(rng.uniform(0.5, 3.0));
    case 1: return Nonlinearity::constant(rng.uniform(0.1, 2.0));
    case 2: return Nonlinearity::builtin("linear", {rng.uniform(0.1, 2.0)});
    case 3: return Nonlinearity::ratio_bump();
    default: return Nonlinearity::exp_minus_one();
    }
}

ProblemSpec random_problem(Random& rng) {
    const int N = rng.integer(1, 3);
    return ProblemSpec(N, rng.uniform(0.1, 10.0), random_builtin(rng), random_builtin(rng));
}

// One in-cone component of sup norm `amp`: concave profiles or a rough in-cone sample.
std::vector<double> random_component(const RadialGrid& grid, Random& rng, double amp) {
    std::vector<double> v(grid.size());
    const int shape = rng.integer(0, 3);
    const double p = rng.uniform(1.0, 4.0);
    const double c = rng.uniform(0.0, 0.9);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        switch (shape) {
        case 0: v[i] = 1.0 - std::pow(t, p); break;
        case 1: v[i] = std::cos(0.5 * M_PI * t); break;
        case 2: v[i] = std::min(1.0, (1.0 - t) / (1.0 - c)); break;
        default: v[i] = (t >= 0.25 && t <= 0.75) ? rng.uniform(0.25, 1.0) : rng.uniform(0.0, 1.0);
        }
    }
    const double m = sup_norm(v);
    for (double& x : v) x *= amp / m;
    return v;
}

StatePair random_state(const RadialGrid& grid, Random& rng, double norm) {
    const double share = rng.uniform(0.0, 1.0);
    StatePair s;
    s.v1 = random_component(grid, rng, norm * share);
    s.v2 = random_component(grid, rng, norm * (1.0 - share));
    if (share == 0.0) s.v1.assign(grid.size(), 0.0);
    return s;
}

StatePair smooth_state(const RadialGrid& grid, double a, double b, double p) {
    StatePair s = StatePair::zeros(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.v1[i] = a * (1.0 - std::pow(grid[i], p));
        s.v2[i] = b * std::cos(0.5 * M_PI * grid[i]);
    }
    return s;
}

std::string describe(const ProblemSpec& p) {
    std::ostringstream os;
    os << "N=" << p.N << " lambda=" << p.lambda << " f=" << p.f.label() << " g=" << p.g.label();
    return os.str();
}

double amplitude(const StatePair& s) { return std::max(sup_norm(s.v1), sup_norm(s.v2)); }

// Largest increase between consecutive nodes (<= 0 for nonincreasing output).
double max_increase(const StatePair& s) {
    double up = -std::numeric_limits<double>::infinity();
    for (const auto* v : {&s.v1, &s.v2})
        for (std::size_t i = 1; i < v->size(); ++i) up = std::max(up, (*v)[i] - (*v)[i - 1]);
    return up;
}

// Sup difference between a grid and its halved refinement at shared nodes.
double refinement_change(const StatePair& fine, const StatePair& coarse) {
    double d = 0.0;
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        d = std::max(d, std::fabs(fine.v1[2 * i] - coarse.v1[i]));
        d = std::max(d, std::fabs(fine.v2[2 * i] - coarse.v2[i]));
    }
    return d;
}

void lemmas_suite(VerifyReport& rep, int trials, Random& rng, int M) {
    const RadialGrid grid = RadialGrid::uniform(M);
    Tally cone("cone_preservation"), mono("monotone_output"), edge("boundary_value"),
        concave("concavity_bound"), lower("weak_lower_bound"), upper("weak_upper_bound"),
        strong("strong_lower_bound"), env_mono("envelope_monotone"), env_dom("envelope_dominance");
    for (int k = 0; k < trials; ++k) {
        const ProblemSpec p = random_problem(rng);
        const std::string ctx = "trial " + std::to_string(k) + ": " + describe(p);
        const double r = rng.log_uniform(0.01, 10.0);
        const StatePair s = random_state(grid, rng, r);
        const StatePair Ts = apply_T(p, grid, s);
        const double scale = std::max(1.0, amplitude(Ts));

        const ConeReport cr = cone_check(Ts, grid);
        cone.record(cr.worst_margin + 1e-9 * scale, ctx);
        mono.record(-max_increase(Ts), ctx);
        edge.record(Ts.v1.back() == 0.0 && Ts.v2.back() == 0.0 ? 0.0 : -1.0, ctx);
        concave.record(cr.concavity_margin + 1e-9 * scale, ctx);

        const WeakBounds wb = weak_bounds(p, pair_norm(s));
        const double norm_T = pair_norm(Ts);
        const double tol = 1e-6 * std::max(1.0, wb.upper);
        lower.record(norm_T - (wb.lower - tol), ctx);
        upper.record(wb.upper + tol - norm_T, ctx);

        // eta from f(v2) >= (eta v2)^N on the nodes of [1/4, 3/4].
        double eta = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (grid[i] < 0.25 || grid[i] > 0.75 || !(s.v2[i] > 0.0)) continue;
            eta = std::min(eta, std::pow(p.f(s.v2[i]), 1.0 / p.N) / s.v2[i]);
        }
        if (std::isfinite(eta) && sup_norm(s.v2) > 0.0) {
            const double bound = std::pow(p.lambda, 1.0 / p.N) * gamma_constant(p.N) * eta * sup_norm(s.v2);
            strong.record(norm_T - bound + 1e-6 * std::max(1.0, bound), ctx);
        }

        const double t2 = rng.log_uniform(1e-3, 20.0);
        const double t1 = t2 * rng.uniform(0.0, 1.0);
        const double e1 = envelope(p.f, t1, 256), e2 = envelope(p.f, t2, 256);
        env_mono.record(e2 - e1 + 1e-12 * std::max(1.0, e2), ctx);
        double worst = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 256; ++i) worst = std::min(worst, e2 - p.f(t2 * i / 256.0));
        env_dom.record(worst, ctx);
    }
    for (const auto* t : {&cone, &mono, &edge, &concave, &lower, &upper, &strong, &env_mono, &env_dom})
        rep.properties.push_back(t->result());
}

void operator_suite(VerifyReport& rep, int trials, Random& rng, int M) {
    const RadialGrid grid = RadialGrid::uniform(M);
    Tally homog("lambda_homogeneity"), order("mesh_halving_order"), order_plain("mesh_halving_order_plain"),
        closed("closed_form_constant"), zero("zero_fixed_point");
    for (int k = 0; k < trials; ++k) {
        const ProblemSpec p = random_problem(rng);
        const std::string ctx = "trial " + std::to_string(k) + ": " + describe(p);

        const StatePair s = random_state(grid, rng, rng.log_uniform(0.01, 10.0));
        const double c = rng.uniform(0.5, 2.0);
        const StatePair a = apply_T(p, grid, s);
        const StatePair b = apply_T(p.with_lambda(std::pow(c, p.N) * p.lambda), grid, s);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::fabs(b.v1[i] - c * a.v1[i]));
            err = std::max(err, std::fabs(b.v2[i] - c * a.v2[i]));
        }
        homog.record(1e-12 * std::max(1.0, amplitude(b)) - err, ctx);

        const double amp1 = rng.uniform(0.2, 2.0), amp2 = rng.uniform(0.2, 2.0), pw = rng.uniform(1.0, 4.0);
        for (const bool plain : {false, true}) {
            const QuadratureRule rule = plain ? QuadratureRule::plain() : QuadratureRule{};
            const RadialGrid g1 = RadialGrid::uniform(256, rule), g2 = RadialGrid::uniform(512, rule),
                             g3 = RadialGrid::uniform(1024, rule);
            const double d1 = refinement_change(apply_T(p, g2, smooth_state(g2, amp1, amp2, pw)),
                                                apply_T(p, g1, smooth_state(g1, amp1, amp2, pw)));
            const StatePair fine = apply_T(p, g3, smooth_state(g3, amp1, amp2, pw));
            const double d2 = refinement_change(fine, apply_T(p, g2, smooth_state(g2, amp1, amp2, pw)));
            // Exact rules (constant f, g) leave only roundoff, where the ratio carries no order.
            const bool exact = d1 <= 1e-12 * std::max(1.0, amplitude(fine));
            (plain ? order_plain : order).record(exact ? 0.3 : 0.3 - d2 / d1, ctx);
        }

        const double cst = rng.uniform(0.1, 3.0);
        const ProblemSpec pc(p.N, p.lambda, Nonlinearity::constant(cst), Nonlinearity::constant(cst));
        const StatePair Tc = apply_T(pc, grid, s);
        const double peak = 0.5 * std::pow(p.lambda * cst, 1.0 / p.N);
        double cerr = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double exact = peak * (1.0 - grid[i] * grid[i]);
            cerr = std::max({cerr, std::fabs(Tc.v1[i] - exact), std::fabs(Tc.v2[i] - exact)});
        }
        closed.record(1e-10 * std::max(1.0, peak) - cerr, ctx);

        if (p.f.raw(0.0) == 0.0 && p.g.raw(0.0) == 0.0) {
            const StatePair Tz = apply_T(p, grid, StatePair::zeros(grid.size()));
            zero.record(-amplitude(Tz), ctx);
        }
    }
    for (const auto* t : {&homog, &order, &order_plain, &closed, &zero}) rep.properties.push_back(t->result());
}

void oracle_suite(VerifyReport& rep, int trials, Random& rng, int M) {
    const RadialGrid grid = RadialGrid::uniform(M);
    const double h = grid.max_spacing();
    Tally exists("solution_found"), self("picard_self_reproduction"), embed("picard_embeds_in_shoot"),
        fixed("shoot_fixed_point_residual"), concave("solution_concavity"), edge("solution_boundary"),
        separated("dedupe_separation");
    SolverConfig cfg;
    cfg.shoot_seeds_per_axis = 8;
    cfg.seed_radii = {0.25, 1.0, 8.0, 32.0};
    cfg.shell_extensions = 4;
    for (int k = 0; k < trials; ++k) {
        const int kind = rng.integer(0, 2);
        ProblemSpec p = kind == 0
            ? ProblemSpec(rng.integer(1, 2), rng.uniform(0.5, 5.0), Nonlinearity::constant(rng.uniform(0.5, 2.0)),
                          Nonlinearity::constant(rng.uniform(0.5, 2.0)))
            : kind == 1 ? ProblemSpec(1, rng.uniform(0.5, 5.0), Nonlinearity::power(rng.uniform(2.0, 3.0)),
                                      Nonlinearity::power(rng.uniform(2.0, 3.0)))
                        : ProblemSpec(1, rng.uniform(300.0, 800.0), Nonlinearity::ratio_bump(),
                                      Nonlinearity::ratio_bump());
        const std::string ctx = "trial " + std::to_string(k) + ": " + describe(p);

        const ShootResult shoot = boundary_shoot(p, cfg.alpha_box, cfg, grid);
        std::vector<const SolveReport*> roots;
        for (const auto& r : shoot.roots)
            if (!r.trivial) roots.push_back(&r);
        exists.record(roots.empty() ? -1.0 : 0.0, ctx);
        for (const SolveReport* r : roots)
            fixed.record(1e-6 * std::max(1.0, amplitude(r->state)) - r->residual_fixed_point, ctx);

        const MultiStartResult ms = multi_start(p, grid, cfg);
        for (const auto& s : ms.solutions) {
            const double amp = amplitude(s.state);
            self.record(std::max(1e-7, cfg.oracle_h2_coeff * h * h) * std::max(1.0, amp) - s.residual_oracle, ctx);
            double best = std::numeric_limits<double>::infinity();
            for (const SolveReport* r : roots) best = std::min(best, pair_distance(r->state, s.state));
            embed.record(cfg.dedupe_tol * std::max(1.0, amp) - best, ctx);
        }
        for (std::size_t i = 0; i < ms.solutions.size(); ++i)
            for (std::size_t j = i + 1; j < ms.solutions.size(); ++j)
                separated.record(pair_distance(ms.solutions[i].state, ms.solutions[j].state) - cfg.dedupe_tol, ctx);

        std::vector<const SolveReport*> all = roots;
        for (const auto& s : ms.solutions) all.push_back(&s);
        for (const SolveReport* s : all) {
            const double amp = amplitude(s->state);
            double bend = -std::numeric_limits<double>::infinity();
            for (const auto* v : {&s->state.v1, &s->state.v2})
                for (std::size_t i = 1; i + 1 < v->size(); ++i)
                    bend = std::max(bend, (*v)[i + 1] - 2.0 * (*v)[i] + (*v)[i - 1]);
            concave.record(1e-9 * std::max(1.0, amp) - bend, ctx);
            const double slope0 = std::max(std::fabs(s->state.v1[1] - s->state.v1[0]),
                                           std::fabs(s->state.v2[1] - s->state.v2[0]));
            const bool zero_end = s->state.v1.back() == 0.0 && s->state.v2.back() == 0.0;
            edge.record(zero_end ? h * std::max(1.0, amp) - slope0 : -1.0, ctx);
        }
    }
    for (const auto* t : {&exists, &self, &embed, &fixed, &concave, &edge, &separated})
        rep.properties.push_back(t->result());
}

} // namespace

const char* to_string(Suite s) {
    switch (s) {
    case Suite::lemmas: return "lemmas";
    case Suite::operator_: return "operator";
    case Suite::oracle: return "oracle";
    }
    return "?";
}

Suite suite_from_string(const std::string& name) {
    if (name == "lemmas") return Suite::lemmas;
    if (name == "operator") return Suite::operator_;
    if (name == "oracle") return Suite::oracle;
    throw DomainError("unknown suite '" + name + "' (expected lemmas, operator or oracle)");
}

bool VerifyReport::passed() const {
    return std::all_of(properties.begin(), properties.end(), [](const auto& p) { return p.passed(); });
}

VerifyReport run_suite(Suite suite, int trials, std::uint64_t seed, int grid_intervals) {
    if (trials < 1) throw DomainError("trials must be >= 1");
    const auto start = std::chrono::steady_clock::now();
    VerifyReport rep;
    rep.suite = suite;
    rep.trials = trials;
    rep.seed = seed;
    Random rng(seed);
    switch (suite) {
    case Suite::lemmas: lemmas_suite(rep, trials, rng, grid_intervals); break;
    case Suite::operator_: operator_suite(rep, trials, rng, grid_intervals); break;
    case Suite::oracle: oracle_suite(rep, trials, rng, grid_intervals); break;
    }
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace ma_radial
